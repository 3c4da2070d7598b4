#include "gscfw/errors.hpp"
#include "gscfw/problems.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace gscfw {

namespace {

double parse_double(std::string_view tok, std::size_t line, const char* what) {
  double v = 0.0;
  const char* b = tok.data();
  const char* e = b + tok.size();
  if (!tok.empty() && *b == '+') ++b;
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || ptr != e) throw ParseError(line, std::string("bad ") + what + " '" + std::string(tok) + "'");
  return v;
}

long parse_index(std::string_view tok, std::size_t line) {
  long v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError(line, "bad index '" + std::string(tok) + "'");
  }
  return v;
}

}  // namespace

SparseDataset libsvm_parse(std::istream& in, bool normalize) {
  SparseDataset d;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    std::istringstream ls(text);
    std::string tok;
    if (!(ls >> tok)) continue;  // blank line

    const double label = parse_double(tok, line, "label");
    if (label != 1.0 && label != -1.0) throw ParseError(line, "label must be +1 or -1");

    SparseRow row;
    long last = 0;
    while (ls >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos || colon == 0 || colon + 1 == tok.size()) {
        throw ParseError(line, "malformed pair '" + tok + "'");
      }
      const long idx = parse_index(std::string_view(tok).substr(0, colon), line);
      if (idx < 1) throw ParseError(line, "indices are 1-based");
      if (idx <= last) throw ParseError(line, "indices must be strictly increasing");
      const double val = parse_double(std::string_view(tok).substr(colon + 1), line, "value");
      last = idx;
      row.emplace_back(static_cast<int>(idx - 1), val);
    }
    if (last > d.n) d.n = static_cast<int>(last);
    d.rows.push_back(std::move(row));
    d.labels.push_back(label);
  }
  if (normalize) d.normalize_rows();
  return d;
}

void libsvm_serialize(const SparseDataset& data, std::ostream& out) {
  char buf[64];
  for (std::size_t i = 0; i < data.p(); ++i) {
    out << (data.labels[i] > 0 ? "+1" : "-1");
    for (const auto& [j, v] : data.rows[i]) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out << ' ' << (j + 1) << ':' << buf;
    }
    out << '\n';
  }
}

}  // namespace gscfw
