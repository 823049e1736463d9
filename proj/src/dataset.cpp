#include "mfm/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "mfm/math_util.hpp"

namespace mfm {

double Dataset::range_squared() const {
  double r = max() - min();
  return r * r;
}

double Dataset::sample_variance() const {
  if (n() < 2) throw std::invalid_argument("sample_variance: need at least 2 values");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n();
  KahanSum acc;
  for (double v : values) acc.add((v - mean) * (v - mean));
  return acc.value() / (n() - 1);
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

Dataset load_dataset(const std::string& source) {
  Dataset ds;
  if (source == "builtin:galaxy") {
    auto g = galaxy_velocities();
    ds.values.assign(g.begin(), g.end());
    return ds;
  }
  std::ifstream in(source);
  if (!in) throw ParseError("cannot open data file: " + source);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view tok = trim(line);
    if (tok.empty() || tok.front() == '#') continue;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v)) {
      std::ostringstream msg;
      msg << source << ":" << lineno << ": expected a single numeric value, got '"
          << std::string(tok) << "'";
      throw ParseError(msg.str());
    }
    ds.values.push_back(v);
  }
  if (ds.values.empty()) throw ParseError("data file contains no values: " + source);
  std::sort(ds.values.begin(), ds.values.end());
  return ds;
}

}  // namespace mfm
