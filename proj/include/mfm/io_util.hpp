#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mfm/sampler.hpp"

namespace mfm {

// Flat "key = value" files; '#' starts a comment, blank lines are skipped.
// Keys keep their order; duplicate keys are allowed (last one wins for
// lookup_kv).
using KvPairs = std::vector<std::pair<std::string, std::string>>;

KvPairs read_kv_file(const std::string& path);
void write_kv_file(const std::string& path, const KvPairs& pairs);

// Last value for key, or empty optional.
const std::string* lookup_kv(const KvPairs& pairs, const std::string& key);

std::string trim_copy(const std::string& s);

// Trace files: '# key = value' metadata lines, then a
// 'draw_index,K,K_plus' header and one row per recorded draw.
void write_trace_csv(const std::string& path, const ChainTrace& trace);
ChainTrace read_trace_csv(const std::string& path);

// Minimal CSV quoting: wraps the field in double quotes (doubling any
// embedded quote) when it contains a comma, quote, or newline.
std::string csv_quote(const std::string& field);

// Splits one CSV line produced by csv_quote-style writers.
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace mfm
