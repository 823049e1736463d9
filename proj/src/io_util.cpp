#include "mfm/io_util.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "mfm/errors.hpp"

namespace mfm {

std::string trim_copy(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

namespace {

// Splits "key = value"; returns false for lines without '='.
bool split_kv(const std::string& line, std::string& key, std::string& value) {
  std::size_t eq = line.find('=');
  if (eq == std::string::npos) return false;
  key = trim_copy(line.substr(0, eq));
  value = trim_copy(line.substr(eq + 1));
  return !key.empty();
}

long long parse_int_field(const std::string& tok, const std::string& path, int lineno,
                          const char* what) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    std::ostringstream msg;
    msg << path << ":" << lineno << ": bad " << what << " '" << tok << "'";
    throw ParseError(msg.str());
  }
  return v;
}

}  // namespace

KvPairs read_kv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  KvPairs pairs;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::string t = trim_copy(line);
    if (t.empty()) continue;
    std::string key, value;
    if (!split_kv(t, key, value)) {
      std::ostringstream msg;
      msg << path << ":" << lineno << ": expected 'key = value', got '" << t << "'";
      throw ParseError(msg.str());
    }
    pairs.emplace_back(std::move(key), std::move(value));
  }
  return pairs;
}

void write_kv_file(const std::string& path, const KvPairs& pairs) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  for (const auto& [k, v] : pairs) out << k << " = " << v << "\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

const std::string* lookup_kv(const KvPairs& pairs, const std::string& key) {
  const std::string* found = nullptr;
  for (const auto& [k, v] : pairs)
    if (k == key) found = &v;
  return found;
}

void write_trace_csv(const std::string& path, const ChainTrace& trace) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write trace file: " + path);
  for (const auto& [k, v] : trace.meta) out << "# " << k << " = " << v << "\n";
  out << "draw_index,K,K_plus\n";
  for (std::size_t i = 0; i < trace.draws(); ++i)
    out << (i + 1) << "," << trace.K[i] << "," << trace.k_plus[i] << "\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string csv_quote(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

ChainTrace read_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open trace file: " + path);
  ChainTrace trace;
  std::string line;
  int lineno = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim_copy(line);
    if (t.empty()) continue;
    if (t.front() == '#') {
      std::string key, value;
      if (split_kv(t.substr(1), key, value)) trace.meta.emplace_back(key, value);
      continue;
    }
    if (!saw_header) {
      if (t != "draw_index,K,K_plus") {
        std::ostringstream msg;
        msg << path << ":" << lineno << ": expected header 'draw_index,K,K_plus', got '" << t
            << "'";
        throw ParseError(msg.str());
      }
      saw_header = true;
      continue;
    }
    std::size_t c1 = t.find(',');
    std::size_t c2 = c1 == std::string::npos ? std::string::npos : t.find(',', c1 + 1);
    if (c2 == std::string::npos) {
      std::ostringstream msg;
      msg << path << ":" << lineno << ": expected 'draw_index,K,K_plus' row, got '" << t << "'";
      throw ParseError(msg.str());
    }
    parse_int_field(t.substr(0, c1), path, lineno, "draw_index");
    long long K = parse_int_field(t.substr(c1 + 1, c2 - c1 - 1), path, lineno, "K");
    long long kp = parse_int_field(t.substr(c2 + 1), path, lineno, "K_plus");
    if (kp < 1 || K < kp) {
      std::ostringstream msg;
      msg << path << ":" << lineno << ": invalid draw (need K >= K_plus >= 1)";
      throw ParseError(msg.str());
    }
    trace.K.push_back(static_cast<int>(K));
    trace.k_plus.push_back(static_cast<int>(kp));
  }
  if (!saw_header) throw ParseError(path + ": missing 'draw_index,K,K_plus' header");
  return trace;
}

}  // namespace mfm
