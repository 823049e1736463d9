#include "mfm/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <thread>

#include "mfm/errors.hpp"
#include "mfm/io_util.hpp"
#include "mfm/math_util.hpp"

namespace fs = std::filesystem;

namespace mfm {

ChainProtocol desk_protocol() {
  ChainProtocol p;
  p.iterations = 20000;
  p.burn_in = 5000;
  p.thinning = 4;
  return p;
}

ChainProtocol paper_protocol() {
  ChainProtocol p;
  p.iterations = 200000;
  p.burn_in = 10000;
  p.thinning = 4;
  return p;
}

SweepConfig default_galaxy_config() {
  SweepConfig c;
  c.priors = {PriorOnK::uniform_on(1, 30), PriorOnK::trunc_poisson(3.0),
              PriorOnK::shifted_geometric(0.1), PriorOnK::shifted_bnb(1.0, 4.0, 3.0)};
  c.kinds = {MfmKind::static_mfm, MfmKind::dynamic_mfm};
  c.gamma_alpha = {0.01, 1.0, 10.0};
  c.B0_grid = {6.3, 20.0, 100.0, 630.0};
  c.C0_grid = {0.5, 1.0, 5.0, 12.5};
  return c;
}

std::vector<MfmSetting> enumerate_settings(const SweepConfig& config) {
  if (config.priors.empty() || config.kinds.empty() || config.gamma_alpha.empty() ||
      config.B0_grid.empty() || config.C0_grid.empty())
    throw ConfigError("sweep grid: every factor needs at least one level");
  std::vector<MfmSetting> out;
  out.reserve(config.priors.size() * config.kinds.size() * config.gamma_alpha.size() *
              config.B0_grid.size() * config.C0_grid.size());
  for (MfmKind kind : config.kinds)
    for (double v : config.gamma_alpha)
      for (const PriorOnK& prior : config.priors)
        for (double B0 : config.B0_grid)
          for (double C0 : config.C0_grid) {
            MfmSetting s;
            s.prior_k = prior;
            s.schedule = kind == MfmKind::static_mfm ? static_schedule(v) : dynamic_schedule(v);
            s.B0 = B0;
            s.C0 = C0;
            s.b0 = config.b0;
            s.c0 = config.c0;
            out.push_back(std::move(s));
          }
  return out;
}

std::uint64_t setting_seed(std::uint64_t base_seed, const std::string& setting_id) {
  return splitmix64(base_seed ^ fnv1a64(setting_id));
}

namespace {

void run_parallel(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
  if (workers <= 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<int>(std::min<std::size_t>(workers, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto drain = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(drain);
  for (auto& t : pool) t.join();
}

std::string grid_to_string(const SweepConfig& c) {
  auto join = [](const std::vector<std::string>& parts) {
    std::string s;
    for (std::size_t i = 0; i < parts.size(); ++i) s += (i ? "," : "") + parts[i];
    return s;
  };
  std::vector<std::string> priors, kinds, values, b, cc;
  for (const auto& p : c.priors) priors.push_back(p.str());
  for (auto k : c.kinds) kinds.push_back(to_string(k));
  for (double v : c.gamma_alpha) values.push_back(format_number(v));
  for (double v : c.B0_grid) b.push_back(format_number(v));
  for (double v : c.C0_grid) cc.push_back(format_number(v));
  return "priors=[" + join(priors) + "] kinds=[" + join(kinds) + "] gamma_alpha=[" +
         join(values) + "] B0=[" + join(b) + "] C0=[" + join(cc) + "]";
}

void write_summary_csv(const std::string& path, const std::vector<SweepRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write summary file: " + path);
  out << "setting_id,mfm_kind,prior_k,gamma_or_alpha,B0,C0,mode,entropy,hist_json\n";
  char entropy_buf[64];
  for (const SweepRow& row : rows) {
    if (!row.error.empty()) continue;
    std::snprintf(entropy_buf, sizeof(entropy_buf), "%.12g", row.summary.entropy);
    out << row.setting.setting_id() << "," << to_string(row.setting.schedule.kind) << ","
        << csv_quote(row.setting.prior_k.str()) << ","
        << format_number(row.setting.schedule.value) << "," << format_number(row.setting.B0)
        << "," << format_number(row.setting.C0) << "," << row.summary.mode << ","
        << entropy_buf << "," << csv_quote(histogram_json(row.summary.histogram)) << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_manifest(const std::string& path, const SweepConfig& config,
                    const SweepReport& report, int n, double total_ms) {
  KvPairs kv;
  kv.emplace_back("tool", std::string("mfm ") + kMfmVersion);
  kv.emplace_back("data", config.data_source);
  kv.emplace_back("n", std::to_string(n));
  kv.emplace_back("grid", grid_to_string(config));
  kv.emplace_back("b0", config.b0 ? format_number(*config.b0) : "midpoint");
  kv.emplace_back("c0", format_number(config.c0));
  kv.emplace_back("iterations", std::to_string(config.protocol.iterations));
  kv.emplace_back("burn_in", std::to_string(config.protocol.burn_in));
  kv.emplace_back("thinning", std::to_string(config.protocol.thinning));
  kv.emplace_back("init_components", std::to_string(config.protocol.init_components));
  kv.emplace_back("base_seed", std::to_string(config.protocol.seed));
  kv.emplace_back("workers", std::to_string(config.workers));
  kv.emplace_back("settings", std::to_string(report.rows.size()));
  kv.emplace_back("completed", std::to_string(report.completed));
  kv.emplace_back("reused", std::to_string(report.reused));
  kv.emplace_back("failed", std::to_string(report.failed));
  kv.emplace_back("total_wall_ms", format_number(total_ms));
  for (const SweepRow& row : report.rows) {
    std::string id = row.setting.setting_id();
    std::string status = !row.error.empty() ? "failed: " + row.error
                         : row.reused       ? "reused"
                                            : "ok";
    kv.emplace_back("setting." + id + ".status", status);
    kv.emplace_back("setting." + id + ".seed",
                    std::to_string(setting_seed(config.protocol.seed, id)));
    kv.emplace_back("setting." + id + ".wall_ms", format_number(row.wall_ms));
  }
  write_kv_file(path, kv);
}

}  // namespace

SweepReport run_sweep(const SweepConfig& config) {
  auto t_start = std::chrono::steady_clock::now();
  std::vector<MfmSetting> settings = enumerate_settings(config);
  Dataset data = load_dataset(config.data_source);
  fs::create_directories(config.output_dir);

  SweepReport report;
  report.rows.resize(settings.size());
  run_parallel(settings.size(), config.workers, [&](std::size_t i) {
    SweepRow& row = report.rows[i];
    row.setting = settings[i];
    std::string id = settings[i].setting_id();
    row.trace_path = config.output_dir + "/trace_" + id + ".csv";
    auto t0 = std::chrono::steady_clock::now();
    try {
      ChainTrace trace;
      if (fs::exists(row.trace_path)) {
        trace = read_trace_csv(row.trace_path);
        row.reused = true;
      } else {
        ChainProtocol proto = config.protocol;
        proto.seed = setting_seed(config.protocol.seed, id);
        trace = run_chain(data, settings[i], proto);
        write_trace_csv(row.trace_path, trace);
      }
      row.summary = summarize_kplus(trace);
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                            t0)
                      .count();
  });

  for (const SweepRow& row : report.rows) {
    if (!row.error.empty())
      ++report.failed;
    else if (row.reused)
      ++report.reused;
    else
      ++report.completed;
  }
  report.summary_path = config.output_dir + "/summary.csv";
  report.manifest_path = config.output_dir + "/manifest.txt";
  write_summary_csv(report.summary_path, report.rows);
  double total_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                              t_start)
                        .count();
  write_manifest(report.manifest_path, config, report, data.n(), total_ms);
  return report;
}

std::vector<PriorCheckRow> validate_priors(const SweepConfig& config, double tv_threshold) {
  std::vector<MfmSetting> settings = enumerate_settings(config);
  Dataset data = load_dataset(config.data_source);

  // The analytic distribution only depends on (prior, schedule); compute
  // each one once, not per (B0, C0) cell.
  std::map<std::string, KPlusDistribution> analytic;
  for (const MfmSetting& s : settings) {
    std::string key = s.prior_k.str() + "|" + to_string(s.schedule.kind) + "|" +
                      format_number(s.schedule.value);
    if (!analytic.count(key))
      analytic.emplace(key, induced_kplus_prior(s.prior_k, s.schedule, data.n()));
  }

  std::vector<PriorCheckRow> rows(settings.size());
  run_parallel(settings.size(), config.workers, [&](std::size_t i) {
    const MfmSetting& s = settings[i];
    PriorCheckRow& row = rows[i];
    row.setting = s;
    ChainProtocol proto = config.protocol;
    proto.seed = setting_seed(config.protocol.seed, s.setting_id());
    ChainTrace trace = run_chain(data, s, proto, LikelihoodMode::flattened);
    KPlusPosteriorSummary summary = summarize_kplus(trace);
    const KPlusDistribution& exact = analytic.at(s.prior_k.str() + "|" +
                                                 to_string(s.schedule.kind) + "|" +
                                                 format_number(s.schedule.value));
    row.tv = tv_distance(summary.histogram, exact.probs);
    row.flagged = row.tv > tv_threshold;
  });
  return rows;
}

namespace {

double parse_config_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': bad number '" + value + "'");
  }
  if (used != value.size())
    throw ConfigError("config key '" + key + "': bad number '" + value + "'");
  return v;
}

long long parse_config_int(const std::string& key, const std::string& value) {
  double v = parse_config_double(key, value);
  if (v != std::floor(v) || std::fabs(v) > 9e18)
    throw ConfigError("config key '" + key + "': expected an integer, got '" + value + "'");
  return static_cast<long long>(v);
}

// Comma-split that ignores commas inside parentheses, so prior lists like
// "uniform(1,30),bnb(1,4,3)" split into whole prior specs.
std::vector<std::string> split_list(const std::string& key, const std::string& value) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : value) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(trim_copy(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim_copy(cur));
  for (const std::string& tok : out)
    if (tok.empty()) throw ConfigError("config key '" + key + "': empty list entry");
  return out;
}

}  // namespace

void apply_config_override(SweepConfig& config, const std::string& key,
                           const std::string& value) {
  if (key == "grid.priors") {
    config.priors.clear();
    for (const std::string& tok : split_list(key, value)) {
      try {
        config.priors.push_back(PriorOnK::parse(tok));
      } catch (const ParseError& e) {
        throw ConfigError("config key '" + key + "': " + e.what());
      }
    }
  } else if (key == "grid.kinds") {
    config.kinds.clear();
    for (const std::string& tok : split_list(key, value)) {
      try {
        config.kinds.push_back(parse_mfm_kind(tok));
      } catch (const ParseError& e) {
        throw ConfigError("config key '" + key + "': " + e.what());
      }
    }
  } else if (key == "grid.gamma_alpha") {
    config.gamma_alpha.clear();
    for (const std::string& tok : split_list(key, value))
      config.gamma_alpha.push_back(parse_config_double(key, tok));
  } else if (key == "grid.B0") {
    config.B0_grid.clear();
    for (const std::string& tok : split_list(key, value))
      config.B0_grid.push_back(parse_config_double(key, tok));
  } else if (key == "grid.C0") {
    config.C0_grid.clear();
    for (const std::string& tok : split_list(key, value))
      config.C0_grid.push_back(parse_config_double(key, tok));
  } else if (key == "model.b0") {
    if (value == "midpoint")
      config.b0.reset();
    else
      config.b0 = parse_config_double(key, value);
  } else if (key == "model.c0") {
    config.c0 = parse_config_double(key, value);
  } else if (key == "chain.preset") {
    if (value == "desk") {
      auto seed = config.protocol.seed;
      auto init = config.protocol.init_components;
      config.protocol = desk_protocol();
      config.protocol.seed = seed;
      config.protocol.init_components = init;
    } else if (value == "paper") {
      auto seed = config.protocol.seed;
      auto init = config.protocol.init_components;
      config.protocol = paper_protocol();
      config.protocol.seed = seed;
      config.protocol.init_components = init;
    } else {
      throw ConfigError("chain.preset: expected 'desk' or 'paper', got '" + value + "'");
    }
  } else if (key == "chain.iterations") {
    config.protocol.iterations = parse_config_int(key, value);
  } else if (key == "chain.burn_in") {
    config.protocol.burn_in = parse_config_int(key, value);
  } else if (key == "chain.thinning") {
    config.protocol.thinning = static_cast<int>(parse_config_int(key, value));
  } else if (key == "chain.seed") {
    config.protocol.seed = static_cast<std::uint64_t>(parse_config_int(key, value));
  } else if (key == "chain.init_components") {
    config.protocol.init_components = static_cast<int>(parse_config_int(key, value));
  } else if (key == "run.workers") {
    config.workers = static_cast<int>(parse_config_int(key, value));
  } else if (key == "run.output_dir") {
    config.output_dir = value;
  } else if (key == "run.data") {
    config.data_source = value;
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

SweepConfig load_sweep_config(const std::string& path) {
  SweepConfig config = default_galaxy_config();
  try {
    for (const auto& [key, value] : read_kv_file(path)) apply_config_override(config, key, value);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return config;
}

}  // namespace mfm
