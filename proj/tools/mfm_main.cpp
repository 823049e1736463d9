// Command-line front end: single chains, the sensitivity sweep, exact prior
// computations, trace summaries, and the flattened-likelihood prior check.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mfm/dataset.hpp"
#include "mfm/errors.hpp"
#include "mfm/harness.hpp"
#include "mfm/io_util.hpp"
#include "mfm/partition_prior.hpp"
#include "mfm/sampler.hpp"
#include "mfm/summaries.hpp"

namespace {

// Exit codes: 0 ok, 1 unexpected, 2 usage/config/parse, 3 file I/O,
// 4 numeric failure, 5 validation flagged.
constexpr int kExitUnexpected = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumeric = 4;
constexpr int kExitFlagged = 5;

struct ModelFlags {
  std::string prior = "uniform(1,30)";
  std::string kind = "static";
  double value = 1.0;
  double B0 = 20.0;
  double C0 = 5.0;
  std::string b0 = "midpoint";
  double c0 = 2.0;
};

void add_model_flags(CLI::App* sub, ModelFlags& m) {
  sub->add_option("--prior", m.prior, "Prior on K: uniform(a,b), trpois(lambda), geom(p), bnb(alpha,a,b)")
      ->capture_default_str();
  sub->add_option("--kind", m.kind, "Concentration schedule: static or dynamic")
      ->capture_default_str();
  sub->add_option("--value", m.value, "gamma (static) or alpha (dynamic)")
      ->capture_default_str();
  sub->add_option("--B0", m.B0, "Prior variance of component means")->capture_default_str();
  sub->add_option("--C0", m.C0, "Rate of the precision prior Gamma(c0, C0)")
      ->capture_default_str();
  sub->add_option("--b0", m.b0, "Prior mean of component means: 'midpoint' or a number")
      ->capture_default_str();
  sub->add_option("--c0", m.c0, "Shape of the precision prior")->capture_default_str();
}

mfm::MfmSetting to_setting(const ModelFlags& m) {
  mfm::MfmSetting s;
  s.prior_k = mfm::PriorOnK::parse(m.prior);
  mfm::MfmKind kind = mfm::parse_mfm_kind(m.kind);
  s.schedule = kind == mfm::MfmKind::static_mfm ? mfm::static_schedule(m.value)
                                                : mfm::dynamic_schedule(m.value);
  s.B0 = m.B0;
  s.C0 = m.C0;
  if (m.b0 != "midpoint") {
    std::size_t used = 0;
    double v = std::stod(m.b0, &used);
    if (used != m.b0.size())
      throw mfm::ConfigError("--b0: expected 'midpoint' or a number, got '" + m.b0 + "'");
    s.b0 = v;
  }
  s.c0 = m.c0;
  return s;
}

struct ProtocolFlags {
  std::string preset = "desk";
  std::int64_t iterations = -1;
  std::int64_t burn_in = -1;
  int thinning = -1;
  std::uint64_t seed = 1;
  int init_components = -1;
};

void add_protocol_flags(CLI::App* sub, ProtocolFlags& p) {
  sub->add_option("--preset", p.preset, "Chain length preset: desk (20k/5k/4) or paper (200k/10k/4)")
      ->capture_default_str();
  sub->add_option("--iterations", p.iterations, "Recorded-phase sweeps (before thinning)");
  sub->add_option("--burn-in", p.burn_in, "Burn-in sweeps");
  sub->add_option("--thinning", p.thinning, "Record every k-th sweep");
  sub->add_option("--seed", p.seed, "RNG seed")->capture_default_str();
  sub->add_option("--init-components", p.init_components, "Components at initialisation");
}

mfm::ChainProtocol to_protocol(const ProtocolFlags& p) {
  mfm::ChainProtocol proto;
  if (p.preset == "desk")
    proto = mfm::desk_protocol();
  else if (p.preset == "paper")
    proto = mfm::paper_protocol();
  else
    throw mfm::ConfigError("--preset: expected 'desk' or 'paper', got '" + p.preset + "'");
  if (p.iterations >= 0) proto.iterations = p.iterations;
  if (p.burn_in >= 0) proto.burn_in = p.burn_in;
  if (p.thinning >= 0) proto.thinning = p.thinning;
  if (p.init_components >= 0) proto.init_components = p.init_components;
  proto.seed = p.seed;
  return proto;
}

void print_histogram(const std::vector<double>& h) {
  for (std::size_t j = 0; j < h.size(); ++j) {
    if (h[j] <= 0.0) continue;
    std::printf("  K+ = %-3zu  %.6f  %s\n", j + 1, h[j],
                std::string(static_cast<std::size_t>(h[j] * 60 + 0.5), '#').c_str());
  }
}

void print_summary(const std::string& label, const mfm::KPlusPosteriorSummary& s) {
  std::printf("%s\n", label.c_str());
  std::printf("  draws   = %zu\n", s.draws);
  std::printf("  mode    = %d\n", s.mode);
  std::printf("  entropy = %.4f nats\n", s.entropy);
  print_histogram(s.histogram);
}

void print_table_block(const char* name, const std::vector<mfm::FactorLevel>& levels) {
  for (const auto& lv : levels)
    std::printf("  %-12s %-14s %8.2f  (%d cells)\n", name, lv.label.c_str(), lv.average,
                lv.count);
}

void print_marginal_table(const mfm::MarginalTable& t) {
  std::printf("average posterior mode of K+ by factor level\n");
  print_table_block("kind", t.by_kind);
  print_table_block("gamma/alpha", t.by_gamma_alpha);
  print_table_block("prior_k", t.by_prior);
  print_table_block("B0", t.by_B0);
  print_table_block("C0", t.by_C0);
}

int run_single(const ModelFlags& model, const ProtocolFlags& protocol, const std::string& data,
               bool flattened, const std::string& trace_out) {
  mfm::Dataset ds = mfm::load_dataset(data);
  mfm::MfmSetting setting = to_setting(model);
  mfm::ChainTrace trace =
      mfm::run_chain(ds, setting, to_protocol(protocol),
                     flattened ? mfm::LikelihoodMode::flattened : mfm::LikelihoodMode::normal);
  if (!trace_out.empty()) mfm::write_trace_csv(trace_out, trace);
  print_summary("setting " + setting.setting_id(), mfm::summarize_kplus(trace));
  if (!trace_out.empty()) std::printf("trace written to %s\n", trace_out.c_str());
  return 0;
}

mfm::SweepConfig build_sweep_config(const std::string& config_path,
                                    const std::vector<std::string>& sets) {
  mfm::SweepConfig config = config_path.empty() ? mfm::default_galaxy_config()
                                                : mfm::load_sweep_config(config_path);
  for (const std::string& kv : sets) {
    std::size_t eq = kv.find('=');
    if (eq == std::string::npos)
      throw mfm::ConfigError("--set: expected key=value, got '" + kv + "'");
    mfm::apply_config_override(config, mfm::trim_copy(kv.substr(0, eq)),
                               mfm::trim_copy(kv.substr(eq + 1)));
  }
  return config;
}

int run_sweep_cmd(const mfm::SweepConfig& config) {
  mfm::SweepReport report = mfm::run_sweep(config);
  std::printf("sweep finished: %d run, %d reused, %d failed (of %zu settings)\n",
              report.completed, report.reused, report.failed, report.rows.size());
  std::printf("summary:  %s\nmanifest: %s\n", report.summary_path.c_str(),
              report.manifest_path.c_str());
  for (const mfm::SweepRow& row : report.rows)
    if (!row.error.empty())
      std::printf("  failed %s: %s\n", row.setting.setting_id().c_str(), row.error.c_str());
  if (report.failed == 0) {
    std::vector<std::pair<mfm::MfmSetting, int>> modes;
    for (const mfm::SweepRow& row : report.rows)
      modes.emplace_back(row.setting, row.summary.mode);
    print_marginal_table(mfm::marginal_table(modes));
  }
  return report.failed == 0 ? 0 : kExitNumeric;
}

int run_prior_kplus(const ModelFlags& model, int n, const std::string& data, int given_k) {
  int nn = n;
  if (nn <= 0) nn = mfm::load_dataset(data).n();
  mfm::MfmSetting setting = to_setting(model);
  mfm::KPlusDistribution dist =
      given_k > 0 ? mfm::kplus_given_k(given_k, nn, setting.schedule)
                  : mfm::induced_kplus_prior(setting.prior_k, setting.schedule, nn);
  if (given_k > 0)
    std::printf("P(K+ | K = %d, n = %d), %s schedule, value %s\n", given_k, nn,
                mfm::to_string(setting.schedule.kind).c_str(),
                mfm::format_number(setting.schedule.value).c_str());
  else
    std::printf("induced prior of K+ under %s, %s schedule, value %s, n = %d\n",
                setting.prior_k.str().c_str(), mfm::to_string(setting.schedule.kind).c_str(),
                mfm::format_number(setting.schedule.value).c_str(), nn);
  double mean = 0.0;
  for (int j = 1; j <= dist.max_j(); ++j) mean += j * dist.prob(j);
  print_histogram(dist.probs);
  std::printf("  mode    = %d\n  mean    = %.4f\n  entropy = %.4f nats\n", dist.mode(), mean,
              dist.entropy());
  return 0;
}

int run_prior_curves(const ModelFlags& model, const std::string& data, double lo, double hi,
                     int points, const std::string& out_path) {
  if (points < 2) throw mfm::ConfigError("--points must be >= 2");
  if (!(hi > lo)) throw mfm::ConfigError("--max must be greater than --min");
  mfm::Dataset ds = mfm::load_dataset(data);
  mfm::MfmSetting setting = to_setting(model);
  mfm::ComponentPriors priors = mfm::resolve_component_priors(setting, ds);
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i) grid[i] = lo + (hi - lo) * i / (points - 1);
  auto mean_curve = mfm::prior_mean_density_curve(priors.b0, priors.B0, grid);
  auto width_curve = mfm::prior_4sigma_density_curve(priors.c0, priors.C0, grid);
  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw std::runtime_error("cannot write file: " + out_path);
    out = &file;
  }
  (*out) << "x,mean_density,foursigma_density\n";
  char buf[128];
  for (int i = 0; i < points; ++i) {
    std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g\n", grid[i], mean_curve[i].second,
                  width_curve[i].second);
    (*out) << buf;
  }
  if (!out_path.empty()) std::printf("curves written to %s\n", out_path.c_str());
  return 0;
}

int run_summarize(const std::vector<std::string>& traces, const std::string& table_csv) {
  if (!table_csv.empty()) {
    std::ifstream in(table_csv);
    if (!in) throw mfm::ParseError("cannot open summary file: " + table_csv);
    std::string line;
    if (!std::getline(in, line) ||
        line != "setting_id,mfm_kind,prior_k,gamma_or_alpha,B0,C0,mode,entropy,hist_json")
      throw mfm::ParseError(table_csv + ": not a sweep summary file (bad header)");
    std::vector<std::pair<mfm::MfmSetting, int>> modes;
    int lineno = 1;
    while (std::getline(in, line)) {
      ++lineno;
      if (mfm::trim_copy(line).empty()) continue;
      auto f = mfm::split_csv_line(line);
      if (f.size() != 9)
        throw mfm::ParseError(table_csv + ":" + std::to_string(lineno) + ": expected 9 fields");
      mfm::MfmSetting s;
      s.prior_k = mfm::PriorOnK::parse(f[2]);
      mfm::MfmKind kind = mfm::parse_mfm_kind(f[1]);
      double value = std::stod(f[3]);
      s.schedule = kind == mfm::MfmKind::static_mfm ? mfm::static_schedule(value)
                                                    : mfm::dynamic_schedule(value);
      s.B0 = std::stod(f[4]);
      s.C0 = std::stod(f[5]);
      modes.emplace_back(std::move(s), std::stoi(f[6]));
    }
    print_marginal_table(mfm::marginal_table(modes));
    return 0;
  }
  if (traces.empty())
    throw mfm::ConfigError("summarize: pass trace files or --table summary.csv");
  for (const std::string& path : traces) {
    mfm::ChainTrace trace = mfm::read_trace_csv(path);
    std::string label = path;
    for (const auto& [k, v] : trace.meta)
      if (k == "setting_id") label = path + " (" + v + ")";
    print_summary(label, mfm::summarize_kplus(trace));
  }
  return 0;
}

int run_validate(const mfm::SweepConfig& config, double threshold) {
  auto rows = mfm::validate_priors(config, threshold);
  int flagged = 0;
  std::printf("flattened-likelihood check, TV threshold %.3f\n", threshold);
  for (const auto& row : rows) {
    if (row.flagged) ++flagged;
    std::printf("  %-40s TV = %.4f %s\n", row.setting.setting_id().c_str(), row.tv,
                row.flagged ? "FLAGGED" : "ok");
  }
  std::printf("%d of %zu settings flagged\n", flagged, rows.size());
  return flagged == 0 ? 0 : kExitFlagged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite mixtures with a prior on the number of components: exact prior-of-K+ "
               "computations, the telescoping sampler, and the prior-sensitivity sweep."};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Run one chain and print its K+ summary");
  ModelFlags run_model;
  ProtocolFlags run_protocol;
  std::string run_data = "builtin:galaxy";
  std::string run_trace;
  bool run_flattened = false;
  add_model_flags(run, run_model);
  add_protocol_flags(run, run_protocol);
  run->add_option("--data", run_data, "Data file or builtin:galaxy")->capture_default_str();
  run->add_option("--trace", run_trace, "Write the trace CSV here");
  run->add_flag("--flattened", run_flattened, "Drop the likelihood (chain targets the prior)");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Run the full-factorial sensitivity sweep");
  std::string sweep_config_path;
  std::vector<std::string> sweep_sets;
  sweep->add_option("--config", sweep_config_path, "Key-value config file");
  sweep->add_option("--set", sweep_sets, "Override one config key, e.g. --set chain.preset=paper");

  // prior-kplus
  auto* pk = app.add_subcommand("prior-kplus", "Exact distribution of the number of clusters");
  ModelFlags pk_model;
  int pk_n = 0;
  int pk_given_k = 0;
  std::string pk_data = "builtin:galaxy";
  add_model_flags(pk, pk_model);
  pk->add_option("--n", pk_n, "Sample size (default: size of --data)");
  pk->add_option("--data", pk_data, "Data file or builtin:galaxy")->capture_default_str();
  pk->add_option("--given-k", pk_given_k, "Condition on K instead of mixing over the prior");

  // prior-curves
  auto* curves = app.add_subcommand("prior-curves",
                                    "Densities of the component-mean prior and of 4*sigma");
  ModelFlags curves_model;
  std::string curves_data = "builtin:galaxy";
  double curves_lo = 0.5, curves_hi = 40.0;
  int curves_points = 200;
  std::string curves_out;
  add_model_flags(curves, curves_model);
  curves->add_option("--data", curves_data, "Data file or builtin:galaxy")->capture_default_str();
  curves->add_option("--min", curves_lo, "Grid start")->capture_default_str();
  curves->add_option("--max", curves_hi, "Grid end")->capture_default_str();
  curves->add_option("--points", curves_points, "Grid points")->capture_default_str();
  curves->add_option("--out", curves_out, "Write CSV here instead of stdout");

  // summarize
  auto* summ = app.add_subcommand("summarize", "Summarise trace files or a sweep summary");
  std::vector<std::string> summ_traces;
  std::string summ_table;
  summ->add_option("traces", summ_traces, "Trace CSV files");
  summ->add_option("--table", summ_table, "Print the marginal table of a summary.csv");

  // validate-prior
  auto* val = app.add_subcommand("validate-prior",
                                 "Flattened chains against the exact prior of K+");
  std::string val_config_path;
  std::vector<std::string> val_sets;
  double val_threshold = 0.05;
  val->add_option("--config", val_config_path, "Key-value config file");
  val->add_option("--set", val_sets, "Override one config key");
  val->add_option("--threshold", val_threshold, "TV distance that counts as a failure")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
    if (run->parsed())
      return run_single(run_model, run_protocol, run_data, run_flattened, run_trace);
    if (sweep->parsed())
      return run_sweep_cmd(build_sweep_config(sweep_config_path, sweep_sets));
    if (pk->parsed()) return run_prior_kplus(pk_model, pk_n, pk_data, pk_given_k);
    if (curves->parsed())
      return run_prior_curves(curves_model, curves_data, curves_lo, curves_hi, curves_points,
                              curves_out);
    if (summ->parsed()) return run_summarize(summ_traces, summ_table);
    if (val->parsed())
      return run_validate(build_sweep_config(val_config_path, val_sets), val_threshold);
    return kExitUsage;
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  } catch (const mfm::NumericError& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return kExitNumeric;
  } catch (const mfm::ParseError& e) {
    std::fprintf(stderr, "parse error: %s\n", e.what());
    return kExitUsage;
  } catch (const mfm::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "invalid argument: %s\n", e.what());
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "invalid argument: %s\n", e.what());
    return kExitUsage;
  } catch (const std::runtime_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "unexpected error: %s\n", e.what());
    return kExitUnexpected;
  }
}
