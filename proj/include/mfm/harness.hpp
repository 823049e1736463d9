#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mfm/partition_prior.hpp"
#include "mfm/sampler.hpp"
#include "mfm/summaries.hpp"

namespace mfm {

inline constexpr const char* kMfmVersion = "0.1.0";

// 20000 recorded-phase sweeps, 5000 burn-in, thinning 4: quick enough to
// iterate with at a desk.
ChainProtocol desk_protocol();
// 200000/10000/4: the full study protocol.
ChainProtocol paper_protocol();

// A full-factorial sensitivity sweep: every prior on K crossed with every
// mixture kind, concentration value, B0 and C0.
struct SweepConfig {
  std::vector<PriorOnK> priors;
  std::vector<MfmKind> kinds;
  std::vector<double> gamma_alpha;
  std::vector<double> B0_grid;
  std::vector<double> C0_grid;
  std::optional<double> b0;  // empty: data midpoint
  double c0 = 2.0;
  ChainProtocol protocol = desk_protocol();  // protocol.seed is the base seed
  int workers = 0;                           // 0: hardware concurrency
  std::string output_dir = "sweep_out";
  std::string data_source = "builtin:galaxy";
};

// The grid of the galaxy sensitivity study: four priors, both kinds,
// gamma/alpha in {0.01, 1, 10}, B0 in {6.3, 20, 100, 630}, C0 in
// {0.5, 1, 5, 12.5} — 384 settings.
SweepConfig default_galaxy_config();

// Settings in enumeration order: kinds, then gamma/alpha, then priors, then
// B0, then C0 (outermost to innermost).  Throws ConfigError on empty grids.
std::vector<MfmSetting> enumerate_settings(const SweepConfig& config);

// Seed for one setting's chain, decorrelated across settings and
// independent of execution order.
std::uint64_t setting_seed(std::uint64_t base_seed, const std::string& setting_id);

struct SweepRow {
  MfmSetting setting;
  KPlusPosteriorSummary summary;
  std::string trace_path;
  bool reused = false;      // trace file already existed (resume)
  std::string error;        // nonempty: the setting failed and has no summary
  double wall_ms = 0.0;
};

struct SweepReport {
  std::vector<SweepRow> rows;  // enumeration order
  std::string summary_path;
  std::string manifest_path;
  int completed = 0, reused = 0, failed = 0;
};

// Runs every setting (worker threads, deterministic per-setting seeds),
// writing trace_<setting_id>.csv per chain plus summary.csv and
// manifest.txt into output_dir.  Settings whose trace file already exists
// are summarised from disk instead of re-run.  Per-setting failures are
// recorded and do not abort the sweep.
SweepReport run_sweep(const SweepConfig& config);

struct PriorCheckRow {
  MfmSetting setting;
  double tv = 0.0;     // empirical flattened chain vs analytic K+ prior
  bool flagged = false;
};

// Runs each setting's chain in flattened mode and compares the K+ histogram
// against the exactly computed prior; rows with TV above the threshold are
// flagged.  A correct sampler stays well below 0.05 at desk scale.
std::vector<PriorCheckRow> validate_priors(const SweepConfig& config,
                                           double tv_threshold = 0.05);

// Flat key-value config file (see README for the key list); unknown keys
// throw ConfigError.  apply_config_override handles one "key=value" pair,
// e.g. from a --set flag.
SweepConfig load_sweep_config(const std::string& path);
void apply_config_override(SweepConfig& config, const std::string& key,
                           const std::string& value);

}  // namespace mfm
