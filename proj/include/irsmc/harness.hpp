#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "irsmc/bd.hpp"
#include "irsmc/channel.hpp"
#include "irsmc/config.hpp"
#include "irsmc/hybridfactor.hpp"
#include "irsmc/phaseopt.hpp"
#include "irsmc/signalmodel.hpp"

namespace irsmc::harness {

enum class Baseline { proposed, a, b, c, d, e };
enum class SweepVar { none, power, elements, streams, groups };

/// "proposed", "a" ... "e".
std::string baseline_name(Baseline b);
/// Inverse of baseline_name; throws ConfigError on unknown ids.
Baseline parse_baseline(const std::string &s);
/// Comma separated list, duplicates removed, canonical order kept.
std::vector<Baseline> parse_baseline_list(const std::string &csv);

/// CLI spelling: none, power, elements, streams, groups.
SweepVar parse_sweep_var(const std::string &s);
/// Column value written to CSV: none, power_dbm, n_irs, zeta, h_groups.
std::string sweep_column_name(SweepVar v);
/// Values used when a sweep is requested without explicit values.
std::vector<double> default_sweep_values(SweepVar v);

/// Total consumed power model for energy efficiency (not part of the
/// system description; both constants are configurable).
struct EnergyModel {
  double p_bs_static_dbm = 39.0;
  double p_element_dbm = 10.0;

  /// P + P_static + M * P_element, watts.
  double consumed_w(const SystemConfig &cfg) const;
  double efficiency(double sum_rate_bps, const SystemConfig &cfg) const;
};

struct ExperimentSpec {
  SystemConfig base;
  SweepVar sweep = SweepVar::none;
  std::vector<double> sweep_values; ///< strictly increasing; empty when sweep is none
  std::vector<Baseline> baselines{Baseline::proposed};
  int seeds = 1;
  std::uint64_t base_seed = 1; ///< run i uses seed base_seed + i
  std::string out_csv;
  std::string trace_csv;
  EnergyModel energy;
  int threads = 0;             ///< 0 selects the hardware concurrency
  bool record_wall_ms = false; ///< off keeps CSV output byte-reproducible

  /// Throws ConfigError on a violated invariant.
  void validate() const;
};

/// Keys accepted in an experiment document besides the system keys.
const std::vector<std::string> &experiment_keys();

/// Flat JSON: every SystemConfig key plus experiment_keys(). Unknown keys
/// are rejected. `seed` doubles as the base seed.
ExperimentSpec parse_experiment(const nlohmann::json &j);
/// Reads and parses a JSON file; I/O and syntax problems raise ConfigError.
ExperimentSpec load_experiment(const std::string &path);

/// Configuration at one sweep point. The elements sweep needs a square
/// count; groups keep the first group's size and set K = H * size. RF chain
/// counts are raised to the minimum the point requires.
SystemConfig apply_sweep(const SystemConfig &base, SweepVar var, double value);

/// Channels and the common random starting phase of one seed.
struct Instance {
  ChannelSet channels;
  PhaseVector nu0;
};

/// Channels come from Rng(seed); nu0 from the derived stream (seed, 1).
Instance make_instance(const SystemConfig &cfg, std::uint64_t seed);

struct RunRecord {
  std::uint64_t seed = 0;
  Baseline baseline = Baseline::proposed;
  SweepVar sweep = SweepVar::none;
  double sweep_value = 0.0;
  double sum_rate_bps = 0.0;
  std::vector<double> group_rates;
  int s1_iters = 0;
  int s2_iters = 0;
  double energy_eff_bps_per_w = 0.0;
  std::string status = "ok"; ///< ok, infeasible, constraint_violation, error
  std::string message;
  double wall_ms = 0.0;
  double max_intra_ratio = 0.0;
  double max_inter_ratio = 0.0;
  ConstraintReport constraints;
  std::vector<phaseopt::TraceEntry> trace; ///< phase optimizer trace, when run

  bool ok() const { return status == "ok"; }
};

struct RunOptions {
  phaseopt::ArmijoOptions armijo;
  hybridfactor::FactorOptions factor;
  EnergyModel energy;
};

/// Optimized phases, BD beamformers at those phases, hybrid factorization,
/// sum rate of the hybrid set.
RunRecord run_proposed(const SystemConfig &cfg, std::uint64_t seed, const RunOptions &opt = {});

/// a: BD digital, optimized phases. b: BD hybrid, random phases.
/// c: BD digital, random phases. d: no-nulling surrogate, hybrid, optimized
/// phases. e: surrogate, digital, optimized phases.
RunRecord run_baseline(Baseline id, const SystemConfig &cfg, std::uint64_t seed,
                       const RunOptions &opt = {});

/// Dispatches to run_proposed or run_baseline.
RunRecord run(Baseline id, const SystemConfig &cfg, std::uint64_t seed, const RunOptions &opt = {});

/// Hybrid factorization of digital beamformers: F^R F^B from B with m_bs
/// chains (power renormalized), W^R_k W^B_k from J_k with m_ue chains.
/// `s2` receives the transmit-side alternation count.
BeamformerSet factor_beamformers(const BeamformerSet &digital, const SystemConfig &cfg, Rng &rng,
                                 const hybridfactor::FactorOptions &opt, int *s2 = nullptr);

/// seed,baseline,sweep_var,sweep_value,sum_rate_bps,s1_iters,s2_iters,energy_eff_bps_per_w,status,wall_ms
const std::string &csv_header();
std::string csv_row(const RunRecord &r, bool with_wall_ms);

struct SweepSummary {
  std::size_t rows = 0;
  std::size_t failures = 0;
};

/// Every (sweep value, baseline, seed) run on a bounded worker pool. Rows
/// reach `sink` in sweep value, baseline, seed order while later runs are
/// still executing.
SweepSummary sweep(const ExperimentSpec &spec, const std::function<void(const RunRecord &)> &sink);

/// sweep() writing the CSV header and rows to `out`, and proposed-run phase
/// traces (concatenated, iter 0 starts a run) to `trace` when given.
SweepSummary sweep_to_csv(const ExperimentSpec &spec, std::ostream &out,
                          std::ostream *trace = nullptr);

// Reports ---------------------------------------------------------------

struct Theorem1Row {
  int n_antennas = 0;
  std::uint64_t seed = 0;
  int user = 0;
  double sigma_true_fro = 0.0;
  double sigma_approx_fro = 0.0;
  double rel_gap = 0.0;
};

struct Theorem1Report {
  std::vector<Theorem1Row> rows;
  std::vector<int> n_values;
  std::vector<double> mean_gap; ///< per n_values entry
  std::vector<int> skipped;     ///< infeasible seeds per n_values entry
};

/// For N^B = N^U = N in n_values: optimized phases, true Sigma_k^(1) from BD
/// and the coupling approximation at the same phases.
Theorem1Report theorem1_report(const SystemConfig &cfg, int seeds,
                               const std::vector<int> &n_values = {16, 32, 64},
                               const RunOptions &opt = {});
void write_csv(std::ostream &os, const Theorem1Report &rep);

struct CdfRow {
  Baseline baseline = Baseline::proposed;
  int rank = 0;
  double sum_rate_bps = 0.0;
  double cumulative = 0.0;
};

/// Sorted sum-rate samples of successful runs with cumulative fractions.
/// Throws std::invalid_argument for fewer than 2 seeds.
std::vector<CdfRow> cdf_report(const SystemConfig &cfg, int seeds,
                               const std::vector<Baseline> &baselines, const RunOptions &opt = {},
                               int threads = 0);
void write_csv(std::ostream &os, const std::vector<CdfRow> &rows);

struct EnergyRow {
  double power_dbm = 0.0;
  Baseline baseline = Baseline::proposed;
  double mean_sum_rate_bps = 0.0;
  double mean_energy_eff = 0.0;
  int runs = 0;
};

std::vector<EnergyRow> energy_report(const SystemConfig &cfg, const std::vector<double> &power_dbm,
                                     int seeds, const std::vector<Baseline> &baselines,
                                     const RunOptions &opt = {}, int threads = 0);
void write_csv(std::ostream &os, const std::vector<EnergyRow> &rows);

struct ConvergenceReport {
  struct TraceRow {
    int h_groups = 0;
    std::uint64_t seed = 0;
    phaseopt::TraceEntry entry;
  };
  std::vector<TraceRow> traces;
  std::vector<int> h_values;
  std::vector<double> mean_s1; ///< per h_values entry
};

/// Phase optimizer traces and mean S_1 versus the number of groups (group
/// size kept, K = H * size). Needs no BD feasibility.
ConvergenceReport convergence_report(const SystemConfig &cfg, int seeds,
                                     const std::vector<int> &h_values = {1, 2, 3, 4},
                                     const RunOptions &opt = {});
void write_csv(std::ostream &os, const ConvergenceReport &rep);

} // namespace irsmc::harness
