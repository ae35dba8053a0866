#include "irsmc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace irsmc::harness {

using nlohmann::json;

namespace {

constexpr Baseline kAllBaselines[] = {Baseline::proposed, Baseline::a, Baseline::b,
                                      Baseline::c,        Baseline::d, Baseline::e};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

int as_count(double v, const char *what) {
  if (!(v >= 1.0) || v != std::floor(v) || v > 1e6) {
    throw ConfigError(std::string(what) + " sweep values must be positive integers");
  }
  return static_cast<int>(v);
}

bool uses_optimized_phases(Baseline id) {
  return id == Baseline::proposed || id == Baseline::a || id == Baseline::d || id == Baseline::e;
}

bool uses_hybrid(Baseline id) {
  return id == Baseline::proposed || id == Baseline::b || id == Baseline::d;
}

bool uses_surrogate(Baseline id) { return id == Baseline::d || id == Baseline::e; }

} // namespace

std::string baseline_name(Baseline b) {
  switch (b) {
  case Baseline::proposed:
    return "proposed";
  case Baseline::a:
    return "a";
  case Baseline::b:
    return "b";
  case Baseline::c:
    return "c";
  case Baseline::d:
    return "d_surrogate";
  case Baseline::e:
    return "e_surrogate";
  }
  return "unknown";
}

Baseline parse_baseline(const std::string &s) {
  for (Baseline b : kAllBaselines) {
    const std::string name = baseline_name(b);
    if (s == name || (name.size() > 1 && name[1] == '_' && s == name.substr(0, 1))) {
      return b;
    }
  }
  throw ConfigError("unknown baseline '" + s + "' (expected proposed, a, b, c, d, e)");
}

std::vector<Baseline> parse_baseline_list(const std::string &csv) {
  std::vector<bool> seen(std::size(kAllBaselines), false);
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item.empty()) {
      continue;
    }
    seen[static_cast<std::size_t>(parse_baseline(item))] = true;
  }
  std::vector<Baseline> out;
  for (Baseline b : kAllBaselines) {
    if (seen[static_cast<std::size_t>(b)]) {
      out.push_back(b);
    }
  }
  if (out.empty()) {
    throw ConfigError("baseline list is empty");
  }
  return out;
}

SweepVar parse_sweep_var(const std::string &s) {
  if (s == "none") {
    return SweepVar::none;
  }
  if (s == "power") {
    return SweepVar::power;
  }
  if (s == "elements") {
    return SweepVar::elements;
  }
  if (s == "streams") {
    return SweepVar::streams;
  }
  if (s == "groups") {
    return SweepVar::groups;
  }
  throw ConfigError("unknown sweep '" + s + "' (expected power, elements, streams, groups)");
}

std::string sweep_column_name(SweepVar v) {
  switch (v) {
  case SweepVar::none:
    return "none";
  case SweepVar::power:
    return "power_dbm";
  case SweepVar::elements:
    return "n_irs";
  case SweepVar::streams:
    return "zeta";
  case SweepVar::groups:
    return "h_groups";
  }
  return "none";
}

std::vector<double> default_sweep_values(SweepVar v) {
  switch (v) {
  case SweepVar::none:
    return {};
  case SweepVar::power:
    return {20, 30, 40, 50};
  case SweepVar::elements:
    return {16, 64, 144};
  case SweepVar::streams:
  case SweepVar::groups:
    return {1, 2, 3, 4};
  }
  return {};
}

double EnergyModel::consumed_w(const SystemConfig &cfg) const {
  return cfg.power_w() + dbm_to_w(p_bs_static_dbm) + cfg.n_irs() * dbm_to_w(p_element_dbm);
}

double EnergyModel::efficiency(double sum_rate_bps, const SystemConfig &cfg) const {
  return sum_rate_bps / consumed_w(cfg);
}

SystemConfig apply_sweep(const SystemConfig &base, SweepVar var, double value) {
  SystemConfig cfg = base;
  switch (var) {
  case SweepVar::none:
    break;
  case SweepVar::power:
    if (!std::isfinite(value)) {
      throw ConfigError("power sweep values must be finite");
    }
    cfg.power_dbm = value;
    break;
  case SweepVar::elements: {
    const int m = as_count(value, "elements");
    const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(m))));
    if (side * side != m) {
      throw ConfigError("elements sweep values must be perfect squares (square IRS)");
    }
    cfg.f_y = side;
    cfg.f_z = side;
    break;
  }
  case SweepVar::streams:
    cfg.zeta = as_count(value, "streams");
    break;
  case SweepVar::groups: {
    const int h = as_count(value, "groups");
    const int size = base.group_sizes.empty() ? 1 : base.group_sizes.front();
    cfg.h_groups = h;
    cfg.k_users = h * size;
    cfg.group_sizes.assign(static_cast<std::size_t>(h), size);
    break;
  }
  }
  cfg.m_bs = std::max(cfg.m_bs, cfg.h_groups * cfg.zeta);
  cfg.m_ue = std::max(cfg.m_ue, cfg.zeta);
  cfg.validate();
  return cfg;
}

// Experiment documents ----------------------------------------------

const std::vector<std::string> &experiment_keys() {
  static const std::vector<std::string> keys{
      "sweep",          "sweep_values",  "baselines", "seeds",   "out_csv",
      "trace_csv",      "p_bs_static_dbm", "p_element_dbm", "threads", "record_wall_ms"};
  return keys;
}

void ExperimentSpec::validate() const {
  base.validate();
  if (seeds < 1) {
    throw ConfigError("seeds must be >= 1");
  }
  if (baselines.empty()) {
    throw ConfigError("at least one baseline is required");
  }
  if (threads < 0) {
    throw ConfigError("threads must be >= 0");
  }
  if (sweep == SweepVar::none) {
    if (!sweep_values.empty()) {
      throw ConfigError("sweep_values given without a sweep variable");
    }
    return;
  }
  if (sweep_values.empty()) {
    throw ConfigError("sweep needs at least one value");
  }
  for (std::size_t i = 1; i < sweep_values.size(); ++i) {
    if (!(sweep_values[i] > sweep_values[i - 1])) {
      throw ConfigError("sweep values must be strictly increasing");
    }
  }
  for (double v : sweep_values) {
    (void)apply_sweep(base, sweep, v);
  }
}

ExperimentSpec parse_experiment(const json &j) {
  ExperimentSpec spec;
  spec.base = parse_system_config(j, experiment_keys());
  spec.base_seed = spec.base.seed;
  try {
    if (j.contains("sweep")) {
      spec.sweep = parse_sweep_var(j.at("sweep").get<std::string>());
    }
    if (j.contains("sweep_values")) {
      spec.sweep_values = j.at("sweep_values").get<std::vector<double>>();
    } else {
      spec.sweep_values = default_sweep_values(spec.sweep);
    }
    if (j.contains("baselines")) {
      const auto &b = j.at("baselines");
      if (b.is_string()) {
        spec.baselines = parse_baseline_list(b.get<std::string>());
      } else {
        std::string joined;
        for (const auto &item : b) {
          joined += item.get<std::string>() + ",";
        }
        spec.baselines = parse_baseline_list(joined);
      }
    }
    if (j.contains("seeds")) {
      spec.seeds = j.at("seeds").get<int>();
    }
    if (j.contains("out_csv")) {
      spec.out_csv = j.at("out_csv").get<std::string>();
    }
    if (j.contains("trace_csv")) {
      spec.trace_csv = j.at("trace_csv").get<std::string>();
    }
    if (j.contains("p_bs_static_dbm")) {
      spec.energy.p_bs_static_dbm = j.at("p_bs_static_dbm").get<double>();
    }
    if (j.contains("p_element_dbm")) {
      spec.energy.p_element_dbm = j.at("p_element_dbm").get<double>();
    }
    if (j.contains("threads")) {
      spec.threads = j.at("threads").get<int>();
    }
    if (j.contains("record_wall_ms")) {
      spec.record_wall_ms = j.at("record_wall_ms").get<bool>();
    }
  } catch (const json::exception &e) {
    throw ConfigError(std::string("experiment config: ") + e.what());
  }
  spec.validate();
  return spec;
}

ExperimentSpec load_experiment(const std::string &path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file '" + path + "'");
  }
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error &e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_experiment(j);
}

// Single runs -------------------------------------------------------------

Instance make_instance(const SystemConfig &cfg, std::uint64_t seed) {
  Rng ch_rng(seed);
  Instance inst;
  inst.channels = generate_channels(cfg, ch_rng);
  if (cfg.nu_init == PhaseInit::ones) {
    inst.nu0 = PhaseVector::ones(cfg.n_irs());
  } else {
    Rng nu_rng = Rng::derive(seed, 1);
    inst.nu0 = PhaseVector::random(cfg.n_irs(), nu_rng);
  }
  return inst;
}

BeamformerSet factor_beamformers(const BeamformerSet &digital, const SystemConfig &cfg, Rng &rng,
                                 const hybridfactor::FactorOptions &opt, int *s2) {
  BeamformerSet out;
  out.mode = BeamformerMode::hybrid;
  const auto tx = hybridfactor::factor(digital.digital_b, cfg.m_bs, rng, opt);
  out.f_rf = tx.f_rf;
  out.f_bb = hybridfactor::normalize_power(tx.f_rf, tx.f_bb, cfg.power_w());
  if (s2 != nullptr) {
    *s2 = tx.iterations;
  }
  for (const auto &j : digital.digital_j) {
    auto rx = hybridfactor::factor_receive(j, cfg.m_ue, rng, opt);
    out.w_rf.push_back(std::move(rx.f_rf));
    out.w_bb.push_back(std::move(rx.f_bb));
  }
  return out;
}

RunRecord run(Baseline id, const SystemConfig &cfg, std::uint64_t seed, const RunOptions &opt) {
  const auto t0 = std::chrono::steady_clock::now();
  RunRecord r;
  r.seed = seed;
  r.baseline = id;
  try {
    const GroupAssignment groups = GroupAssignment::from_config(cfg);
    const Instance inst = make_instance(cfg, seed);
    PhaseVector nu = inst.nu0;
    if (uses_optimized_phases(id)) {
      const auto cs = phaseopt::coupling_vectors(inst.channels, groups, cfg);
      auto res = phaseopt::optimize_phases(cs, groups, inst.nu0, opt.armijo);
      nu = res.nu;
      r.s1_iters = res.iterations;
      r.trace = std::move(res.trace);
    }
    const auto h_eff = effective_channels(inst.channels, nu, cfg);
    BeamformerSet bf = uses_surrogate(id) ? bd::build_surrogate_beamformers(h_eff, groups, cfg)
                                          : bd::build_beamformers(h_eff, groups, cfg).beamformers;
    if (uses_hybrid(id)) {
      Rng hyb_rng = Rng::derive(seed, 2);
      bf = factor_beamformers(bf, cfg, hyb_rng, opt.factor, &r.s2_iters);
    }
    const RateReport rep = sum_rate(bf, h_eff, groups, cfg.noise_w(), cfg.bw_hz);
    r.sum_rate_bps = rep.sum_rate;
    r.group_rates = rep.group_rate;
    r.max_intra_ratio = rep.max_intra_ratio();
    r.max_inter_ratio = rep.max_inter_ratio();
    r.energy_eff_bps_per_w = opt.energy.efficiency(r.sum_rate_bps, cfg);
    r.constraints = check_constraints(bf, cfg, &nu);
    if (!r.constraints.ok()) {
      r.status = "constraint_violation";
    }
  } catch (const InfeasibleError &e) {
    r.status = "infeasible";
    r.message = e.what();
  } catch (const std::exception &e) {
    r.status = "error";
    r.message = e.what();
  }
  if (!r.ok()) {
    r.sum_rate_bps = 0.0;
    r.energy_eff_bps_per_w = 0.0;
  }
  r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

RunRecord run_proposed(const SystemConfig &cfg, std::uint64_t seed, const RunOptions &opt) {
  return run(Baseline::proposed, cfg, seed, opt);
}

RunRecord run_baseline(Baseline id, const SystemConfig &cfg, std::uint64_t seed,
                       const RunOptions &opt) {
  return run(id, cfg, seed, opt);
}

// CSV ----------------------------------------------------------------------

const std::string &csv_header() {
  static const std::string h = "seed,baseline,sweep_var,sweep_value,sum_rate_bps,s1_iters,s2_iters,"
                               "energy_eff_bps_per_w,status,wall_ms";
  return h;
}

std::string csv_row(const RunRecord &r, bool with_wall_ms) {
  std::string s;
  s += std::to_string(r.seed);
  s += ',' + baseline_name(r.baseline);
  s += ',' + sweep_column_name(r.sweep);
  s += ',' + num(r.sweep_value);
  s += ',' + num(r.sum_rate_bps);
  s += ',' + std::to_string(r.s1_iters);
  s += ',' + std::to_string(r.s2_iters);
  s += ',' + num(r.energy_eff_bps_per_w);
  s += ',' + r.status;
  s += ',' + (with_wall_ms ? num(std::round(r.wall_ms * 1000.0) / 1000.0) : std::string("0"));
  return s;
}

// Sweep --------------------------------------------------------------------

SweepSummary sweep(const ExperimentSpec &spec, const std::function<void(const RunRecord &)> &sink) {
  spec.validate();
  struct Task {
    SystemConfig cfg;
    Baseline baseline;
    std::uint64_t seed;
    double value;
  };
  std::vector<double> values = spec.sweep_values;
  if (spec.sweep == SweepVar::none) {
    values = {0.0};
  }
  std::vector<Task> tasks;
  for (double v : values) {
    const SystemConfig cfg = apply_sweep(spec.base, spec.sweep, v);
    for (Baseline b : spec.baselines) {
      for (int i = 0; i < spec.seeds; ++i) {
        tasks.push_back({cfg, b, spec.base_seed + static_cast<std::uint64_t>(i), v});
      }
    }
  }

  RunOptions opt;
  opt.energy = spec.energy;

  std::vector<std::optional<RunRecord>> results(tasks.size());
  std::mutex mu;
  std::condition_variable ready;
  std::atomic<std::size_t> next{0};

  unsigned n_workers = spec.threads > 0 ? static_cast<unsigned>(spec.threads)
                                        : std::max(1u, std::thread::hardware_concurrency());
  n_workers = static_cast<unsigned>(std::min<std::size_t>(n_workers, tasks.size()));

  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) {
        return;
      }
      const Task &t = tasks[i];
      RunRecord rec = run(t.baseline, t.cfg, t.seed, opt);
      rec.sweep = spec.sweep;
      rec.sweep_value = t.value;
      {
        std::lock_guard<std::mutex> lk(mu);
        results[i] = std::move(rec);
      }
      ready.notify_all();
    }
  };

  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < n_workers; ++w) {
    pool.emplace_back(worker);
  }

  SweepSummary sum;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    RunRecord rec;
    {
      std::unique_lock<std::mutex> lk(mu);
      ready.wait(lk, [&] { return results[i].has_value(); });
      rec = std::move(*results[i]);
      results[i].reset();
    }
    ++sum.rows;
    if (!rec.ok()) {
      ++sum.failures;
    }
    sink(rec);
  }
  return sum;
}

SweepSummary sweep_to_csv(const ExperimentSpec &spec, std::ostream &out, std::ostream *trace) {
  out << csv_header() << '\n';
  if (trace != nullptr) {
    phaseopt::write_trace_csv(*trace, {}, true);
  }
  return sweep(spec, [&](const RunRecord &r) {
    out << csv_row(r, spec.record_wall_ms) << '\n';
    if (trace != nullptr && r.baseline == Baseline::proposed) {
      phaseopt::write_trace_csv(*trace, r.trace, false);
    }
  });
}

} // namespace irsmc::harness
