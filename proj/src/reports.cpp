#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "irsmc/harness.hpp"

namespace irsmc::harness {

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

} // namespace

Theorem1Report theorem1_report(const SystemConfig &cfg, int seeds, const std::vector<int> &n_values,
                               const RunOptions &opt) {
  Theorem1Report rep;
  rep.n_values = n_values;
  for (int n : n_values) {
    SystemConfig c = cfg;
    c.n_bs = n;
    c.n_ue = n;
    c.m_bs = std::min(c.m_bs, n);
    c.m_ue = std::min(c.m_ue, n);
    c.validate();
    const GroupAssignment groups = GroupAssignment::from_config(c);

    double gap_sum = 0.0;
    int gap_count = 0;
    int skipped = 0;
    for (int i = 0; i < seeds; ++i) {
      const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(i);
      const Instance inst = make_instance(c, seed);
      const auto cs = phaseopt::coupling_vectors(inst.channels, groups, c);
      const auto res = phaseopt::optimize_phases(cs, groups, inst.nu0, opt.armijo);
      const auto h_eff = effective_channels(inst.channels, res.nu, c);
      bd::BdDecomposition dec;
      try {
        dec = bd::decompose(h_eff, groups, c);
      } catch (const InfeasibleError &) {
        ++skipped;
        continue;
      }
      const auto approx = phaseopt::sigma_approx(cs, res.nu);
      for (int k = 0; k < groups.num_users(); ++k) {
        Theorem1Row row;
        row.n_antennas = n;
        row.seed = seed;
        row.user = k;
        row.sigma_true_fro = dec.users[static_cast<std::size_t>(k)].sigma1.norm();
        row.sigma_approx_fro = approx[static_cast<std::size_t>(k)].norm();
        row.rel_gap = std::abs(row.sigma_true_fro - row.sigma_approx_fro) / row.sigma_true_fro;
        gap_sum += row.rel_gap;
        ++gap_count;
        rep.rows.push_back(row);
      }
    }
    rep.mean_gap.push_back(gap_count > 0 ? gap_sum / gap_count : std::nan(""));
    rep.skipped.push_back(skipped);
  }
  return rep;
}

void write_csv(std::ostream &os, const Theorem1Report &rep) {
  os << "n_antennas,seed,user,sigma_true_fro,sigma_approx_fro,rel_gap\n";
  for (const auto &r : rep.rows) {
    os << r.n_antennas << ',' << r.seed << ',' << r.user << ',' << num(r.sigma_true_fro) << ','
       << num(r.sigma_approx_fro) << ',' << num(r.rel_gap) << '\n';
  }
}

std::vector<CdfRow> cdf_report(const SystemConfig &cfg, int seeds,
                               const std::vector<Baseline> &baselines, const RunOptions &opt,
                               int threads) {
  if (seeds < 2) {
    throw std::invalid_argument("cdf_report needs at least 2 seeds");
  }
  ExperimentSpec spec;
  spec.base = cfg;
  spec.base_seed = cfg.seed;
  spec.seeds = seeds;
  spec.baselines = baselines;
  spec.energy = opt.energy;
  spec.threads = threads;

  std::map<Baseline, std::vector<double>> samples;
  sweep(spec, [&](const RunRecord &r) {
    if (r.ok()) {
      samples[r.baseline].push_back(r.sum_rate_bps);
    }
  });

  std::vector<CdfRow> rows;
  for (Baseline b : baselines) {
    auto &v = samples[b];
    std::sort(v.begin(), v.end());
    for (std::size_t i = 0; i < v.size(); ++i) {
      rows.push_back({b, static_cast<int>(i + 1), v[i],
                      static_cast<double>(i + 1) / static_cast<double>(v.size())});
    }
  }
  return rows;
}

void write_csv(std::ostream &os, const std::vector<CdfRow> &rows) {
  os << "baseline,rank,sum_rate_bps,cumulative\n";
  for (const auto &r : rows) {
    os << baseline_name(r.baseline) << ',' << r.rank << ',' << num(r.sum_rate_bps) << ','
       << num(r.cumulative) << '\n';
  }
}

std::vector<EnergyRow> energy_report(const SystemConfig &cfg, const std::vector<double> &power_dbm,
                                     int seeds, const std::vector<Baseline> &baselines,
                                     const RunOptions &opt, int threads) {
  ExperimentSpec spec;
  spec.base = cfg;
  spec.base_seed = cfg.seed;
  spec.seeds = seeds;
  spec.baselines = baselines;
  spec.sweep = SweepVar::power;
  spec.sweep_values = power_dbm;
  spec.energy = opt.energy;
  spec.threads = threads;

  std::vector<EnergyRow> rows;
  sweep(spec, [&](const RunRecord &r) {
    if (rows.empty() || rows.back().power_dbm != r.sweep_value || rows.back().baseline != r.baseline) {
      rows.push_back({r.sweep_value, r.baseline, 0.0, 0.0, 0});
    }
    if (r.ok()) {
      EnergyRow &e = rows.back();
      e.mean_sum_rate_bps += r.sum_rate_bps;
      e.mean_energy_eff += r.energy_eff_bps_per_w;
      ++e.runs;
    }
  });
  for (auto &e : rows) {
    if (e.runs > 0) {
      e.mean_sum_rate_bps /= e.runs;
      e.mean_energy_eff /= e.runs;
    }
  }
  return rows;
}

void write_csv(std::ostream &os, const std::vector<EnergyRow> &rows) {
  os << "power_dbm,baseline,mean_sum_rate_bps,mean_energy_eff_bps_per_w,runs\n";
  for (const auto &r : rows) {
    os << num(r.power_dbm) << ',' << baseline_name(r.baseline) << ',' << num(r.mean_sum_rate_bps)
       << ',' << num(r.mean_energy_eff) << ',' << r.runs << '\n';
  }
}

ConvergenceReport convergence_report(const SystemConfig &cfg, int seeds,
                                     const std::vector<int> &h_values, const RunOptions &opt) {
  ConvergenceReport rep;
  rep.h_values = h_values;
  for (int h : h_values) {
    const SystemConfig c = apply_sweep(cfg, SweepVar::groups, h);
    const GroupAssignment groups = GroupAssignment::from_config(c);
    double s1_sum = 0.0;
    for (int i = 0; i < seeds; ++i) {
      const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(i);
      const Instance inst = make_instance(c, seed);
      const auto cs = phaseopt::coupling_vectors(inst.channels, groups, c);
      const auto res = phaseopt::optimize_phases(cs, groups, inst.nu0, opt.armijo);
      s1_sum += res.iterations;
      for (const auto &t : res.trace) {
        rep.traces.push_back({h, seed, t});
      }
    }
    rep.mean_s1.push_back(seeds > 0 ? s1_sum / seeds : 0.0);
  }
  return rep;
}

void write_csv(std::ostream &os, const ConvergenceReport &rep) {
  os << "kind,h_groups,seed,iter,value\n";
  for (const auto &t : rep.traces) {
    os << "trace," << t.h_groups << ',' << t.seed << ',' << t.entry.iter << ','
       << num(t.entry.f_value) << '\n';
  }
  for (std::size_t i = 0; i < rep.h_values.size(); ++i) {
    os << "mean_s1," << rep.h_values[i] << ",,," << num(rep.mean_s1[i]) << '\n';
  }
}

} // namespace irsmc::harness
