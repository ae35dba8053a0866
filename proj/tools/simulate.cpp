// Monte Carlo driver: sum-rate sweeps and report generation from a JSON config.

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include <CLI11.hpp>

#include "irsmc/harness.hpp"

namespace h = irsmc::harness;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitPartial = 2;

// Opens `path` for writing, or returns std::cout when empty.
std::ostream &open_out(const std::string &path, std::unique_ptr<std::ofstream> &holder) {
  if (path.empty()) {
    return std::cout;
  }
  holder = std::make_unique<std::ofstream>(path);
  if (!*holder) {
    throw irsmc::ConfigError("cannot open output file '" + path + "'");
  }
  return *holder;
}

int run_report(const std::string &kind, const h::ExperimentSpec &spec) {
  std::unique_ptr<std::ofstream> holder;
  std::ostream &out = open_out(spec.out_csv, holder);
  h::RunOptions opt;
  opt.energy = spec.energy;

  if (kind == "theorem1") {
    const auto rep = h::theorem1_report(spec.base, spec.seeds, {16, 32, 64}, opt);
    h::write_csv(out, rep);
    for (std::size_t i = 0; i < rep.n_values.size(); ++i) {
      std::cerr << "N=" << rep.n_values[i] << " mean relative gap " << rep.mean_gap[i]
                << " (infeasible seeds " << rep.skipped[i] << ")\n";
    }
    return kExitOk;
  }
  if (kind == "cdf") {
    h::write_csv(out, h::cdf_report(spec.base, spec.seeds, spec.baselines, opt, spec.threads));
    return kExitOk;
  }
  if (kind == "energy") {
    const auto powers = spec.sweep == h::SweepVar::power ? spec.sweep_values
                                                        : h::default_sweep_values(h::SweepVar::power);
    const auto rows = h::energy_report(spec.base, powers, spec.seeds, spec.baselines, opt, spec.threads);
    h::write_csv(out, rows);
    for (const auto &r : rows) {
      if (r.runs < spec.seeds) {
        return kExitPartial;
      }
    }
    return kExitOk;
  }
  if (kind == "convergence") {
    const auto rep = h::convergence_report(spec.base, spec.seeds, {1, 2, 3, 4}, opt);
    h::write_csv(out, rep);
    return kExitOk;
  }
  throw irsmc::ConfigError("unknown report '" + kind + "'");
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"IRS-assisted multigroup multicast sum-rate simulator"};
  std::string config_path;
  std::optional<std::string> sweep;
  std::optional<std::string> baselines;
  std::optional<int> seeds;
  std::optional<int> threads;
  std::string out_path;
  std::string trace_path;
  std::string report;
  bool timing = false;

  app.add_option("--config", config_path, "JSON configuration file")->required();
  app.add_option("--sweep", sweep, "power | elements | streams | groups");
  app.add_option("--baselines", baselines, "comma list of a,b,c,d,e,proposed");
  app.add_option("--seeds", seeds, "number of Monte Carlo seeds");
  app.add_option("--out", out_path, "CSV output path (stdout when omitted)");
  app.add_option("--trace", trace_path, "phase optimizer trace CSV for proposed runs");
  app.add_option("--report", report, "theorem1 | cdf | energy | convergence");
  app.add_option("--threads", threads, "worker threads (0 = hardware concurrency)");
  app.add_flag("--timing", timing, "fill the wall_ms column (output no longer reproducible)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kExitConfig;
  }

  h::ExperimentSpec spec;
  try {
    spec = h::load_experiment(config_path);
    if (sweep) {
      const auto var = h::parse_sweep_var(*sweep);
      if (var != spec.sweep) {
        spec.sweep = var;
        spec.sweep_values = h::default_sweep_values(var);
      }
    }
    if (baselines) {
      spec.baselines = h::parse_baseline_list(*baselines);
    }
    if (seeds) {
      spec.seeds = *seeds;
    }
    if (threads) {
      spec.threads = *threads;
    }
    if (!out_path.empty()) {
      spec.out_csv = out_path;
    }
    if (!trace_path.empty()) {
      spec.trace_csv = trace_path;
    }
    spec.record_wall_ms = spec.record_wall_ms || timing;
    spec.validate();
  } catch (const irsmc::ConfigError &e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (!report.empty()) {
      return run_report(report, spec);
    }
    std::unique_ptr<std::ofstream> out_holder;
    std::unique_ptr<std::ofstream> trace_holder;
    std::ostream &out = open_out(spec.out_csv, out_holder);
    std::ostream *trace = spec.trace_csv.empty() ? nullptr : &open_out(spec.trace_csv, trace_holder);
    const auto summary = h::sweep_to_csv(spec, out, trace);
    if (summary.failures > 0) {
      std::cerr << summary.failures << " of " << summary.rows << " runs failed\n";
      return kExitPartial;
    }
    return kExitOk;
  } catch (const irsmc::ConfigError &e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitPartial;
  }
}
