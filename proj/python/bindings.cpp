#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "irsmc/channel.hpp"
#include "irsmc/harness.hpp"
#include "irsmc/hybridfactor.hpp"

namespace py = pybind11;
namespace h = irsmc::harness;
using nlohmann::json;

namespace {

// Config documents cross the boundary as JSON text; the Python wrapper
// serializes dicts.
irsmc::SystemConfig system_from(const std::string &text) {
  if (text.empty()) {
    return irsmc::SystemConfig{};
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception &e) {
    throw irsmc::ConfigError(e.what());
  }
  return irsmc::parse_system_config(j);
}

py::dict record_to_dict(const h::RunRecord &r) {
  py::dict d;
  d["seed"] = r.seed;
  d["baseline"] = h::baseline_name(r.baseline);
  d["sum_rate_bps"] = r.sum_rate_bps;
  d["group_rates"] = r.group_rates;
  d["s1_iters"] = r.s1_iters;
  d["s2_iters"] = r.s2_iters;
  d["energy_eff_bps_per_w"] = r.energy_eff_bps_per_w;
  d["status"] = r.status;
  d["message"] = r.message;
  d["max_intra_ratio"] = r.max_intra_ratio;
  d["max_inter_ratio"] = r.max_inter_ratio;
  std::vector<double> f;
  f.reserve(r.trace.size());
  for (const auto &t : r.trace) {
    f.push_back(t.f_value);
  }
  d["trace_f"] = f;
  return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "IRS-assisted mmWave multigroup multicast simulator";

  py::register_exception<irsmc::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<irsmc::InfeasibleError>(m, "InfeasibleError", PyExc_RuntimeError);

  m.def("default_config_json", [] { return irsmc::to_json(irsmc::SystemConfig{}).dump(); });

  m.def(
      "normalize_config_json",
      [](const std::string &text) { return irsmc::to_json(system_from(text)).dump(); },
      py::arg("config_json"));

  m.def(
      "run",
      [](const std::string &baseline, const std::string &config_json, std::uint64_t seed) {
        const auto cfg = system_from(config_json);
        const auto id = h::parse_baseline(baseline);
        h::RunRecord r;
        {
          py::gil_scoped_release release;
          r = h::run(id, cfg, seed);
        }
        return record_to_dict(r);
      },
      py::arg("baseline"), py::arg("config_json"), py::arg("seed"));

  m.def(
      "effective_channels",
      [](const std::string &config_json, std::uint64_t seed) {
        const auto cfg = system_from(config_json);
        const auto inst = h::make_instance(cfg, seed);
        return irsmc::effective_channels(inst.channels, inst.nu0, cfg);
      },
      py::arg("config_json"), py::arg("seed"),
      "Per-user effective channels at the seed's random starting phases.");

  m.def(
      "sweep_csv",
      [](const std::string &experiment_json) {
        h::ExperimentSpec spec;
        try {
          spec = h::parse_experiment(json::parse(experiment_json));
        } catch (const json::exception &e) {
          throw irsmc::ConfigError(e.what());
        }
        std::ostringstream out;
        {
          py::gil_scoped_release release;
          h::sweep_to_csv(spec, out);
        }
        return out.str();
      },
      py::arg("experiment_json"));

  m.def(
      "factor",
      [](const irsmc::ComplexMatrix &b, int n_rf, std::uint64_t seed) {
        irsmc::Rng rng(seed);
        const auto res = irsmc::hybridfactor::factor(b, n_rf, rng);
        return py::make_tuple(res.f_rf, res.f_bb, res.residual);
      },
      py::arg("b"), py::arg("n_rf"), py::arg("seed") = 1,
      "Unit-modulus F_RF and baseband F_BB approximating b; also returns the residual trace.");

  m.attr("CSV_HEADER") = h::csv_header();
}
