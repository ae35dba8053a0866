#include <doctest.h>

#include <sstream>

#include "irsmc/harness.hpp"
#include "support.hpp"

using namespace irsmc;
using namespace irsmc::harness;
using nlohmann::json;

namespace {

std::size_t count_lines(const std::string &s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

} // namespace

TEST_CASE("baseline and sweep names") {
  CHECK(baseline_name(Baseline::d) == "d_surrogate");
  CHECK(parse_baseline("e") == Baseline::e);
  CHECK(parse_baseline("e_surrogate") == Baseline::e);
  CHECK_THROWS_AS(parse_baseline("f"), ConfigError);
  const auto list = parse_baseline_list("proposed,b,a,b");
  REQUIRE(list.size() == 3);
  CHECK(list[0] == Baseline::proposed);
  CHECK(list[1] == Baseline::a);
  CHECK(list[2] == Baseline::b);
  CHECK(parse_sweep_var("elements") == SweepVar::elements);
  CHECK(sweep_column_name(SweepVar::power) == "power_dbm");
  CHECK_THROWS_AS(parse_sweep_var("bandwidth"), ConfigError);
}

TEST_CASE("experiment parsing") {
  const auto spec = parse_experiment(json{{"sweep", "power"}, {"sweep_values", {20, 30}},
                                          {"baselines", {"proposed", "b"}}, {"seeds", 3},
                                          {"seed", 11}, {"n_bs", 16}});
  CHECK(spec.sweep == SweepVar::power);
  CHECK(spec.sweep_values == std::vector<double>{20, 30});
  CHECK(spec.baselines.size() == 2);
  CHECK(spec.seeds == 3);
  CHECK(spec.base_seed == 11);
  CHECK_THROWS_AS(parse_experiment(json{{"seedz", 3}}), ConfigError);
  CHECK_THROWS_AS(parse_experiment(json{{"seeds", 0}}), ConfigError);
  CHECK_THROWS_AS(parse_experiment(json{{"sweep", "power"}, {"sweep_values", {30, 20}}}), ConfigError);
  CHECK_THROWS_AS(load_experiment("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("sweep application") {
  const SystemConfig base;
  CHECK(apply_sweep(base, SweepVar::power, 20.0).power_dbm == 20.0);
  const auto e = apply_sweep(base, SweepVar::elements, 144.0);
  CHECK(e.f_y == 12);
  CHECK(e.f_z == 12);
  CHECK_THROWS_AS(apply_sweep(base, SweepVar::elements, 50.0), ConfigError);
  const auto s = apply_sweep(base, SweepVar::streams, 4.0);
  CHECK(s.zeta == 4);
  CHECK(s.m_bs >= 8);
  CHECK(s.m_ue >= 4);
  const auto g = apply_sweep(base, SweepVar::groups, 3.0);
  CHECK(g.h_groups == 3);
  CHECK(g.k_users == 6);
}

TEST_CASE("energy model") {
  EnergyModel em;
  em.p_bs_static_dbm = -1000.0;
  em.p_element_dbm = -1000.0;
  SystemConfig cfg;
  cfg.power_dbm = 30.0;
  const double e1 = em.efficiency(1e6, cfg);
  cfg.power_dbm = 40.0;
  CHECK(em.efficiency(1e6, cfg) == doctest::Approx(e1 / 10.0));
  const EnergyModel def;
  CHECK(def.consumed_w(cfg) == doctest::Approx(10.0 + dbm_to_w(39.0) + 64 * dbm_to_w(10.0)));
}

TEST_CASE("desk configuration runs every scheme to completion") {
  const SystemConfig cfg;
  for (auto b : {Baseline::proposed, Baseline::a, Baseline::b, Baseline::c, Baseline::d, Baseline::e}) {
    const auto r = run(b, cfg, 5);
    CHECK_MESSAGE(r.ok(), baseline_name(b) << ": " << r.message);
    CHECK(r.sum_rate_bps > 0.0);
    CHECK(r.constraints.ok());
    CHECK(std::isfinite(r.energy_eff_bps_per_w));
  }
}

TEST_CASE("runs are deterministic") {
  const SystemConfig cfg;
  const auto a = run_proposed(cfg, 9);
  const auto b = run_proposed(cfg, 9);
  CHECK(csv_row(a, false) == csv_row(b, false));
  CHECK(a.trace.size() == b.trace.size());
}

TEST_CASE("baselines b and c differ only in the beamformer mode") {
  const SystemConfig cfg;
  const auto b = run(Baseline::b, cfg, 2);
  const auto c = run(Baseline::c, cfg, 2);
  CHECK(b.s1_iters == 0);
  CHECK(c.s1_iters == 0);
  CHECK(c.s2_iters == 0);
  CHECK(b.s2_iters > 0);
  CHECK(test::rel_err(b.sum_rate_bps, c.sum_rate_bps) < 0.05);
}

TEST_CASE("infeasible points become labeled rows") {
  SystemConfig cfg = apply_sweep(SystemConfig{}, SweepVar::groups, 4.0);
  const auto r = run_proposed(cfg, 1);
  CHECK(r.status == "infeasible");
  CHECK(r.sum_rate_bps == 0.0);
}

TEST_CASE("CSV row count and byte-identical output") {
  ExperimentSpec spec;
  spec.sweep = SweepVar::power;
  spec.sweep_values = {20.0, 30.0};
  spec.baselines = {Baseline::proposed};
  spec.seeds = 3;
  spec.threads = 2;
  std::ostringstream a;
  std::ostringstream b;
  std::ostringstream ta;
  const auto sum = sweep_to_csv(spec, a, &ta);
  sweep_to_csv(spec, b);
  CHECK(sum.rows == 6);
  CHECK(count_lines(a.str()) == 7);
  CHECK(a.str().substr(0, a.str().find('\n')) ==
        "seed,baseline,sweep_var,sweep_value,sum_rate_bps,s1_iters,s2_iters,energy_eff_bps_per_w,status,wall_ms");
  CHECK(a.str() == b.str());
  CHECK(ta.str().rfind("iter,f_value,step_size,grad_norm,backtracks\n", 0) == 0);

  std::istringstream rows(a.str());
  std::string line;
  std::getline(rows, line);
  std::getline(rows, line);
  CHECK(line.rfind("1,proposed,power_dbm,20,", 0) == 0);
}

TEST_CASE("reports") {
  const SystemConfig cfg;
  SUBCASE("cdf ends at one and has a row per seed") {
    const auto rows = cdf_report(cfg, 3, {Baseline::c});
    REQUIRE(rows.size() == 3);
    CHECK(rows.back().cumulative == doctest::Approx(1.0));
    CHECK(rows[0].sum_rate_bps <= rows[1].sum_rate_bps);
    CHECK_THROWS_AS(cdf_report(cfg, 1, {Baseline::c}), std::invalid_argument);
  }
  SUBCASE("energy efficiency is finite and positive") {
    const auto rows = energy_report(cfg, {20.0, 40.0}, 2, {Baseline::c});
    REQUIRE(rows.size() == 2);
    for (const auto &r : rows) {
      CHECK(r.runs == 2);
      CHECK(r.mean_energy_eff > 0.0);
      CHECK(std::isfinite(r.mean_energy_eff));
    }
  }
  SUBCASE("convergence traces are monotone and capped") {
    const auto rep = convergence_report(cfg, 2, {1, 2});
    CHECK(rep.mean_s1.size() == 2);
    for (std::size_t i = 1; i < rep.traces.size(); ++i) {
      const auto &p = rep.traces[i - 1];
      const auto &q = rep.traces[i];
      if (q.entry.iter > 0) {
        CHECK(q.entry.f_value <= p.entry.f_value);
      }
      CHECK(q.entry.iter <= 500);
    }
  }
  SUBCASE("theorem-1 gaps are finite and reproducible") {
    const auto a = theorem1_report(cfg, 2, {16, 32});
    const auto b = theorem1_report(cfg, 2, {16, 32});
    REQUIRE(a.mean_gap.size() == 2);
    for (double g : a.mean_gap) {
      CHECK(std::isfinite(g));
    }
    std::ostringstream sa;
    std::ostringstream sb;
    write_csv(sa, a);
    write_csv(sb, b);
    CHECK(sa.str() == sb.str());
    CHECK(sa.str().rfind("n_antennas,seed,user,sigma_true_fro,sigma_approx_fro,rel_gap\n", 0) == 0);
  }
}
