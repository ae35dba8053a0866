#include <doctest.h>

#include "irsmc/signalmodel.hpp"
#include "support.hpp"

using namespace irsmc;

namespace {

struct Scene {
  GroupAssignment groups;
  std::vector<ComplexMatrix> h;
  BeamformerSet bf;
  int zeta = 0;
};

// Random digital scene: groups of the given sizes, zeta streams each.
Scene random_scene(const std::vector<int> &sizes, int zeta, int n_bs, int n_ue, Rng &rng) {
  Scene s;
  s.zeta = zeta;
  std::vector<std::vector<int>> g;
  int k = 0;
  for (int sz : sizes) {
    std::vector<int> members;
    for (int i = 0; i < sz; ++i) {
      members.push_back(k++);
    }
    g.push_back(members);
  }
  s.groups = GroupAssignment(g, k);
  s.h = test::random_channels(k, n_ue, n_bs, rng);
  s.bf.mode = BeamformerMode::digital;
  s.bf.digital_b = test::random_matrix(n_bs, static_cast<Eigen::Index>(sizes.size()) * zeta, rng);
  for (int u = 0; u < k; ++u) {
    s.bf.digital_j.push_back(test::random_matrix(n_ue, zeta, rng));
  }
  return s;
}

// Independent scalar accumulation of signal, I and J for one stream.
StreamSinr naive_sinr(const Scene &s, int user, int group, int stream, double noise) {
  const ComplexMatrix &hk = s.h[static_cast<std::size_t>(user)];
  const ComplexMatrix &w = s.bf.digital_j[static_cast<std::size_t>(user)];
  const ComplexMatrix &b = s.bf.digital_b;
  auto gain = [&](int col) {
    Complex acc = 0.0;
    for (Eigen::Index r = 0; r < hk.rows(); ++r) {
      Complex hf = 0.0;
      for (Eigen::Index c = 0; c < hk.cols(); ++c) {
        hf += hk(r, c) * b(c, col);
      }
      acc += std::conj(w(r, stream)) * hf;
    }
    return std::norm(acc);
  };
  StreamSinr out;
  for (int g = 0; g < s.groups.num_groups(); ++g) {
    for (int i = 0; i < s.zeta; ++i) {
      const double v = gain(g * s.zeta + i);
      if (g == group && i == stream) {
        out.signal = v;
      } else if (g == group) {
        out.intra += v;
      } else {
        out.inter += v;
      }
    }
  }
  out.sinr = out.signal / (out.intra + out.inter + noise);
  return out;
}

} // namespace

TEST_CASE("group assignment validation") {
  CHECK_NOTHROW(GroupAssignment({{0, 1}, {2}}, 3));
  CHECK_THROWS_AS(GroupAssignment({{0, 1}, {1, 2}}, 3), std::invalid_argument);
  CHECK_THROWS_AS(GroupAssignment({{0}, {}}, 1), std::invalid_argument);
  CHECK_THROWS_AS(GroupAssignment({{0, 1}}, 3), std::invalid_argument);
  const GroupAssignment g({{0, 1}, {2}}, 3);
  CHECK(g.group_of(2) == 1);
  CHECK(g.members(0).size() == 2);
}

TEST_CASE("single stream without interferers has SINR signal over noise") {
  Rng rng(1);
  Scene s = random_scene({1}, 1, 4, 3, rng);
  const auto r = stream_sinr(s.bf, s.h, s.groups, 0, 0, 0, 0.5);
  CHECK(r.intra == 0.0);
  CHECK(r.inter == 0.0);
  CHECK(r.sinr == doctest::Approx(r.signal / 0.5));
}

TEST_CASE("zero transmit column gives zero SINR") {
  Rng rng(2);
  Scene s = random_scene({2, 1}, 2, 5, 3, rng);
  s.bf.digital_b.col(1).setZero();
  CHECK(stream_sinr(s.bf, s.h, s.groups, 0, 0, 1, 1.0).sinr == 0.0);
}

TEST_CASE("stream SINR matches a naive accumulation") {
  Rng rng(3);
  Scene s = random_scene({2, 1, 2}, 2, 6, 4, rng);
  for (int k = 0; k < 5; ++k) {
    const int h = s.groups.group_of(k);
    for (int i = 0; i < 2; ++i) {
      const auto got = stream_sinr(s.bf, s.h, s.groups, k, h, i, 0.7);
      const auto ref = naive_sinr(s, k, h, i, 0.7);
      CHECK(test::rel_err(got.signal, ref.signal) < 1e-12);
      CHECK(test::rel_err(got.intra, ref.intra) < 1e-12);
      CHECK(test::rel_err(got.inter, ref.inter) < 1e-12);
      CHECK(test::rel_err(got.sinr, ref.sinr) < 1e-12);
    }
  }
  CHECK_THROWS_AS(stream_sinr(s.bf, s.h, s.groups, 5, 0, 0, 1.0), std::out_of_range);
  CHECK_THROWS_AS(stream_sinr(s.bf, s.h, s.groups, 0, 3, 0, 1.0), std::out_of_range);
  CHECK_THROWS_AS(stream_sinr(s.bf, s.h, s.groups, 0, 0, 2, 1.0), std::out_of_range);
}

TEST_CASE("removing interfering groups raises every interfered SINR") {
  Rng rng(4);
  Scene s = random_scene({1, 1}, 2, 4, 3, rng);
  Scene quiet = s;
  quiet.bf.digital_b.middleCols(2, 2).setZero();
  for (int i = 0; i < 2; ++i) {
    CHECK(stream_sinr(quiet.bf, quiet.h, quiet.groups, 0, 0, i, 1.0).sinr >
          stream_sinr(s.bf, s.h, s.groups, 0, 0, i, 1.0).sinr);
  }
}

TEST_CASE("user rate closed forms") {
  CHECK(user_rate(std::vector<double>{0.0, 0.0}, 1e6) == 0.0);
  CHECK(user_rate(std::vector<double>{1.0}, 1.0) == doctest::Approx(1.0));
  CHECK(user_rate(std::vector<double>{3.0}, 251.1886e6) == doctest::Approx(251.1886e6 * 2.0));
  CHECK(user_rate(std::vector<double>{3.0, 1.0}, 1.0) == doctest::Approx(3.0));
}

TEST_CASE("sum rate bookkeeping") {
  Rng rng(5);
  SUBCASE("singleton groups add up") {
    Scene s = random_scene({1, 1, 1}, 1, 5, 3, rng);
    const auto rep = sum_rate(s.bf, s.h, s.groups, 0.3, 2.0);
    CHECK(rep.sum_rate == doctest::Approx(rep.user_rate[0] + rep.user_rate[1] + rep.user_rate[2]));
  }
  SUBCASE("duplicate users share the group rate") {
    Scene s = random_scene({2, 1}, 2, 5, 3, rng);
    s.h[1] = s.h[0];
    s.bf.digital_j[1] = s.bf.digital_j[0];
    const auto rep = sum_rate(s.bf, s.h, s.groups, 0.3, 1.0);
    CHECK(rep.group_rate[0] == doctest::Approx(rep.user_rate[0]));
    CHECK(rep.user_rate[0] == doctest::Approx(rep.user_rate[1]));
  }
  SUBCASE("random two-group scene equals the naive recomputation") {
    Scene s = random_scene({2, 2}, 2, 6, 4, rng);
    const double noise = 0.2;
    const double bw = 3.0;
    const auto rep = sum_rate(s.bf, s.h, s.groups, noise, bw);
    double total = 0.0;
    for (int h = 0; h < 2; ++h) {
      double worst = std::numeric_limits<double>::infinity();
      for (int k : s.groups.members(h)) {
        double r = 0.0;
        for (int i = 0; i < 2; ++i) {
          r += bw * std::log2(1.0 + naive_sinr(s, k, h, i, noise).sinr);
        }
        CHECK(test::rel_err(rep.user_rate[static_cast<std::size_t>(k)], r) < 1e-12);
        worst = std::min(worst, r);
      }
      total += worst;
    }
    CHECK(test::rel_err(rep.sum_rate, total) < 1e-12);
  }
  SUBCASE("relabeling users inside a group leaves the sum rate unchanged") {
    Scene s = random_scene({2, 2}, 1, 4, 2, rng);
    Scene t = s;
    std::swap(t.h[0], t.h[1]);
    std::swap(t.bf.digital_j[0], t.bf.digital_j[1]);
    CHECK(sum_rate(s.bf, s.h, s.groups, 1.0, 1.0).sum_rate ==
          doctest::Approx(sum_rate(t.bf, t.h, t.groups, 1.0, 1.0).sum_rate));
  }
}

TEST_CASE("constraint diagnostics") {
  Rng rng(6);
  SystemConfig cfg = test::small_config(2, 1);
  BeamformerSet bf;
  bf.mode = BeamformerMode::hybrid;
  bf.f_rf = test::random_unit_modulus(cfg.n_bs * cfg.m_bs, rng).reshaped(cfg.n_bs, cfg.m_bs);
  bf.f_bb = test::random_matrix(cfg.m_bs, 2, rng);
  bf.f_bb *= std::sqrt(cfg.power_w()) / (bf.f_rf * bf.f_bb).norm();
  for (int k = 0; k < 2; ++k) {
    bf.w_rf.push_back(test::random_unit_modulus(cfg.n_ue * cfg.m_ue, rng).reshaped(cfg.n_ue, cfg.m_ue));
    bf.w_bb.push_back(test::random_matrix(cfg.m_ue, 1, rng));
  }
  const PhaseVector nu = PhaseVector::random(16, rng);
  const auto rep = check_constraints(bf, cfg, &nu);
  CHECK(rep.ok());
  CHECK(rep.max_rf_modulus_dev < 1e-9);
  CHECK(rep.power_ratio == doctest::Approx(1.0));

  bf.f_bb *= 2.0;
  const auto doubled = check_constraints(bf, cfg, &nu);
  CHECK(doubled.power_ratio == doctest::Approx(4.0 * rep.power_ratio));
  CHECK_FALSE(doubled.ok());

  bf.f_bb /= 2.0;
  bf.f_rf(0, 0) *= 1.5;
  CHECK_FALSE(check_constraints(bf, cfg, &nu).ok());
}
