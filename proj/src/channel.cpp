#include "irsmc/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace irsmc {

namespace {

constexpr double kPi = std::numbers::pi;

double norm3(const Vec3 &v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

Vec3 unit_from_to(const Vec3 &from, const Vec3 &to) {
  Vec3 d{to[0] - from[0], to[1] - from[1], to[2] - from[2]};
  const double n = norm3(d);
  if (n <= 0.0) {
    throw ConfigError("coincident positions: cannot derive an angle");
  }
  return {d[0] / n, d[1] / n, d[2] / n};
}

double distance(const Vec3 &a, const Vec3 &b) {
  return norm3(Vec3{a[0] - b[0], a[1] - b[1], a[2] - b[2]});
}

double los_amplitude(const SystemConfig &cfg, double dist_m) {
  const double pl_db = cfg.pl_ref_db + 10.0 * cfg.pl_exponent * std::log10(std::max(dist_m, 1.0));
  return std::pow(10.0, -pl_db / 20.0);
}

// LOS gain with uniform phase, then NLOS Rayleigh gains `nlos_rel_db` below.
void draw_gains(const SystemConfig &cfg, double dist_m, int n_paths, Rng &rng,
                PathSet &out) {
  const double a_los = los_amplitude(cfg, dist_m);
  out.gain.push_back(a_los * rng.unit_phase());
  const double nlos_var = a_los * a_los * std::pow(10.0, cfg.nlos_rel_db / 10.0);
  for (int i = 1; i < n_paths; ++i) {
    out.gain.push_back(rng.complex_normal(nlos_var));
  }
}

void draw_nlos_angles(int n_paths, Rng &rng, PathSet &out) {
  for (int i = 1; i < n_paths; ++i) {
    out.irs_azimuth.push_back(rng.uniform(-kPi / 2.0, kPi / 2.0));
    out.irs_elevation.push_back(rng.uniform(-kPi / 4.0, kPi / 4.0));
    out.ula_angle.push_back(rng.uniform(-kPi / 2.0, kPi / 2.0));
  }
}

} // namespace

PhaseVector::PhaseVector(ComplexVector nu) : nu_(std::move(nu)) {
  if (max_modulus_deviation() > 1e-12) {
    throw std::invalid_argument("PhaseVector entries must have unit modulus");
  }
}

PhaseVector PhaseVector::from_phases(const RealVector &phi) {
  ComplexVector nu(phi.size());
  for (Eigen::Index m = 0; m < phi.size(); ++m) {
    nu(m) = std::polar(1.0, -phi(m));
  }
  return PhaseVector(std::move(nu));
}

PhaseVector PhaseVector::ones(Eigen::Index m) {
  return PhaseVector(ComplexVector::Ones(m));
}

PhaseVector PhaseVector::random(Eigen::Index m, Rng &rng) {
  ComplexVector nu(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    nu(i) = rng.unit_phase();
  }
  return PhaseVector(std::move(nu));
}

ComplexMatrix PhaseVector::reflection() const {
  return nu_.conjugate().asDiagonal();
}

RealVector PhaseVector::phases() const {
  RealVector phi(nu_.size());
  for (Eigen::Index m = 0; m < nu_.size(); ++m) {
    double p = -std::arg(nu_(m));
    if (p < 0.0) {
      p += 2.0 * kPi;
    }
    phi(m) = p;
  }
  return phi;
}

double PhaseVector::max_modulus_deviation() const {
  double dev = 0.0;
  for (Eigen::Index m = 0; m < nu_.size(); ++m) {
    dev = std::max(dev, std::abs(std::abs(nu_(m)) - 1.0));
  }
  return dev;
}

ComplexVector ula_response(double angle, int n, double d_over_lambda) {
  if (n < 1) {
    throw std::invalid_argument("ula_response: n must be >= 1");
  }
  ComplexVector a(n);
  const double k = 2.0 * kPi * d_over_lambda * std::sin(angle);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int i = 0; i < n; ++i) {
    a(i) = std::polar(scale, k * i);
  }
  return a;
}

ComplexVector upa_response(double theta, double eta, int f_y, int f_z, double d_over_lambda) {
  if (f_y < 1 || f_z < 1) {
    throw std::invalid_argument("upa_response: dimensions must be >= 1");
  }
  ComplexVector a(static_cast<Eigen::Index>(f_y) * f_z);
  const double ky = 2.0 * kPi * d_over_lambda * std::cos(eta) * std::sin(theta);
  const double kz = 2.0 * kPi * d_over_lambda * std::sin(eta);
  const double scale = 1.0 / std::sqrt(static_cast<double>(f_y) * f_z);
  for (int f1 = 0; f1 < f_y; ++f1) {
    for (int f2 = 0; f2 < f_z; ++f2) {
      a(static_cast<Eigen::Index>(f1) * f_z + f2) = std::polar(scale, ky * f1 + kz * f2);
    }
  }
  return a;
}

std::pair<double, double> irs_angles_towards(const Vec3 &irs, const Vec3 &target) {
  const Vec3 u = unit_from_to(irs, target);
  const double eta = std::asin(std::clamp(u[2], -1.0, 1.0));
  const double c = std::cos(eta);
  const double s = c > 0.0 ? std::clamp(u[1] / c, -1.0, 1.0) : 0.0;
  return {std::asin(s), eta};
}

double ula_angle_towards(const Vec3 &from, const Vec3 &to) {
  const Vec3 u = unit_from_to(from, to);
  return std::asin(std::clamp(u[0], -1.0, 1.0));
}

ComplexMatrix bs_irs_from_paths(const PathSet &paths, const SystemConfig &cfg) {
  const int m = cfg.n_irs();
  const double y = static_cast<double>(paths.size());
  ComplexMatrix h = ComplexMatrix::Zero(m, cfg.n_bs);
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const ComplexVector a_irs = upa_response(paths.irs_azimuth[i], paths.irs_elevation[i],
                                             cfg.f_y, cfg.f_z, cfg.d_over_lambda);
    const ComplexVector a_bs = ula_response(paths.ula_angle[i], cfg.n_bs, cfg.d_over_lambda);
    h.noalias() += paths.gain[i] * a_irs * a_bs.adjoint();
  }
  return std::sqrt(static_cast<double>(cfg.n_bs) * m / y) * h;
}

ComplexMatrix irs_user_from_paths(const PathSet &paths, const SystemConfig &cfg) {
  const int m = cfg.n_irs();
  const double l = static_cast<double>(paths.size());
  ComplexMatrix h = ComplexMatrix::Zero(cfg.n_ue, m);
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const ComplexVector a_ue = ula_response(paths.ula_angle[i], cfg.n_ue, cfg.d_over_lambda);
    const ComplexVector a_irs = upa_response(paths.irs_azimuth[i], paths.irs_elevation[i],
                                             cfg.f_y, cfg.f_z, cfg.d_over_lambda);
    h.noalias() += paths.gain[i] * a_ue * a_irs.adjoint();
  }
  return std::sqrt(static_cast<double>(m) * cfg.n_ue / l) * h;
}

std::pair<ComplexMatrix, PathSet> gen_bs_irs(const SystemConfig &cfg, Rng &rng) {
  PathSet paths;
  paths.endpoint = cfg.bs_pos;
  const auto [theta, eta] = irs_angles_towards(cfg.irs_pos, cfg.bs_pos);
  paths.irs_azimuth.push_back(theta);
  paths.irs_elevation.push_back(eta);
  paths.ula_angle.push_back(ula_angle_towards(cfg.bs_pos, cfg.irs_pos));
  draw_nlos_angles(cfg.paths_y, rng, paths);
  draw_gains(cfg, distance(cfg.bs_pos, cfg.irs_pos), cfg.paths_y, rng, paths);
  ComplexMatrix h = bs_irs_from_paths(paths, cfg);
  return {std::move(h), std::move(paths)};
}

std::pair<ComplexMatrix, PathSet> gen_irs_user(const SystemConfig &cfg, int user_k, Rng &rng) {
  if (user_k < 0 || user_k >= cfg.k_users) {
    throw std::out_of_range("gen_irs_user: user index out of range");
  }
  // uniform over the disk
  const double r = cfg.user_radius * std::sqrt(rng.uniform());
  const double psi = rng.uniform(0.0, 2.0 * kPi);
  const Vec3 pos{cfg.user_center[0] + r * std::cos(psi), cfg.user_center[1] + r * std::sin(psi),
                 cfg.user_center[2]};

  PathSet paths;
  paths.endpoint = pos;
  const auto [theta, eta] = irs_angles_towards(cfg.irs_pos, pos);
  paths.irs_azimuth.push_back(theta);
  paths.irs_elevation.push_back(eta);
  paths.ula_angle.push_back(ula_angle_towards(pos, cfg.irs_pos));
  draw_nlos_angles(cfg.paths_l, rng, paths);
  draw_gains(cfg, distance(pos, cfg.irs_pos), cfg.paths_l, rng, paths);
  ComplexMatrix h = irs_user_from_paths(paths, cfg);
  return {std::move(h), std::move(paths)};
}

ChannelSet generate_channels(const SystemConfig &cfg, Rng &rng) {
  ChannelSet ch;
  auto [hb, bs_paths] = gen_bs_irs(cfg, rng);
  ch.h_bs_irs = std::move(hb);
  ch.bs_paths = std::move(bs_paths);
  ch.h_irs_ue.reserve(static_cast<std::size_t>(cfg.k_users));
  ch.ue_paths.reserve(static_cast<std::size_t>(cfg.k_users));
  for (int k = 0; k < cfg.k_users; ++k) {
    auto [hr, ue_paths] = gen_irs_user(cfg, k, rng);
    ch.h_irs_ue.push_back(std::move(hr));
    ch.ue_paths.push_back(std::move(ue_paths));
  }
  return ch;
}

ComplexMatrix effective_channel(const ComplexMatrix &h_bs, const ComplexMatrix &h_ue_k,
                                const PhaseVector &nu, double g_tx_dbi, double g_rx_dbi) {
  if (h_ue_k.cols() != nu.size() || h_bs.rows() != nu.size()) {
    throw std::invalid_argument("effective_channel: shape mismatch");
  }
  const double gain = std::pow(10.0, g_tx_dbi / 20.0) * std::pow(10.0, g_rx_dbi / 20.0);
  // H^R diag(conj nu) H^B without forming the M x M diagonal
  return gain * ((h_ue_k * nu.values().conjugate().asDiagonal()) * h_bs);
}

std::vector<ComplexMatrix> effective_channels(const ChannelSet &ch, const PhaseVector &nu,
                                              const SystemConfig &cfg) {
  std::vector<ComplexMatrix> out;
  out.reserve(ch.h_irs_ue.size());
  for (const auto &hr : ch.h_irs_ue) {
    out.push_back(effective_channel(ch.h_bs_irs, hr, nu, cfg.g_tx_dbi, cfg.g_rx_dbi));
  }
  return out;
}

} // namespace irsmc
