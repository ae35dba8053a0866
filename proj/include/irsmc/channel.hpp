#pragma once

#include <vector>

#include "irsmc/config.hpp"
#include "irsmc/rng.hpp"
#include "irsmc/types.hpp"

namespace irsmc {

/// IRS phase variable: unit-modulus vector whose m-th entry is e^{-j phi_m}.
/// The reflection matrix applied to the signal is diag(conj(nu)).
class PhaseVector {
public:
  PhaseVector() = default;
  /// Throws std::invalid_argument if any | |nu_m| - 1 | > 1e-12.
  explicit PhaseVector(ComplexVector nu);

  /// nu_m = e^{-j phi_m}.
  static PhaseVector from_phases(const RealVector &phi);
  static PhaseVector ones(Eigen::Index m);
  static PhaseVector random(Eigen::Index m, Rng &rng);

  const ComplexVector &values() const { return nu_; }
  Eigen::Index size() const { return nu_.size(); }
  /// Phi = diag(conj(nu)), so Phi(m, m) = e^{j phi_m}.
  ComplexMatrix reflection() const;
  /// Phase shifts phi_m wrapped to [0, 2 pi).
  RealVector phases() const;
  double max_modulus_deviation() const;

private:
  ComplexVector nu_;
};

/// Propagation paths of one link, index-aligned.
///
/// For the BS->IRS link the IRS angles are arrival angles (theta^A, eta^A)
/// and `ula_angle` is the BS departure angle r^D. For IRS->user k the IRS
/// angles are departure angles (theta^D, eta^D) and `ula_angle` is the user
/// arrival angle r^A_{i,k}. Path 0 is the geometric line-of-sight path.
struct PathSet {
  std::vector<Complex> gain;
  std::vector<double> irs_azimuth;
  std::vector<double> irs_elevation;
  std::vector<double> ula_angle;
  Vec3 endpoint{}; ///< BS position, or the sampled user position

  std::size_t size() const { return gain.size(); }
};

struct ChannelSet {
  ComplexMatrix h_bs_irs;              ///< H^B, M x N^B
  std::vector<ComplexMatrix> h_irs_ue; ///< H^R_k, N^U x M
  PathSet bs_paths;
  std::vector<PathSet> ue_paths;
};

/// ULA response (1/sqrt n) exp(j 2 pi d/lambda (n'-1) sin r).
ComplexVector ula_response(double angle, int n, double d_over_lambda = 0.5);

/// UPA response; entry index f1 * f_z + f2 (vertical index fastest).
ComplexVector upa_response(double theta, double eta, int f_y, int f_z,
                           double d_over_lambda = 0.5);

/// IRS angles (azimuth, elevation) of the direction irs -> target. The IRS
/// lies in the y-z plane: horizontal axis y, vertical axis z.
std::pair<double, double> irs_angles_towards(const Vec3 &irs, const Vec3 &target);
/// Angle of the direction from -> to relative to a ULA laid along x.
double ula_angle_towards(const Vec3 &from, const Vec3 &to);

/// H^B = sqrt(N^B M / Y) sum_i alpha_i a(theta_i^A, eta_i^A) a(r_i^D)^H.
ComplexMatrix bs_irs_from_paths(const PathSet &paths, const SystemConfig &cfg);
/// H^R_k = sqrt(M N^U / L) sum_i beta_i a(r_{i,k}^A) a(theta_i^D, eta_i^D)^H.
ComplexMatrix irs_user_from_paths(const PathSet &paths, const SystemConfig &cfg);

std::pair<ComplexMatrix, PathSet> gen_bs_irs(const SystemConfig &cfg, Rng &rng);
/// Samples user k's position in the user disk, then its IRS->user paths.
std::pair<ComplexMatrix, PathSet> gen_irs_user(const SystemConfig &cfg, int user_k, Rng &rng);

/// BS->IRS channel followed by every user's channel, all from one stream.
ChannelSet generate_channels(const SystemConfig &cfg, Rng &rng);

/// H_k = G_t G_r H^R_k Phi H^B with dBi gains applied as 10^(dBi/20).
ComplexMatrix effective_channel(const ComplexMatrix &h_bs, const ComplexMatrix &h_ue_k,
                                const PhaseVector &nu, double g_tx_dbi, double g_rx_dbi);

std::vector<ComplexMatrix> effective_channels(const ChannelSet &ch, const PhaseVector &nu,
                                              const SystemConfig &cfg);

} // namespace irsmc
