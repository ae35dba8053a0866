#pragma once

#include <ostream>
#include <vector>

#include "irsmc/channel.hpp"
#include "irsmc/config.hpp"
#include "irsmc/signalmodel.hpp"
#include "irsmc/types.hpp"

namespace irsmc::phaseopt {

/// One user's coupling data for the diagonal approximation of Sigma_k^(1).
///
/// Path indices refer to the original (unsorted) PathSet order. `c(i, j)`
/// holds c^{ij} = conj(a_D(ue_path[i])) o a_A(bs_path[j]).
struct UserCoupling {
  int group = 0;
  std::vector<int> ue_path; ///< zeta IRS->user path indices
  std::vector<int> bs_path; ///< zeta BS->IRS path indices
  std::vector<Complex> beta;  ///< effective IRS->user gains, per stream
  std::vector<Complex> alpha; ///< effective BS->IRS gains, per stream
  std::vector<double> b;      ///< P/(|H_h| H zeta sigma^2) |alpha_i beta_i|^2
  std::vector<std::vector<ComplexVector>> c; ///< c[i][j], length M each

  const ComplexVector &diag(int i) const { return c[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)]; }
  /// C^{ii} = c^{ii} (c^{ii})^H.
  ComplexMatrix outer(int i) const;
};

struct CouplingSet {
  std::vector<UserCoupling> users;
  int zeta = 0;
  Eigen::Index m = 0; ///< IRS elements
  double bw_hz = 0.0;
};

/// Coupling vectors, effective gains and SNR scalars b_i for every user.
///
/// Effective gains fold the array and antenna scalars into the path gains:
/// alpha~ = G_t sqrt(N^B M / Y) alpha, beta~ = G_r sqrt(M N^U / L) beta.
/// Throws std::invalid_argument when zeta exceeds the paths available for
/// the chosen pairing.
CouplingSet coupling_vectors(const ChannelSet &ch, const GroupAssignment &groups,
                             const SystemConfig &cfg);

/// Builds one user's coupling from explicit path sets and pairing indices.
UserCoupling user_coupling(const PathSet &bs_paths, const PathSet &ue_paths,
                           const std::vector<int> &bs_idx, const std::vector<int> &ue_idx,
                           int group, int group_size, const SystemConfig &cfg);

/// D_k(i, j) = beta~_i alpha~_j nu^H c^{ij}, a zeta x zeta matrix per user.
std::vector<ComplexMatrix> sigma_approx(const CouplingSet &cs, const PhaseVector &nu);

/// W sum_i log2(1 + b_i |nu^H c^{ii}|^2) for each user.
std::vector<double> approx_user_rates(const CouplingSet &cs, const ComplexVector &nu);

/// Lowest-index member of group h with the smallest approximate rate.
int bottleneck_user(const GroupAssignment &groups, const std::vector<double> &rates, int h);

/// f(nu) = -sum_h min_{k in H_h} W sum_i log2(1 + b_i |nu^H c^{ii}|^2).
double objective_f(const CouplingSet &cs, const ComplexVector &nu, const GroupAssignment &groups);

/// Gradient with respect to conj(nu) (times 2) of objective_f, taken through
/// each group's bottleneck user.
ComplexVector euclidean_grad(const CouplingSet &cs, const ComplexVector &nu,
                             const GroupAssignment &groups);

/// g - Re{g o conj(nu)} o nu.
ComplexVector tangent_project(const ComplexVector &g, const ComplexVector &nu);

/// Element-wise normalization. Throws std::domain_error("retraction
/// singularity") when some |x_m| < 1e-300.
PhaseVector retract(const ComplexVector &x);
/// Same normalization without the PhaseVector wrapper.
ComplexVector retract_raw(const ComplexVector &x);

struct TraceEntry {
  int iter = 0;
  double f_value = 0.0;   ///< minimized objective (negated approximate rate), bit/s
  double step_size = 0.0; ///< accepted step on the objective scaled by 1 / |f(nu0)|
  double grad_norm = 0.0; ///< Riemannian gradient norm at the iterate
  int backtracks = 0;
};

struct ArmijoOptions {
  double initial_step = 1.0;
  double shrink = 0.5;
  double c1 = 1e-4;
  int max_backtracks = 30;
  double rel_tol = 1e-6;
  int max_iters = 500;
};

struct PhaseOptResult {
  PhaseVector nu;
  double f_value = 0.0;
  int iterations = 0; ///< accepted steps, S_1
  bool converged = false;
  std::vector<TraceEntry> trace; ///< entry 0 is the start point
};

/// Riemannian steepest descent with Armijo backtracking on f / |f(nu0)|
/// (f itself when f(nu0) = 0). Always returns the last accepted iterate.
PhaseOptResult optimize_phases(const CouplingSet &cs, const GroupAssignment &groups,
                               const PhaseVector &nu0, const ArmijoOptions &opt = {});

struct OffdiagReport {
  double max_offdiag = 0.0;
  double max_diag = 0.0;
  int violations = 0; ///< off-diagonal |nu^H c^{ij}| above tau
  int checked = 0;
};

/// Off-diagonal coupling magnitudes; informational only.
OffdiagReport offdiag_diagnostic(const CouplingSet &cs, const PhaseVector &nu,
                                 double tau = 0.1);

/// iter,f_value,step_size,grad_norm,backtracks
void write_trace_csv(std::ostream &os, const std::vector<TraceEntry> &trace,
                     bool header = true);

} // namespace irsmc::phaseopt
