#pragma once

#include <span>
#include <vector>

#include "irsmc/config.hpp"
#include "irsmc/signalmodel.hpp"
#include "irsmc/types.hpp"

namespace irsmc::bd {

/// Truncated SVD of H_k V0_h: the zeta dominant singular triplets.
struct UserSvd {
  ComplexMatrix u1;  ///< N^U x zeta, becomes J_k
  RealVector sigma1; ///< zeta singular values, descending
  ComplexMatrix v1;  ///< dim(null) x zeta
};

struct BdDecomposition {
  std::vector<ComplexMatrix> h_tilde;    ///< per group, stacked other-group channels
  std::vector<ComplexMatrix> null_basis; ///< per group, V0_h (N^B x (N^B - rank))
  std::vector<UserSvd> users;            ///< per user, against its own group's V0
  int zeta = 0;
  double stream_power = 0.0; ///< p_i = P / (H zeta)
};

/// Vertical stack of H_k for every user outside group h, ascending user index.
/// Zero rows (and n_bs columns) when no other group exists.
ComplexMatrix stack_other_groups(std::span<const ComplexMatrix> h_eff,
                                 const GroupAssignment &groups, int h, int n_bs);

/// Orthonormal basis of null(h_tilde). Throws InfeasibleError("insufficient
/// BS antennas for BD") when h_tilde has full column rank.
ComplexMatrix null_projector(const ComplexMatrix &h_tilde, int n_bs);

/// Null spaces and per-user truncated SVDs. Throws InfeasibleError when a
/// group's null space is narrower than zeta or some H_k V0_h has rank < zeta.
BdDecomposition decompose(std::span<const ComplexMatrix> h_eff, const GroupAssignment &groups,
                          const SystemConfig &cfg);

struct BdResult {
  BeamformerSet beamformers; ///< digital mode, ||B||_F^2 = P
  BdDecomposition decomposition;
  /// ||B||_F^2 / P before the global rescale; 1 when the averaged right
  /// singular bases happen to be orthonormal.
  double pre_scale_power_ratio = 0.0;
};

/// B_h = V0_h (sum V_i^(1)) / sqrt|H_h| * sqrt(P / (H zeta)), J_k = U_k^(1),
/// then B rescaled globally so ||B||_F^2 = P.
///
/// With BdSumMode::all_users every user's V^(1) is taken against group h's
/// null space; users whose H_i V0_h vanishes numerically contribute nothing.
BdResult build_beamformers(std::span<const ComplexMatrix> h_eff, const GroupAssignment &groups,
                           const SystemConfig &cfg);

/// W log2 det(I + P / (|H_h| H zeta sigma^2) Sigma^2) for one user.
double closed_form_rate(const RealVector &sigma1, int group_size, const SystemConfig &cfg);

/// Closed-form rate of every user, indexed by user.
std::vector<double> bd_rate_closed_form(const BdDecomposition &decomp,
                                        const GroupAssignment &groups, const SystemConfig &cfg);

/// sum_h min_{k in H_h} of the closed-form rates.
double bd_objective(std::span<const ComplexMatrix> h_eff, const GroupAssignment &groups,
                    const SystemConfig &cfg);

/// Stand-in for the external no-nulling comparison scheme: each user's
/// dominant zeta right singular vectors of H_k, averaged per group without
/// any inter-group null projection; J_k = dominant left singular vectors.
/// Power is rescaled to ||B||_F^2 = P.
BeamformerSet build_surrogate_beamformers(std::span<const ComplexMatrix> h_eff,
                                          const GroupAssignment &groups, const SystemConfig &cfg);

} // namespace irsmc::bd
