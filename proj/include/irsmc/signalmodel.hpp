#pragma once

#include <span>
#include <vector>

#include "irsmc/channel.hpp"
#include "irsmc/config.hpp"
#include "irsmc/types.hpp"

namespace irsmc {

/// Disjoint, non-empty user groups covering 0..K-1.
class GroupAssignment {
public:
  GroupAssignment() = default;
  /// Throws std::invalid_argument unless the groups partition 0..k_users-1.
  GroupAssignment(std::vector<std::vector<int>> groups, int k_users);
  static GroupAssignment from_config(const SystemConfig &cfg);

  int num_groups() const { return static_cast<int>(groups_.size()); }
  int num_users() const { return static_cast<int>(group_of_.size()); }
  const std::vector<int> &members(int h) const { return groups_.at(static_cast<std::size_t>(h)); }
  int group_of(int k) const { return group_of_.at(static_cast<std::size_t>(k)); }
  const std::vector<std::vector<int>> &groups() const { return groups_; }

private:
  std::vector<std::vector<int>> groups_;
  std::vector<int> group_of_;
};

enum class BeamformerMode { hybrid, digital };

/// Transmit and receive beamformers in either hybrid or fully digital form.
///
/// Group h owns transmit columns h*zeta .. h*zeta+zeta-1 (F^B_h or B_h).
struct BeamformerSet {
  BeamformerMode mode = BeamformerMode::digital;

  ComplexMatrix f_rf;               ///< N^B x M^B
  ComplexMatrix f_bb;               ///< M^B x H zeta
  std::vector<ComplexMatrix> w_rf;  ///< per user, N^U x M^U
  std::vector<ComplexMatrix> w_bb;  ///< per user, M^U x zeta

  ComplexMatrix digital_b;              ///< [B_1 ... B_H], N^B x H zeta
  std::vector<ComplexMatrix> digital_j; ///< per user J_k, N^U x zeta

  /// F^R F^B (hybrid) or B (digital).
  ComplexMatrix transmit() const;
  /// W^R_k W^B_k (hybrid) or J_k (digital); column i combines stream i.
  ComplexMatrix combiner(int k) const;
  int num_users() const;
};

struct StreamSinr {
  double signal = 0.0; ///< |w^H H_k f_{h_i}|^2
  double intra = 0.0;  ///< I_{ik,h}: other streams of the user's own group
  double inter = 0.0;  ///< J_{ik,h}: all streams of other groups
  double sinr = 0.0;   ///< signal / (I + J + sigma^2)
  /// Same SINR with noise sigma^2 * ||w||^2 after combining (diagnostic).
  double sinr_colored = 0.0;
};

struct StreamMetrics {
  int user = 0;
  int group = 0;
  int stream = 0;
  StreamSinr value;
};

struct RateReport {
  std::vector<StreamMetrics> streams;
  std::vector<double> user_rate;  ///< R_{k,h} in bit/s, indexed by user
  std::vector<double> group_rate; ///< min over members, bit/s
  double sum_rate = 0.0;          ///< sum of group rates
  double sum_rate_colored = 0.0;  ///< same with combiner-colored noise
  double noise_w = 0.0;

  /// max over streams of I / signal (0 when every signal is 0 and I is 0).
  double max_intra_ratio() const;
  /// max over streams of J / signal.
  double max_inter_ratio() const;
};

/// SINR of stream `stream` at user `user` in group `group`, by direct summation.
/// Throws std::out_of_range on bad indices.
StreamSinr stream_sinr(const BeamformerSet &bf, std::span<const ComplexMatrix> h_eff,
                       const GroupAssignment &groups, int user, int group, int stream,
                       double noise_w);

/// W * sum_i log2(1 + sinr_i).
double user_rate(std::span<const double> sinrs, double bw_hz);

/// Per-user, per-group and sum rates from raw beamformers and effective channels.
RateReport sum_rate(const BeamformerSet &bf, std::span<const ComplexMatrix> h_eff,
                    const GroupAssignment &groups, double noise_w, double bw_hz);

/// Convenience overload building H_k from the channel set and nu.
RateReport sum_rate(const BeamformerSet &bf, const ChannelSet &ch, const PhaseVector &nu,
                    const GroupAssignment &groups, const SystemConfig &cfg);

struct ConstraintReport {
  double max_rf_modulus_dev = 0.0;  ///< max | |F^R(i,j)| - 1 | over F^R and every W^R_k
  double power_ratio = 0.0;         ///< ||F^R F^B||_F^2 / P, or ||B||_F^2 / P
  double max_phase_modulus_dev = 0.0;

  /// RF moduli within 1e-9, power within 1e-6 relative above P, phases within 1e-9.
  bool ok() const;
};

ConstraintReport check_constraints(const BeamformerSet &bf, const SystemConfig &cfg,
                                   const PhaseVector *nu = nullptr);

} // namespace irsmc
