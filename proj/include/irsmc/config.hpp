#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "irsmc/types.hpp"

namespace irsmc {

using Vec3 = std::array<double, 3>;

/// How Theorem-1 coupling pairs IRS->user path i with a BS->IRS path.
enum class PathPairing {
  gain_sorted,  ///< i-th strongest user path with i-th strongest BS path
  group_offset, ///< group h stream i with BS path (h-1)*zeta + i (gain-sorted)
};

/// How the per-group right singular bases are summed into B_h.
enum class BdSumMode {
  group_members, ///< only users of group h
  all_users,     ///< every user, each SVD taken against group h's null space
};

enum class PhaseInit { random, ones };

/// Scenario scalars. Defaults are the desk-scale configuration.
struct SystemConfig {
  int n_bs = 16;    ///< BS antennas N^B
  int n_ue = 16;    ///< user antennas N^U
  int m_bs = 8;     ///< BS RF chains M^B
  int m_ue = 4;     ///< user RF chains M^U
  int f_y = 8;      ///< IRS horizontal elements
  int f_z = 8;      ///< IRS vertical elements
  int k_users = 4;  ///< K
  int h_groups = 2; ///< H
  std::vector<int> group_sizes{2, 2};
  int zeta = 2; ///< streams per group

  double power_dbm = 40.0;
  double noise_dbm = -90.0;
  double bw_hz = 251.1886e6;
  double g_tx_dbi = 24.5;
  double g_rx_dbi = 0.0;

  int paths_y = 12; ///< BS->IRS paths Y
  int paths_l = 4;  ///< IRS->user paths L

  Vec3 bs_pos{2.0, 0.0, 10.0};
  Vec3 irs_pos{0.0, 148.0, 10.0};
  Vec3 user_center{7.0, 148.0, 1.8};
  double user_radius = 10.0;

  std::uint64_t seed = 1;

  // Channel-gain model. Not taken from the system description; a
  // free-space LOS + weaker Rayleigh NLOS substitute.
  double d_over_lambda = 0.5;
  double pl_ref_db = 61.4;     ///< path loss at 1 m (28 GHz free space)
  double pl_exponent = 2.0;    ///< PL = pl_ref_db + 10*exp*log10(d)
  double nlos_rel_db = -10.0;  ///< NLOS average power relative to LOS

  PathPairing pairing = PathPairing::group_offset;
  BdSumMode bd_sum = BdSumMode::group_members;
  PhaseInit nu_init = PhaseInit::random;

  int n_irs() const { return f_y * f_z; }

  /// Throws ConfigError describing the first violated invariant.
  void validate() const;

  /// Contiguous groups in user-index order built from group_sizes.
  std::vector<std::vector<int>> groups() const;

  double power_w() const;
  double noise_w() const;
  /// Linear amplitude factors 10^(dBi/20).
  double g_tx_amp() const;
  double g_rx_amp() const;
};

/// dBm -> watts.
double dbm_to_w(double dbm);

/// Parses a SystemConfig. Unknown keys are rejected with ConfigError unless
/// they appear in `extra_allowed`.
SystemConfig parse_system_config(const nlohmann::json &j,
                                 const std::vector<std::string> &extra_allowed = {});

nlohmann::json to_json(const SystemConfig &cfg);

/// Keys accepted by parse_system_config.
const std::vector<std::string> &system_config_keys();

} // namespace irsmc
