#pragma once

#include <cmath>
#include <vector>

#include "irsmc/config.hpp"
#include "irsmc/rng.hpp"
#include "irsmc/types.hpp"

namespace irsmc::test {

inline ComplexMatrix random_matrix(Eigen::Index rows, Eigen::Index cols, Rng &rng) {
  ComplexMatrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      m(i, j) = rng.complex_normal(1.0);
    }
  }
  return m;
}

inline ComplexVector random_vector(Eigen::Index n, Rng &rng) {
  return random_matrix(n, 1, rng).col(0);
}

inline ComplexVector random_unit_modulus(Eigen::Index n, Rng &rng) {
  ComplexVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    v(i) = rng.unit_phase();
  }
  return v;
}

/// Random channels H_k (n_ue x n_bs), one per user.
inline std::vector<ComplexMatrix> random_channels(int k_users, int n_ue, int n_bs, Rng &rng) {
  std::vector<ComplexMatrix> h;
  for (int k = 0; k < k_users; ++k) {
    h.push_back(random_matrix(n_ue, n_bs, rng));
  }
  return h;
}

inline double rel_err(double a, double b) {
  const double d = std::max(std::abs(a), std::abs(b));
  return d > 0.0 ? std::abs(a - b) / d : 0.0;
}

/// Small configuration with one user per group and unit gains.
inline SystemConfig small_config(int groups, int zeta) {
  SystemConfig cfg;
  cfg.n_bs = 8;
  cfg.n_ue = 4;
  cfg.m_bs = std::max(groups * zeta, 2);
  cfg.m_ue = std::max(zeta, 2);
  cfg.k_users = groups;
  cfg.h_groups = groups;
  cfg.group_sizes.assign(static_cast<std::size_t>(groups), 1);
  cfg.zeta = zeta;
  cfg.power_dbm = 30.0;
  cfg.noise_dbm = 0.0;
  cfg.bw_hz = 1.0;
  cfg.g_tx_dbi = 0.0;
  cfg.g_rx_dbi = 0.0;
  return cfg;
}

} // namespace irsmc::test
