#pragma once

#include <vector>

#include "irsmc/rng.hpp"
#include "irsmc/types.hpp"

namespace irsmc::hybridfactor {

/// Column-major stacking of m into a vector of length rows*cols.
ComplexVector vectorize(const ComplexMatrix &m);
/// Inverse of vectorize. Throws std::invalid_argument on length mismatch.
ComplexMatrix devectorize(const ComplexVector &x, Eigen::Index rows, Eigen::Index cols);

/// pinv(f_rf) * b.
ComplexMatrix solve_baseband(const ComplexMatrix &f_rf, const ComplexMatrix &b);

/// Gradient of ||b - f_rf f_bb||_F^2 with respect to conj(f_rf), times 2.
ComplexMatrix rf_gradient(const ComplexMatrix &b, const ComplexMatrix &f_rf,
                          const ComplexMatrix &f_bb);

/// Unit-modulus start: phases of b's first n_rf columns, random phases for
/// zero entries and for columns beyond cols(b).
ComplexMatrix rf_init(const ComplexMatrix &b, int n_rf, Rng &rng);

struct FactorOptions {
  int max_alternations = 100; ///< S_2 cap
  int inner_steps = 20;       ///< Riemannian steps on F^R per alternation
  double rel_tol = 1e-6;      ///< stop on relative residual change below this
  double floor_rel = 1e-13;   ///< stop once ||B - F^R F^B|| / ||B|| falls below this
};

struct FactorResult {
  ComplexMatrix f_rf;
  ComplexMatrix f_bb;
  std::vector<double> residual; ///< ||B - F^R F^B||_F, start point then each alternation
  int iterations = 0;           ///< alternations performed
  double b_norm = 0.0;

  double relative_residual() const;
};

/// Alternating minimization of ||b - F^R F^B||_F^2 over unit-modulus F^R
/// (N x n_rf) and unconstrained F^B. No power scaling is applied.
FactorResult factor(const ComplexMatrix &b, int n_rf, Rng &rng, const FactorOptions &opt = {});

/// F^B scaled so that ||f_rf f_bb||_F^2 = power_w. Throws
/// std::invalid_argument when the product is zero.
ComplexMatrix normalize_power(const ComplexMatrix &f_rf, const ComplexMatrix &f_bb, double power_w);

/// Receive-side factorization of J_k; identical to factor, no normalization.
FactorResult factor_receive(const ComplexMatrix &j_k, int m_ue, Rng &rng,
                            const FactorOptions &opt = {});

} // namespace irsmc::hybridfactor
