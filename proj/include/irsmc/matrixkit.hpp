#pragma once

#include "irsmc/types.hpp"

namespace irsmc::matrixkit {

/// Thin or full singular value decomposition A = U diag(s) V^H.
///
/// Singular values are sorted descending; equal values keep the order the
/// decomposition produced. Each left singular vector is rotated so that its
/// largest-magnitude entry is real and positive, and the matching row of vh
/// is counter-rotated so the product is unchanged.
struct SvdResult {
  ComplexMatrix u;  ///< rows x p (thin, p = min(rows, cols)) or rows x rows (full)
  RealVector s;     ///< min(rows, cols) singular values, descending
  ComplexMatrix vh; ///< p x cols (thin) or cols x cols (full)

  /// U diag(s) V^H, padding diag(s) with zeros for full decompositions.
  ComplexMatrix reconstruct() const;
};

enum class SvdMode { thin, full };

/// Throws std::invalid_argument("empty matrix") for zero-dimension input.
SvdResult svd(const ComplexMatrix &a, SvdMode mode = SvdMode::thin);

/// Default relative rank threshold, 1e-10 * max(rows, cols).
double default_rank_tol(const ComplexMatrix &a);

/// Number of singular values above rel_tol * s_max.
Eigen::Index numerical_rank(const ComplexMatrix &a, double rel_tol);
Eigen::Index numerical_rank(const ComplexMatrix &a);

/// Orthonormal basis of the right null space of a.
///
/// A matrix with zero rows constrains nothing, so the identity of size
/// cols(a) is returned. rel_tol <= 0 selects default_rank_tol(a).
ComplexMatrix nullspace_basis(const ComplexMatrix &a, double rel_tol = 0.0);

/// Moore-Penrose pseudo-inverse; singular values below the default rank
/// threshold are treated as zero.
ComplexMatrix pseudo_inverse(const ComplexMatrix &a);

/// Element-wise product; throws std::invalid_argument on shape mismatch.
ComplexMatrix hadamard(const ComplexMatrix &a, const ComplexMatrix &b);

double frobenius_norm(const ComplexMatrix &a);

/// True when every entry has finite real and imaginary parts.
bool all_finite(const ComplexMatrix &a);

} // namespace irsmc::matrixkit
