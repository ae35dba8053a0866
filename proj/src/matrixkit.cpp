#include "irsmc/matrixkit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/SVD>

namespace irsmc::matrixkit {

namespace {

// Rotate column j so its largest-magnitude entry is real-positive.
// Returns the applied unit phase (1 when the column is zero).
Complex normalize_column_phase(ComplexMatrix &m, Eigen::Index j) {
  Eigen::Index best = 0;
  double best_abs = -1.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double v = std::abs(m(i, j));
    if (v > best_abs) {
      best_abs = v;
      best = i;
    }
  }
  if (best_abs <= 0.0) {
    return {1.0, 0.0};
  }
  const Complex rot = std::conj(m(best, j)) / best_abs;
  m.col(j) *= rot;
  m(best, j) = Complex(std::abs(m(best, j)), 0.0);
  return rot;
}

} // namespace

ComplexMatrix SvdResult::reconstruct() const {
  const Eigen::Index p = s.size();
  return u.leftCols(p) * s.cast<Complex>().asDiagonal() * vh.topRows(p);
}

SvdResult svd(const ComplexMatrix &a, SvdMode mode) {
  if (a.rows() == 0 || a.cols() == 0) {
    throw std::invalid_argument("empty matrix");
  }
  const unsigned opts = mode == SvdMode::full
                            ? (Eigen::ComputeFullU | Eigen::ComputeFullV)
                            : (Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::JacobiSVD<ComplexMatrix> dec(a, opts);

  const Eigen::Index p = dec.singularValues().size();
  // JacobiSVD already sorts, but ties and future backends make an explicit
  // stable sort cheap to keep.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(p));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
    return dec.singularValues()(x) > dec.singularValues()(y);
  });

  const ComplexMatrix &u_raw = dec.matrixU();
  const ComplexMatrix &v_raw = dec.matrixV();
  SvdResult out;
  out.s.resize(p);
  out.u = u_raw;
  ComplexMatrix v = v_raw;
  for (Eigen::Index k = 0; k < p; ++k) {
    out.s(k) = dec.singularValues()(order[static_cast<std::size_t>(k)]);
    out.u.col(k) = u_raw.col(order[static_cast<std::size_t>(k)]);
    v.col(k) = v_raw.col(order[static_cast<std::size_t>(k)]);
  }
  for (Eigen::Index k = 0; k < out.u.cols(); ++k) {
    const Complex rot = normalize_column_phase(out.u, k);
    if (k < p) {
      v.col(k) *= rot;
    }
  }
  // Null-space columns of V have no partner in U; fix their phase too.
  for (Eigen::Index k = p; k < v.cols(); ++k) {
    normalize_column_phase(v, k);
  }
  out.vh = v.adjoint();
  return out;
}

double default_rank_tol(const ComplexMatrix &a) {
  return 1e-10 * static_cast<double>(std::max(a.rows(), a.cols()));
}

Eigen::Index numerical_rank(const ComplexMatrix &a, double rel_tol) {
  if (a.rows() == 0 || a.cols() == 0) {
    return 0;
  }
  Eigen::JacobiSVD<ComplexMatrix> dec(a);
  const RealVector &s = dec.singularValues();
  if (s.size() == 0 || s(0) <= 0.0) {
    return 0;
  }
  const double cut = rel_tol * s(0);
  return static_cast<Eigen::Index>((s.array() > cut).count());
}

Eigen::Index numerical_rank(const ComplexMatrix &a) {
  return numerical_rank(a, default_rank_tol(a));
}

ComplexMatrix nullspace_basis(const ComplexMatrix &a, double rel_tol) {
  const Eigen::Index n = a.cols();
  if (a.rows() == 0) {
    return ComplexMatrix::Identity(n, n);
  }
  if (rel_tol <= 0.0) {
    rel_tol = default_rank_tol(a);
  }
  const SvdResult dec = svd(a, SvdMode::full);
  Eigen::Index rank = 0;
  if (dec.s.size() > 0 && dec.s(0) > 0.0) {
    rank = static_cast<Eigen::Index>((dec.s.array() > rel_tol * dec.s(0)).count());
  }
  return dec.vh.bottomRows(n - rank).adjoint();
}

ComplexMatrix pseudo_inverse(const ComplexMatrix &a) {
  if (a.rows() == 0 || a.cols() == 0) {
    return ComplexMatrix::Zero(a.cols(), a.rows());
  }
  const SvdResult dec = svd(a, SvdMode::thin);
  const double cut = dec.s.size() > 0 ? default_rank_tol(a) * dec.s(0) : 0.0;
  RealVector inv = RealVector::Zero(dec.s.size());
  for (Eigen::Index k = 0; k < dec.s.size(); ++k) {
    if (dec.s(k) > cut && dec.s(k) > 0.0) {
      inv(k) = 1.0 / dec.s(k);
    }
  }
  return dec.vh.adjoint() * inv.cast<Complex>().asDiagonal() * dec.u.adjoint();
}

ComplexMatrix hadamard(const ComplexMatrix &a, const ComplexMatrix &b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("hadamard: shape mismatch");
  }
  return a.cwiseProduct(b);
}

double frobenius_norm(const ComplexMatrix &a) { return a.norm(); }

bool all_finite(const ComplexMatrix &a) { return a.allFinite(); }

} // namespace irsmc::matrixkit
