#include "irsmc/hybridfactor.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

#include "irsmc/matrixkit.hpp"
#include "irsmc/phaseopt.hpp"

namespace irsmc::hybridfactor {

namespace mk = irsmc::matrixkit;

ComplexVector vectorize(const ComplexMatrix &m) {
  return Eigen::Map<const ComplexVector>(m.data(), m.size());
}

ComplexMatrix devectorize(const ComplexVector &x, Eigen::Index rows, Eigen::Index cols) {
  if (rows < 0 || cols < 0 || x.size() != rows * cols) {
    throw std::invalid_argument("devectorize: length does not match rows * cols");
  }
  return Eigen::Map<const ComplexMatrix>(x.data(), rows, cols);
}

ComplexMatrix solve_baseband(const ComplexMatrix &f_rf, const ComplexMatrix &b) {
  if (f_rf.rows() != b.rows()) {
    throw std::invalid_argument("solve_baseband: row mismatch");
  }
  return mk::pseudo_inverse(f_rf) * b;
}

ComplexMatrix rf_gradient(const ComplexMatrix &b, const ComplexMatrix &f_rf,
                          const ComplexMatrix &f_bb) {
  return -2.0 * (b - f_rf * f_bb) * f_bb.adjoint();
}

ComplexMatrix rf_init(const ComplexMatrix &b, int n_rf, Rng &rng) {
  if (n_rf < 1) {
    throw std::invalid_argument("rf_init: n_rf must be >= 1");
  }
  ComplexMatrix f(b.rows(), n_rf);
  for (Eigen::Index c = 0; c < n_rf; ++c) {
    for (Eigen::Index r = 0; r < b.rows(); ++r) {
      if (c < b.cols() && std::abs(b(r, c)) > 0.0) {
        f(r, c) = b(r, c) / std::abs(b(r, c));
      } else {
        f(r, c) = rng.unit_phase();
      }
    }
  }
  return f;
}

double FactorResult::relative_residual() const {
  if (residual.empty()) {
    return 0.0;
  }
  return b_norm > 0.0 ? residual.back() / b_norm : residual.back();
}

namespace {

// Limited-memory curvature pairs carried across alternations. Pairs are
// stored as tangent vectors and re-projected onto the current tangent space
// before use.
struct DescentState {
  std::deque<ComplexVector> s;
  std::deque<ComplexVector> y;
};

constexpr std::size_t kMemory = 10;

double real_dot(const ComplexVector &a, const ComplexVector &b) { return a.dot(b).real(); }

// Least-squares baseband by pivoted QR; cheaper than the SVD pseudo-inverse
// inside the line search and equal to it whenever F^R has full column rank.
ComplexMatrix ls_baseband(const ComplexMatrix &f_rf, const ComplexMatrix &b) {
  return f_rf.colPivHouseholderQr().solve(b);
}

double projected_cost(const ComplexMatrix &b, const ComplexMatrix &f_rf) {
  return (b - f_rf * ls_baseband(f_rf, b)).squaredNorm();
}

ComplexVector projected_gradient(const ComplexMatrix &b, const ComplexMatrix &f_rf,
                                 const ComplexMatrix &f_bb) {
  return phaseopt::tangent_project(vectorize(rf_gradient(b, f_rf, f_bb)), vectorize(f_rf));
}

// Right preconditioner (F^B F^B^H + eps I)^-1, the inverse of the cost's
// Hessian block for fixed F^B, regularized relative to its largest eigenvalue.
struct Preconditioner {
  ComplexMatrix inv;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;

  ComplexVector apply(const ComplexVector &v, const ComplexVector &x) const {
    const ComplexMatrix m = devectorize(v, rows, cols) * inv;
    return phaseopt::tangent_project(vectorize(m), x);
  }
};

constexpr double kPrecondEps = 0.1;

Preconditioner make_preconditioner(const ComplexMatrix &f_bb, Eigen::Index rows) {
  Preconditioner p;
  p.rows = rows;
  p.cols = f_bb.rows();
  const ComplexMatrix gram = f_bb * f_bb.adjoint();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(gram);
  const double lmax = std::max(es.eigenvalues().maxCoeff(), 1e-300);
  const RealVector d = (es.eigenvalues().array().max(0.0) + kPrecondEps * lmax).inverse();
  p.inv = es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
  return p;
}

// Two-loop recursion: approximate inverse Hessian applied to -g, with the
// preconditioner as the initial inverse Hessian.
ComplexVector lbfgs_direction(const ComplexVector &g, const ComplexVector &x, const DescentState &st,
                              const Preconditioner &pre) {
  const std::size_t n = st.s.size();
  if (n == 0) {
    return -pre.apply(g, x);
  }
  std::vector<ComplexVector> s(n);
  std::vector<ComplexVector> y(n);
  std::vector<double> rho(n);
  std::vector<double> a(n);
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = phaseopt::tangent_project(st.s[i], x);
    y[i] = phaseopt::tangent_project(st.y[i], x);
    const double sy = real_dot(s[i], y[i]);
    rho[i] = sy > 0.0 ? 1.0 / sy : 0.0;
  }
  ComplexVector q = g;
  for (std::size_t i = n; i-- > 0;) {
    a[i] = rho[i] * real_dot(s[i], q);
    q -= a[i] * y[i];
  }
  q = pre.apply(q, x);
  for (std::size_t i = 0; i < n; ++i) {
    const double bcoef = rho[i] * real_dot(y[i], q);
    q += (a[i] - bcoef) * s[i];
  }
  return -q;
}

// Preconditioned Riemannian L-BFGS steps on F^R for the cost with F^B
// eliminated, ||B - F^R pinv(F^R) B||_F^2, whose gradient equals rf_gradient
// at the least-squares F^B. Armijo backtracking from a unit step keeps every
// step a descent.
ComplexMatrix descend_rf(const ComplexMatrix &b, ComplexMatrix f_rf, int steps, DescentState &st) {
  const Eigen::Index rows = f_rf.rows();
  const Eigen::Index cols = f_rf.cols();
  double obj = projected_cost(b, f_rf);
  ComplexMatrix f_bb = ls_baseband(f_rf, b);
  ComplexVector rg = projected_gradient(b, f_rf, f_bb);
  for (int k = 0; k < steps; ++k) {
    if (!(f_bb.squaredNorm() > 0.0) || !(rg.squaredNorm() > 1e-300)) {
      break;
    }
    const ComplexVector x = vectorize(f_rf);
    const Preconditioner pre = make_preconditioner(f_bb, rows);
    ComplexVector dir = lbfgs_direction(rg, x, st, pre);
    double slope = real_dot(dir, rg);
    if (!(slope < 0.0)) {
      st = DescentState{};
      dir = -pre.apply(rg, x);
      slope = real_dot(dir, rg);
    }
    double step = 1.0;
    bool accepted = false;
    ComplexMatrix cand;
    for (int bt = 0; bt <= 30; ++bt) {
      cand = devectorize(phaseopt::retract_raw(x + step * dir), rows, cols);
      const double c_obj = projected_cost(b, cand);
      if (c_obj <= obj + 1e-4 * step * slope) {
        obj = c_obj;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      st = DescentState{};
      break;
    }
    f_rf = std::move(cand);
    f_bb = ls_baseband(f_rf, b);
    const ComplexVector x_new = vectorize(f_rf);
    const ComplexVector rg_new = projected_gradient(b, f_rf, f_bb);
    ComplexVector s_vec = phaseopt::tangent_project(step * dir, x_new);
    ComplexVector y_vec = rg_new - phaseopt::tangent_project(rg, x_new);
    if (real_dot(s_vec, y_vec) > 1e-12 * s_vec.norm() * y_vec.norm()) {
      st.s.push_back(std::move(s_vec));
      st.y.push_back(std::move(y_vec));
      if (st.s.size() > kMemory) {
        st.s.pop_front();
        st.y.pop_front();
      }
    }
    rg = rg_new;
  }
  return f_rf;
}

} // namespace

FactorResult factor(const ComplexMatrix &b, int n_rf, Rng &rng, const FactorOptions &opt) {
  if (b.size() == 0) {
    throw std::invalid_argument("factor: empty matrix");
  }
  FactorResult res;
  res.b_norm = b.norm();
  res.f_rf = rf_init(b, n_rf, rng);
  res.f_bb = solve_baseband(res.f_rf, b);
  res.residual.push_back((b - res.f_rf * res.f_bb).norm());

  DescentState state;
  for (int it = 0; it < opt.max_alternations; ++it) {
    const double prev = res.residual.back();
    if (prev <= opt.floor_rel * res.b_norm) {
      break;
    }
    ComplexMatrix f_rf = descend_rf(b, res.f_rf, opt.inner_steps, state);
    ComplexMatrix f_bb = solve_baseband(f_rf, b);
    const double cur = (b - f_rf * f_bb).norm();
    if (cur > prev) {
      // rounding in the pseudo-inverse can undo a negligible gain; keep the best pair
      break;
    }
    res.f_rf = std::move(f_rf);
    res.f_bb = std::move(f_bb);
    res.residual.push_back(cur);
    res.iterations = it + 1;
    if (prev - cur <= opt.rel_tol * prev) {
      break;
    }
  }
  return res;
}

ComplexMatrix normalize_power(const ComplexMatrix &f_rf, const ComplexMatrix &f_bb, double power_w) {
  const double n = (f_rf * f_bb).norm();
  if (!(n > 0.0)) {
    throw std::invalid_argument("normalize_power: zero beamformer product");
  }
  return f_bb * (std::sqrt(power_w) / n);
}

FactorResult factor_receive(const ComplexMatrix &j_k, int m_ue, Rng &rng, const FactorOptions &opt) {
  return factor(j_k, m_ue, rng, opt);
}

} // namespace irsmc::hybridfactor
