#include "irsmc/phaseopt.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace irsmc::phaseopt {

namespace {

std::vector<int> order_by_gain(const PathSet &p) {
  std::vector<int> idx(p.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    return std::abs(p.gain[static_cast<std::size_t>(a)]) > std::abs(p.gain[static_cast<std::size_t>(b)]);
  });
  return idx;
}

ComplexVector irs_response(const PathSet &p, int i, const SystemConfig &cfg) {
  const auto s = static_cast<std::size_t>(i);
  return upa_response(p.irs_azimuth[s], p.irs_elevation[s], cfg.f_y, cfg.f_z, cfg.d_over_lambda);
}

// approximate rate of one user in bit/s
double user_rate_of(const UserCoupling &u, const ComplexVector &nu, double bw) {
  double r = 0.0;
  for (std::size_t i = 0; i < u.b.size(); ++i) {
    const double x = std::norm(nu.dot(u.c[i][i]));
    r += std::log2(1.0 + u.b[i] * x);
  }
  return bw * r;
}

} // namespace

ComplexMatrix UserCoupling::outer(int i) const {
  const ComplexVector &v = diag(i);
  return v * v.adjoint();
}

UserCoupling user_coupling(const PathSet &bs_paths, const PathSet &ue_paths,
                           const std::vector<int> &bs_idx, const std::vector<int> &ue_idx,
                           int group, int group_size, const SystemConfig &cfg) {
  if (bs_idx.size() != ue_idx.size()) {
    throw std::invalid_argument("coupling: mismatched path counts for diagonal pairing");
  }
  const double m = cfg.n_irs();
  const double a_scale = cfg.g_tx_amp() * std::sqrt(cfg.n_bs * m / static_cast<double>(bs_paths.size()));
  const double b_scale = cfg.g_rx_amp() * std::sqrt(m * cfg.n_ue / static_cast<double>(ue_paths.size()));
  const double snr = cfg.power_w() /
                     (static_cast<double>(group_size) * cfg.h_groups * cfg.zeta * cfg.noise_w());

  UserCoupling u;
  u.group = group;
  u.ue_path = ue_idx;
  u.bs_path = bs_idx;
  const std::size_t z = ue_idx.size();
  std::vector<ComplexVector> a_dep(z);
  std::vector<ComplexVector> a_arr(z);
  for (std::size_t i = 0; i < z; ++i) {
    const auto ui = static_cast<std::size_t>(ue_idx[i]);
    const auto bi = static_cast<std::size_t>(bs_idx[i]);
    if (ui >= ue_paths.size() || bi >= bs_paths.size()) {
      throw std::invalid_argument("coupling: path index out of range");
    }
    u.beta.push_back(b_scale * ue_paths.gain[ui]);
    u.alpha.push_back(a_scale * bs_paths.gain[bi]);
    u.b.push_back(snr * std::norm(u.alpha.back() * u.beta.back()));
    a_dep[i] = irs_response(ue_paths, ue_idx[i], cfg);
    a_arr[i] = irs_response(bs_paths, bs_idx[i], cfg);
  }
  u.c.assign(z, std::vector<ComplexVector>(z));
  for (std::size_t i = 0; i < z; ++i) {
    for (std::size_t j = 0; j < z; ++j) {
      u.c[i][j] = a_dep[i].conjugate().cwiseProduct(a_arr[j]);
    }
  }
  return u;
}

CouplingSet coupling_vectors(const ChannelSet &ch, const GroupAssignment &groups,
                             const SystemConfig &cfg) {
  const int zeta = cfg.zeta;
  const std::vector<int> bs_order = order_by_gain(ch.bs_paths);
  const int bs_needed = cfg.pairing == PathPairing::group_offset ? groups.num_groups() * zeta : zeta;
  if (bs_needed > static_cast<int>(bs_order.size())) {
    throw std::invalid_argument("coupling: zeta exceeds the available BS->IRS paths");
  }

  CouplingSet cs;
  cs.zeta = zeta;
  cs.m = cfg.n_irs();
  cs.bw_hz = cfg.bw_hz;
  for (int k = 0; k < groups.num_users(); ++k) {
    const PathSet &up = ch.ue_paths.at(static_cast<std::size_t>(k));
    if (zeta > static_cast<int>(up.size())) {
      throw std::invalid_argument("coupling: zeta exceeds the available IRS->user paths");
    }
    const std::vector<int> ue_order = order_by_gain(up);
    const int h = groups.group_of(k);
    const int offset = cfg.pairing == PathPairing::group_offset ? h * zeta : 0;
    std::vector<int> ue_idx(ue_order.begin(), ue_order.begin() + zeta);
    std::vector<int> bs_idx(bs_order.begin() + offset, bs_order.begin() + offset + zeta);
    cs.users.push_back(user_coupling(ch.bs_paths, up, bs_idx, ue_idx, h,
                                     static_cast<int>(groups.members(h).size()), cfg));
  }
  return cs;
}

std::vector<ComplexMatrix> sigma_approx(const CouplingSet &cs, const PhaseVector &nu) {
  if (nu.size() != cs.m) {
    throw std::invalid_argument("sigma_approx: phase vector length mismatch");
  }
  std::vector<ComplexMatrix> out;
  out.reserve(cs.users.size());
  for (const auto &u : cs.users) {
    const auto z = static_cast<Eigen::Index>(u.b.size());
    ComplexMatrix d(z, z);
    for (Eigen::Index i = 0; i < z; ++i) {
      for (Eigen::Index j = 0; j < z; ++j) {
        const auto si = static_cast<std::size_t>(i);
        const auto sj = static_cast<std::size_t>(j);
        d(i, j) = u.beta[si] * u.alpha[sj] * nu.values().dot(u.c[si][sj]);
      }
    }
    out.push_back(std::move(d));
  }
  return out;
}

std::vector<double> approx_user_rates(const CouplingSet &cs, const ComplexVector &nu) {
  std::vector<double> r;
  r.reserve(cs.users.size());
  for (const auto &u : cs.users) {
    r.push_back(user_rate_of(u, nu, cs.bw_hz));
  }
  return r;
}

int bottleneck_user(const GroupAssignment &groups, const std::vector<double> &rates, int h) {
  int best = -1;
  for (int k : groups.members(h)) {
    if (best < 0 || rates[static_cast<std::size_t>(k)] < rates[static_cast<std::size_t>(best)] ||
        (rates[static_cast<std::size_t>(k)] == rates[static_cast<std::size_t>(best)] && k < best)) {
      best = k;
    }
  }
  return best;
}

double objective_f(const CouplingSet &cs, const ComplexVector &nu, const GroupAssignment &groups) {
  const auto rates = approx_user_rates(cs, nu);
  double f = 0.0;
  for (int h = 0; h < groups.num_groups(); ++h) {
    f -= rates[static_cast<std::size_t>(bottleneck_user(groups, rates, h))];
  }
  return f;
}

ComplexVector euclidean_grad(const CouplingSet &cs, const ComplexVector &nu,
                             const GroupAssignment &groups) {
  const auto rates = approx_user_rates(cs, nu);
  ComplexVector g = ComplexVector::Zero(nu.size());
  const double k = cs.bw_hz / std::numbers::ln2;
  for (int h = 0; h < groups.num_groups(); ++h) {
    const auto &u = cs.users[static_cast<std::size_t>(bottleneck_user(groups, rates, h))];
    for (std::size_t i = 0; i < u.b.size(); ++i) {
      const ComplexVector &c = u.c[i][i];
      const Complex proj = c.dot(nu); // c^H nu
      const double x = std::norm(proj);
      g -= (k * 2.0 * u.b[i] / (1.0 + u.b[i] * x)) * (c * proj);
    }
  }
  return g;
}

ComplexVector tangent_project(const ComplexVector &g, const ComplexVector &nu) {
  if (g.size() != nu.size()) {
    throw std::invalid_argument("tangent_project: length mismatch");
  }
  const Eigen::ArrayXd radial = (g.array() * nu.array().conjugate()).real();
  return (g.array() - radial.cast<Complex>() * nu.array()).matrix();
}

ComplexVector retract_raw(const ComplexVector &x) {
  ComplexVector out(x.size());
  for (Eigen::Index m = 0; m < x.size(); ++m) {
    const double a = std::abs(x(m));
    if (!(a >= 1e-300)) {
      throw std::domain_error("retraction singularity");
    }
    out(m) = x(m) / a;
  }
  return out;
}

PhaseVector retract(const ComplexVector &x) { return PhaseVector(retract_raw(x)); }

PhaseOptResult optimize_phases(const CouplingSet &cs, const GroupAssignment &groups,
                               const PhaseVector &nu0, const ArmijoOptions &opt) {
  if (nu0.size() != cs.m) {
    throw std::invalid_argument("optimize_phases: phase vector length mismatch");
  }
  ComplexVector nu = nu0.values();
  double f = objective_f(cs, nu, groups);
  // descent runs on f / |f(nu0)|, so a unit step means the same thing at any SNR
  const double w = std::abs(f) > 0.0 ? std::abs(f) : 1.0;
  ComplexVector rg = tangent_project(euclidean_grad(cs, nu, groups) / w, nu);

  PhaseOptResult res;
  res.trace.push_back({0, f, 0.0, rg.norm(), 0});

  for (int it = 1; it <= opt.max_iters; ++it) {
    const double gg = rg.squaredNorm();
    if (!(gg > 1e-28)) {
      res.converged = true;
      break;
    }
    double step = opt.initial_step;
    bool accepted = false;
    int bt = 0;
    ComplexVector cand;
    double f_cand = 0.0;
    for (; bt <= opt.max_backtracks; ++bt) {
      cand = retract_raw(nu - step * rg);
      f_cand = objective_f(cs, cand, groups);
      if (f_cand / w <= f / w - opt.c1 * step * gg) {
        accepted = true;
        break;
      }
      step *= opt.shrink;
    }
    if (!accepted) {
      res.converged = true;
      break;
    }
    const double rel = std::abs(f_cand - f) / std::max(std::abs(f), 1e-300);
    nu = std::move(cand);
    f = f_cand;
    rg = tangent_project(euclidean_grad(cs, nu, groups) / w, nu);
    res.iterations = it;
    res.trace.push_back({it, f, step, rg.norm(), bt});
    if (rel < opt.rel_tol) {
      res.converged = true;
      break;
    }
  }
  res.nu = PhaseVector(std::move(nu));
  res.f_value = f;
  return res;
}

OffdiagReport offdiag_diagnostic(const CouplingSet &cs, const PhaseVector &nu, double tau) {
  OffdiagReport rep;
  for (const auto &u : cs.users) {
    for (std::size_t i = 0; i < u.c.size(); ++i) {
      for (std::size_t j = 0; j < u.c.size(); ++j) {
        const double v = std::abs(nu.values().dot(u.c[i][j]));
        if (i == j) {
          rep.max_diag = std::max(rep.max_diag, v);
          continue;
        }
        rep.max_offdiag = std::max(rep.max_offdiag, v);
        ++rep.checked;
        if (v > tau) {
          ++rep.violations;
        }
      }
    }
  }
  return rep;
}

void write_trace_csv(std::ostream &os, const std::vector<TraceEntry> &trace, bool header) {
  if (header) {
    os << "iter,f_value,step_size,grad_norm,backtracks\n";
  }
  const auto old_prec = os.precision(17);
  for (const auto &t : trace) {
    os << t.iter << ',' << t.f_value << ',' << t.step_size << ',' << t.grad_norm << ','
       << t.backtracks << '\n';
  }
  os.precision(old_prec);
}

} // namespace irsmc::phaseopt
