#include "irsmc/bd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "irsmc/matrixkit.hpp"

namespace irsmc::bd {

namespace mk = irsmc::matrixkit;

namespace {

// Singular values of H_k V0 below this fraction of ||H_k||_2 count as nulled.
double rank_cut(const ComplexMatrix &h) { return 1e-10 * static_cast<double>(std::max(h.rows(), h.cols())); }

UserSvd truncated_svd(const ComplexMatrix &projected, int zeta) {
  const mk::SvdResult dec = mk::svd(projected, mk::SvdMode::thin);
  UserSvd out;
  out.u1 = dec.u.leftCols(zeta);
  out.sigma1 = dec.s.head(zeta);
  out.v1 = dec.vh.topRows(zeta).adjoint();
  return out;
}

double spectral_norm(const ComplexMatrix &h) {
  if (h.size() == 0) {
    return 0.0;
  }
  return mk::svd(h).s(0);
}

void rescale_to_power(ComplexMatrix &b, double power_w) {
  const double n2 = b.squaredNorm();
  if (n2 > 0.0) {
    b *= std::sqrt(power_w / n2);
  }
}

} // namespace

ComplexMatrix stack_other_groups(std::span<const ComplexMatrix> h_eff,
                                 const GroupAssignment &groups, int h, int n_bs) {
  if (h < 0 || h >= groups.num_groups()) {
    throw std::out_of_range("stack_other_groups: group index out of range");
  }
  Eigen::Index rows = 0;
  for (int k = 0; k < static_cast<int>(h_eff.size()); ++k) {
    if (groups.group_of(k) != h) {
      rows += h_eff[static_cast<std::size_t>(k)].rows();
    }
  }
  ComplexMatrix out(rows, n_bs);
  Eigen::Index r = 0;
  for (int k = 0; k < static_cast<int>(h_eff.size()); ++k) {
    if (groups.group_of(k) == h) {
      continue;
    }
    const auto &hk = h_eff[static_cast<std::size_t>(k)];
    if (hk.cols() != n_bs) {
      throw std::invalid_argument("stack_other_groups: channel column count != n_bs");
    }
    out.middleRows(r, hk.rows()) = hk;
    r += hk.rows();
  }
  return out;
}

ComplexMatrix null_projector(const ComplexMatrix &h_tilde, int n_bs) {
  if (h_tilde.cols() != n_bs) {
    throw std::invalid_argument("null_projector: h_tilde must have n_bs columns");
  }
  ComplexMatrix v0 = mk::nullspace_basis(h_tilde);
  if (v0.cols() == 0) {
    throw InfeasibleError("insufficient BS antennas for BD");
  }
  return v0;
}

BdDecomposition decompose(std::span<const ComplexMatrix> h_eff, const GroupAssignment &groups,
                          const SystemConfig &cfg) {
  const int n_groups = groups.num_groups();
  const int zeta = cfg.zeta;
  BdDecomposition out;
  out.zeta = zeta;
  out.stream_power = cfg.power_w() / (static_cast<double>(n_groups) * zeta);
  out.users.resize(h_eff.size());

  for (int h = 0; h < n_groups; ++h) {
    ComplexMatrix ht = stack_other_groups(h_eff, groups, h, cfg.n_bs);
    ComplexMatrix v0 = null_projector(ht, cfg.n_bs);
    if (v0.cols() < zeta) {
      throw InfeasibleError("insufficient BS antennas for BD: null space of group " +
                            std::to_string(h) + " has dimension " + std::to_string(v0.cols()) +
                            " < zeta");
    }
    for (int k : groups.members(h)) {
      const auto &hk = h_eff[static_cast<std::size_t>(k)];
      const ComplexMatrix projected = hk * v0;
      UserSvd usv = truncated_svd(projected, zeta);
      const double cut = rank_cut(hk) * spectral_norm(hk);
      if (usv.sigma1.size() < zeta || !(usv.sigma1(zeta - 1) > cut)) {
        throw InfeasibleError("effective channel of user " + std::to_string(k) +
                              " has rank < zeta after inter-group nulling");
      }
      out.users[static_cast<std::size_t>(k)] = std::move(usv);
    }
    out.h_tilde.push_back(std::move(ht));
    out.null_basis.push_back(std::move(v0));
  }
  return out;
}

BdResult build_beamformers(std::span<const ComplexMatrix> h_eff, const GroupAssignment &groups,
                           const SystemConfig &cfg) {
  BdResult res;
  res.decomposition = decompose(h_eff, groups, cfg);
  const auto &dec = res.decomposition;
  const int n_groups = groups.num_groups();
  const int zeta = dec.zeta;

  ComplexMatrix b(cfg.n_bs, static_cast<Eigen::Index>(n_groups) * zeta);
  for (int h = 0; h < n_groups; ++h) {
    const ComplexMatrix &v0 = dec.null_basis[static_cast<std::size_t>(h)];
    ComplexMatrix v_sum = ComplexMatrix::Zero(v0.cols(), zeta);
    if (cfg.bd_sum == BdSumMode::group_members) {
      for (int k : groups.members(h)) {
        v_sum += dec.users[static_cast<std::size_t>(k)].v1;
      }
    } else {
      for (int i = 0; i < static_cast<int>(h_eff.size()); ++i) {
        if (groups.group_of(i) == h) {
          v_sum += dec.users[static_cast<std::size_t>(i)].v1;
          continue;
        }
        const auto &hi = h_eff[static_cast<std::size_t>(i)];
        const ComplexMatrix projected = hi * v0;
        const double cut = rank_cut(hi) * spectral_norm(hi);
        const mk::SvdResult sv = mk::svd(projected);
        // only singular directions that carry energy exist as V_i^(1)
        for (int c = 0; c < zeta && c < sv.s.size(); ++c) {
          if (sv.s(c) > cut) {
            v_sum.col(c) += sv.vh.row(c).adjoint();
          }
        }
      }
    }
    const double size = static_cast<double>(groups.members(h).size());
    b.middleCols(static_cast<Eigen::Index>(h) * zeta, zeta) =
        v0 * v_sum * (std::sqrt(dec.stream_power) / std::sqrt(size));
  }

  res.pre_scale_power_ratio = b.squaredNorm() / cfg.power_w();
  rescale_to_power(b, cfg.power_w());

  BeamformerSet &bf = res.beamformers;
  bf.mode = BeamformerMode::digital;
  bf.digital_b = std::move(b);
  bf.digital_j.reserve(dec.users.size());
  for (const auto &u : dec.users) {
    bf.digital_j.push_back(u.u1);
  }
  return res;
}

double closed_form_rate(const RealVector &sigma1, int group_size, const SystemConfig &cfg) {
  const double c = cfg.power_w() /
                   (static_cast<double>(group_size) * cfg.h_groups * cfg.zeta * cfg.noise_w());
  // det of a diagonal matrix: sum of log2 of its entries
  double r = 0.0;
  for (Eigen::Index i = 0; i < sigma1.size(); ++i) {
    r += std::log2(1.0 + c * sigma1(i) * sigma1(i));
  }
  return cfg.bw_hz * r;
}

std::vector<double> bd_rate_closed_form(const BdDecomposition &decomp,
                                        const GroupAssignment &groups, const SystemConfig &cfg) {
  std::vector<double> rates(decomp.users.size(), 0.0);
  for (std::size_t k = 0; k < decomp.users.size(); ++k) {
    const int h = groups.group_of(static_cast<int>(k));
    rates[k] = closed_form_rate(decomp.users[k].sigma1,
                                static_cast<int>(groups.members(h).size()), cfg);
  }
  return rates;
}

double bd_objective(std::span<const ComplexMatrix> h_eff, const GroupAssignment &groups,
                    const SystemConfig &cfg) {
  const BdDecomposition dec = decompose(h_eff, groups, cfg);
  const auto rates = bd_rate_closed_form(dec, groups, cfg);
  double total = 0.0;
  for (int h = 0; h < groups.num_groups(); ++h) {
    double m = std::numeric_limits<double>::infinity();
    for (int k : groups.members(h)) {
      m = std::min(m, rates[static_cast<std::size_t>(k)]);
    }
    total += m;
  }
  return total;
}

BeamformerSet build_surrogate_beamformers(std::span<const ComplexMatrix> h_eff,
                                          const GroupAssignment &groups, const SystemConfig &cfg) {
  const int n_groups = groups.num_groups();
  const int zeta = cfg.zeta;
  const double stream_power = cfg.power_w() / (static_cast<double>(n_groups) * zeta);

  BeamformerSet bf;
  bf.mode = BeamformerMode::digital;
  bf.digital_j.resize(h_eff.size());
  ComplexMatrix b(cfg.n_bs, static_cast<Eigen::Index>(n_groups) * zeta);
  for (int h = 0; h < n_groups; ++h) {
    ComplexMatrix v_sum = ComplexMatrix::Zero(cfg.n_bs, zeta);
    for (int k : groups.members(h)) {
      const UserSvd usv = truncated_svd(h_eff[static_cast<std::size_t>(k)], zeta);
      v_sum += usv.v1;
      bf.digital_j[static_cast<std::size_t>(k)] = usv.u1;
    }
    const double size = static_cast<double>(groups.members(h).size());
    b.middleCols(static_cast<Eigen::Index>(h) * zeta, zeta) =
        v_sum * (std::sqrt(stream_power) / std::sqrt(size));
  }
  rescale_to_power(b, cfg.power_w());
  bf.digital_b = std::move(b);
  return bf;
}

} // namespace irsmc::bd
