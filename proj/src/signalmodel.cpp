#include "irsmc/signalmodel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace irsmc {

GroupAssignment::GroupAssignment(std::vector<std::vector<int>> groups, int k_users)
    : groups_(std::move(groups)), group_of_(static_cast<std::size_t>(std::max(k_users, 0)), -1) {
  if (groups_.empty()) {
    throw std::invalid_argument("GroupAssignment: no groups");
  }
  for (std::size_t h = 0; h < groups_.size(); ++h) {
    if (groups_[h].empty()) {
      throw std::invalid_argument("GroupAssignment: empty group");
    }
    for (int k : groups_[h]) {
      if (k < 0 || k >= k_users) {
        throw std::invalid_argument("GroupAssignment: user index out of range");
      }
      if (group_of_[static_cast<std::size_t>(k)] != -1) {
        throw std::invalid_argument("GroupAssignment: groups are not disjoint");
      }
      group_of_[static_cast<std::size_t>(k)] = static_cast<int>(h);
    }
  }
  if (std::find(group_of_.begin(), group_of_.end(), -1) != group_of_.end()) {
    throw std::invalid_argument("GroupAssignment: some user belongs to no group");
  }
}

GroupAssignment GroupAssignment::from_config(const SystemConfig &cfg) {
  return GroupAssignment(cfg.groups(), cfg.k_users);
}

ComplexMatrix BeamformerSet::transmit() const {
  return mode == BeamformerMode::hybrid ? ComplexMatrix(f_rf * f_bb) : digital_b;
}

ComplexMatrix BeamformerSet::combiner(int k) const {
  const auto idx = static_cast<std::size_t>(k);
  if (mode == BeamformerMode::hybrid) {
    return w_rf.at(idx) * w_bb.at(idx);
  }
  return digital_j.at(idx);
}

int BeamformerSet::num_users() const {
  return static_cast<int>(mode == BeamformerMode::hybrid ? w_rf.size() : digital_j.size());
}

namespace {

double ratio(double num, double den) {
  if (num <= 0.0) {
    return 0.0;
  }
  return den > 0.0 ? num / den : std::numeric_limits<double>::infinity();
}

StreamSinr sinr_from_row(const Eigen::RowVectorXcd &g, int group, int stream, int zeta,
                         double noise_w, double combiner_norm2) {
  StreamSinr out;
  const int own = group * zeta + stream;
  for (Eigen::Index c = 0; c < g.size(); ++c) {
    const double p = std::norm(g(c));
    if (c == own) {
      out.signal = p;
    } else if (c / zeta == group) {
      out.intra += p;
    } else {
      out.inter += p;
    }
  }
  out.sinr = out.signal / (out.intra + out.inter + noise_w);
  out.sinr_colored = out.signal / (out.intra + out.inter + noise_w * combiner_norm2);
  return out;
}

int streams_per_group(const ComplexMatrix &t, const GroupAssignment &groups) {
  const int h = groups.num_groups();
  if (t.cols() % h != 0) {
    throw std::invalid_argument("transmit beamformer columns must be H * zeta");
  }
  return static_cast<int>(t.cols() / h);
}

} // namespace

double RateReport::max_intra_ratio() const {
  double r = 0.0;
  for (const auto &s : streams) {
    r = std::max(r, ratio(s.value.intra, s.value.signal));
  }
  return r;
}

double RateReport::max_inter_ratio() const {
  double r = 0.0;
  for (const auto &s : streams) {
    r = std::max(r, ratio(s.value.inter, s.value.signal));
  }
  return r;
}

StreamSinr stream_sinr(const BeamformerSet &bf, std::span<const ComplexMatrix> h_eff,
                       const GroupAssignment &groups, int user, int group, int stream,
                       double noise_w) {
  if (user < 0 || user >= static_cast<int>(h_eff.size()) || user >= bf.num_users()) {
    throw std::out_of_range("stream_sinr: user index out of range");
  }
  if (group < 0 || group >= groups.num_groups()) {
    throw std::out_of_range("stream_sinr: group index out of range");
  }
  const ComplexMatrix t = bf.transmit();
  const int zeta = streams_per_group(t, groups);
  const ComplexMatrix w = bf.combiner(user);
  if (stream < 0 || stream >= zeta || stream >= w.cols()) {
    throw std::out_of_range("stream_sinr: stream index out of range");
  }
  const auto &h = h_eff[static_cast<std::size_t>(user)];
  const Eigen::RowVectorXcd g = w.col(stream).adjoint() * h * t;
  return sinr_from_row(g, group, stream, zeta, noise_w, w.col(stream).squaredNorm());
}

double user_rate(std::span<const double> sinrs, double bw_hz) {
  double r = 0.0;
  for (double s : sinrs) {
    r += std::log2(1.0 + s);
  }
  return bw_hz * r;
}

RateReport sum_rate(const BeamformerSet &bf, std::span<const ComplexMatrix> h_eff,
                    const GroupAssignment &groups, double noise_w, double bw_hz) {
  const ComplexMatrix t = bf.transmit();
  const int zeta = streams_per_group(t, groups);
  const int k_users = groups.num_users();
  if (static_cast<int>(h_eff.size()) != k_users || bf.num_users() != k_users) {
    throw std::invalid_argument("sum_rate: user count mismatch");
  }

  RateReport rep;
  rep.noise_w = noise_w;
  rep.user_rate.assign(static_cast<std::size_t>(k_users), 0.0);
  std::vector<double> colored_rate(static_cast<std::size_t>(k_users), 0.0);

  for (int k = 0; k < k_users; ++k) {
    const int h = groups.group_of(k);
    const ComplexMatrix w = bf.combiner(k);
    const ComplexMatrix g = w.adjoint() * h_eff[static_cast<std::size_t>(k)] * t;
    std::vector<double> sinrs;
    std::vector<double> sinrs_colored;
    for (int i = 0; i < zeta; ++i) {
      StreamMetrics m{k, h, i, sinr_from_row(g.row(i), h, i, zeta, noise_w, w.col(i).squaredNorm())};
      sinrs.push_back(m.value.sinr);
      sinrs_colored.push_back(m.value.sinr_colored);
      rep.streams.push_back(m);
    }
    rep.user_rate[static_cast<std::size_t>(k)] = user_rate(sinrs, bw_hz);
    colored_rate[static_cast<std::size_t>(k)] = user_rate(sinrs_colored, bw_hz);
  }

  for (int h = 0; h < groups.num_groups(); ++h) {
    const auto &mem = groups.members(h);
    double r = std::numeric_limits<double>::infinity();
    double rc = std::numeric_limits<double>::infinity();
    for (int k : mem) {
      r = std::min(r, rep.user_rate[static_cast<std::size_t>(k)]);
      rc = std::min(rc, colored_rate[static_cast<std::size_t>(k)]);
    }
    rep.group_rate.push_back(r);
    rep.sum_rate += r;
    rep.sum_rate_colored += rc;
  }
  return rep;
}

RateReport sum_rate(const BeamformerSet &bf, const ChannelSet &ch, const PhaseVector &nu,
                    const GroupAssignment &groups, const SystemConfig &cfg) {
  const auto h_eff = effective_channels(ch, nu, cfg);
  return sum_rate(bf, h_eff, groups, cfg.noise_w(), cfg.bw_hz);
}

bool ConstraintReport::ok() const {
  return max_rf_modulus_dev < 1e-9 && power_ratio <= 1.0 + 1e-6 && max_phase_modulus_dev < 1e-9;
}

ConstraintReport check_constraints(const BeamformerSet &bf, const SystemConfig &cfg,
                                   const PhaseVector *nu) {
  ConstraintReport rep;
  auto modulus_dev = [](const ComplexMatrix &m) {
    double d = 0.0;
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      d = std::max(d, std::abs(std::abs(m.data()[i]) - 1.0));
    }
    return d;
  };
  if (bf.mode == BeamformerMode::hybrid) {
    rep.max_rf_modulus_dev = modulus_dev(bf.f_rf);
    for (const auto &w : bf.w_rf) {
      rep.max_rf_modulus_dev = std::max(rep.max_rf_modulus_dev, modulus_dev(w));
    }
  }
  rep.power_ratio = bf.transmit().squaredNorm() / cfg.power_w();
  if (nu != nullptr) {
    rep.max_phase_modulus_dev = nu->max_modulus_deviation();
  }
  return rep;
}

} // namespace irsmc
