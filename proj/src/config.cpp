#include "irsmc/config.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace irsmc {

namespace {

using nlohmann::json;

template <typename T>
void read(const json &j, const char *key, T &out) {
  if (!j.contains(key)) {
    return;
  }
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception &e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

std::string pairing_name(PathPairing p) {
  return p == PathPairing::gain_sorted ? "gain_sorted" : "group_offset";
}

std::string bd_sum_name(BdSumMode m) {
  return m == BdSumMode::group_members ? "group_members" : "all_users";
}

std::string nu_init_name(PhaseInit p) { return p == PhaseInit::random ? "random" : "ones"; }

} // namespace

const std::vector<std::string> &system_config_keys() {
  static const std::vector<std::string> keys{
      "n_bs",        "n_ue",        "m_bs",          "m_ue",        "n_irs",
      "f_y",         "f_z",         "k_users",       "h_groups",    "group_sizes",
      "zeta",        "power_dbm",   "noise_dbm",     "bw_hz",       "g_tx_dbi",
      "g_rx_dbi",    "paths_y",     "paths_l",       "bs_pos",      "irs_pos",
      "user_center", "user_radius", "seed",          "d_over_lambda", "pl_ref_db",
      "pl_exponent", "nlos_rel_db", "pairing",       "bd_sum",      "nu_init"};
  return keys;
}

double dbm_to_w(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double SystemConfig::power_w() const { return dbm_to_w(power_dbm); }
double SystemConfig::noise_w() const { return dbm_to_w(noise_dbm); }
double SystemConfig::g_tx_amp() const { return std::pow(10.0, g_tx_dbi / 20.0); }
double SystemConfig::g_rx_amp() const { return std::pow(10.0, g_rx_dbi / 20.0); }

std::vector<std::vector<int>> SystemConfig::groups() const {
  std::vector<std::vector<int>> out;
  int next = 0;
  for (int size : group_sizes) {
    std::vector<int> g(static_cast<std::size_t>(std::max(size, 0)));
    std::iota(g.begin(), g.end(), next);
    next += size;
    out.push_back(std::move(g));
  }
  return out;
}

void SystemConfig::validate() const {
  auto need = [](bool ok, const std::string &msg) {
    if (!ok) {
      throw ConfigError(msg);
    }
  };
  need(n_bs >= 1 && n_ue >= 1 && m_bs >= 1 && m_ue >= 1, "antenna and RF-chain counts must be >= 1");
  need(f_y >= 1 && f_z >= 1, "IRS dimensions f_y, f_z must be >= 1");
  need(k_users >= 1 && h_groups >= 1 && zeta >= 1, "k_users, h_groups, zeta must be >= 1");
  need(paths_y >= 1 && paths_l >= 1, "paths_y and paths_l must be >= 1");
  need(h_groups * zeta <= m_bs && m_bs <= n_bs, "RF chains must satisfy H*zeta <= m_bs <= n_bs");
  need(zeta <= m_ue && m_ue <= n_ue, "RF chains must satisfy zeta <= m_ue <= n_ue");
  need(static_cast<int>(group_sizes.size()) == h_groups, "group_sizes must have h_groups entries");
  need(std::all_of(group_sizes.begin(), group_sizes.end(), [](int s) { return s >= 1; }),
       "every group needs at least one user");
  need(std::accumulate(group_sizes.begin(), group_sizes.end(), 0) == k_users,
       "group_sizes must sum to k_users");
  need(zeta <= paths_l, "zeta must not exceed paths_l (one IRS->user path per stream)");
  if (pairing == PathPairing::group_offset) {
    need(h_groups * zeta <= paths_y, "group_offset pairing needs H*zeta <= paths_y");
  } else {
    need(zeta <= paths_y, "zeta must not exceed paths_y");
  }
  need(std::isfinite(power_dbm) && std::isfinite(noise_dbm), "power and noise must be finite");
  need(bw_hz > 0.0 && std::isfinite(bw_hz), "bw_hz must be positive");
  need(user_radius >= 0.0, "user_radius must be non-negative");
  need(d_over_lambda > 0.0, "d_over_lambda must be positive");
}

SystemConfig parse_system_config(const json &j, const std::vector<std::string> &extra_allowed) {
  if (!j.is_object()) {
    throw ConfigError("config must be a JSON object");
  }
  const auto &keys = system_config_keys();
  for (const auto &item : j.items()) {
    const bool known = std::find(keys.begin(), keys.end(), item.key()) != keys.end() ||
                       std::find(extra_allowed.begin(), extra_allowed.end(), item.key()) !=
                           extra_allowed.end();
    if (!known) {
      throw ConfigError("unknown config key '" + item.key() + "'");
    }
  }

  SystemConfig cfg;
  read(j, "n_bs", cfg.n_bs);
  read(j, "n_ue", cfg.n_ue);
  read(j, "m_bs", cfg.m_bs);
  read(j, "m_ue", cfg.m_ue);
  read(j, "f_y", cfg.f_y);
  read(j, "f_z", cfg.f_z);
  read(j, "k_users", cfg.k_users);
  read(j, "h_groups", cfg.h_groups);
  read(j, "zeta", cfg.zeta);
  read(j, "power_dbm", cfg.power_dbm);
  read(j, "noise_dbm", cfg.noise_dbm);
  read(j, "bw_hz", cfg.bw_hz);
  read(j, "g_tx_dbi", cfg.g_tx_dbi);
  read(j, "g_rx_dbi", cfg.g_rx_dbi);
  read(j, "paths_y", cfg.paths_y);
  read(j, "paths_l", cfg.paths_l);
  read(j, "bs_pos", cfg.bs_pos);
  read(j, "irs_pos", cfg.irs_pos);
  read(j, "user_center", cfg.user_center);
  read(j, "user_radius", cfg.user_radius);
  read(j, "seed", cfg.seed);
  read(j, "d_over_lambda", cfg.d_over_lambda);
  read(j, "pl_ref_db", cfg.pl_ref_db);
  read(j, "pl_exponent", cfg.pl_exponent);
  read(j, "nlos_rel_db", cfg.nlos_rel_db);

  if (j.contains("group_sizes")) {
    read(j, "group_sizes", cfg.group_sizes);
  } else if (j.contains("k_users") || j.contains("h_groups")) {
    if (cfg.h_groups < 1 || cfg.k_users % cfg.h_groups != 0) {
      throw ConfigError("group_sizes missing and k_users is not divisible by h_groups");
    }
    cfg.group_sizes.assign(static_cast<std::size_t>(cfg.h_groups), cfg.k_users / cfg.h_groups);
  }

  if (j.contains("pairing")) {
    const auto s = j.at("pairing").get<std::string>();
    if (s == "gain_sorted") {
      cfg.pairing = PathPairing::gain_sorted;
    } else if (s == "group_offset") {
      cfg.pairing = PathPairing::group_offset;
    } else {
      throw ConfigError("pairing must be gain_sorted or group_offset");
    }
  }
  if (j.contains("bd_sum")) {
    const auto s = j.at("bd_sum").get<std::string>();
    if (s == "group_members") {
      cfg.bd_sum = BdSumMode::group_members;
    } else if (s == "all_users") {
      cfg.bd_sum = BdSumMode::all_users;
    } else {
      throw ConfigError("bd_sum must be group_members or all_users");
    }
  }
  if (j.contains("nu_init")) {
    const auto s = j.at("nu_init").get<std::string>();
    if (s == "random") {
      cfg.nu_init = PhaseInit::random;
    } else if (s == "ones") {
      cfg.nu_init = PhaseInit::ones;
    } else {
      throw ConfigError("nu_init must be random or ones");
    }
  }
  if (j.contains("n_irs")) {
    int n_irs = 0;
    read(j, "n_irs", n_irs);
    if (n_irs != cfg.n_irs()) {
      throw ConfigError("n_irs must equal f_y * f_z");
    }
  }
  cfg.validate();
  return cfg;
}

nlohmann::json to_json(const SystemConfig &cfg) {
  return json{{"n_bs", cfg.n_bs},
              {"n_ue", cfg.n_ue},
              {"m_bs", cfg.m_bs},
              {"m_ue", cfg.m_ue},
              {"n_irs", cfg.n_irs()},
              {"f_y", cfg.f_y},
              {"f_z", cfg.f_z},
              {"k_users", cfg.k_users},
              {"h_groups", cfg.h_groups},
              {"group_sizes", cfg.group_sizes},
              {"zeta", cfg.zeta},
              {"power_dbm", cfg.power_dbm},
              {"noise_dbm", cfg.noise_dbm},
              {"bw_hz", cfg.bw_hz},
              {"g_tx_dbi", cfg.g_tx_dbi},
              {"g_rx_dbi", cfg.g_rx_dbi},
              {"paths_y", cfg.paths_y},
              {"paths_l", cfg.paths_l},
              {"bs_pos", cfg.bs_pos},
              {"irs_pos", cfg.irs_pos},
              {"user_center", cfg.user_center},
              {"user_radius", cfg.user_radius},
              {"seed", cfg.seed},
              {"d_over_lambda", cfg.d_over_lambda},
              {"pl_ref_db", cfg.pl_ref_db},
              {"pl_exponent", cfg.pl_exponent},
              {"nlos_rel_db", cfg.nlos_rel_db},
              {"pairing", pairing_name(cfg.pairing)},
              {"bd_sum", bd_sum_name(cfg.bd_sum)},
              {"nu_init", nu_init_name(cfg.nu_init)}};
}

} // namespace irsmc
