#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rabs/scenario.hpp"

namespace rabs {

/// Raised for malformed or inconsistent configuration input; the CLI maps it
/// to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Experiment configuration as read from JSON. Defaults reproduce the
/// standard benchmark setup: a 100x100 m area in 20 m cells, 10 lamppost
/// candidates, log-normal demands with means 15 bit / 20 Mbps.
struct ExperimentConfig {
  double area_w_m = 100.0;
  double area_h_m = 100.0;
  double cell_m = 20.0;
  double lamppost_height_m = 10.0;
  int num_locations = 10;
  std::uint64_t seed = 1;
  double m_sen_bits = 15.0;
  double m_com_bps = 20.0e6;
  double sd_sen = 1.0;
  double sd_com = 1.0;
  double delta = 0.0;
  RadioConfig radio;
  std::optional<std::vector<CandidateLocation>> locations;  ///< overrides random placement
};

namespace detail {

template <typename T>
void read_field(const nlohmann::json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config field '") + key + "': " + e.what());
  }
}

}  // namespace detail

inline ExperimentConfig parse_config(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  ExperimentConfig cfg;
  detail::read_field(j, "area_w_m", cfg.area_w_m);
  detail::read_field(j, "area_h_m", cfg.area_h_m);
  detail::read_field(j, "cell_m", cfg.cell_m);
  detail::read_field(j, "lamppost_height_m", cfg.lamppost_height_m);
  detail::read_field(j, "num_locations", cfg.num_locations);
  detail::read_field(j, "seed", cfg.seed);
  detail::read_field(j, "m_sen_bits", cfg.m_sen_bits);
  detail::read_field(j, "m_com_bps", cfg.m_com_bps);
  detail::read_field(j, "sd_sen", cfg.sd_sen);
  detail::read_field(j, "sd_com", cfg.sd_com);
  detail::read_field(j, "delta", cfg.delta);
  if (j.contains("radio")) {
    const auto& r = j.at("radio");
    if (!r.is_object()) throw ConfigError("'radio' must be a JSON object");
    detail::read_field(r, "f0_hz", cfg.radio.f0_hz);
    detail::read_field(r, "delta_f_hz", cfg.radio.delta_f_hz);
    detail::read_field(r, "num_subcarriers", cfg.radio.num_subcarriers);
    detail::read_field(r, "ts_s", cfg.radio.ts_s);
    detail::read_field(r, "ns_symbols", cfg.radio.ns_symbols);
    detail::read_field(r, "tx_power_w", cfg.radio.tx_power_w);
    detail::read_field(r, "gt_s", cfg.radio.gt_s);
    detail::read_field(r, "gr_s", cfg.radio.gr_s);
    detail::read_field(r, "gt_c", cfg.radio.gt_c);
    detail::read_field(r, "gr_c", cfg.radio.gr_c);
    detail::read_field(r, "eta_m2", cfg.radio.eta_m2);
    detail::read_field(r, "noise_psd_dbm_hz", cfg.radio.noise_psd_dbm_hz);
    detail::read_field(r, "mu", cfg.radio.mu);
  }
  if (j.contains("locations")) {
    const auto& locs = j.at("locations");
    if (!locs.is_array()) throw ConfigError("'locations' must be an array of [x, y, z] triples");
    std::vector<CandidateLocation> out;
    int index = 0;
    for (const auto& entry : locs) {
      if (!entry.is_array() || entry.size() != 3)
        throw ConfigError("'locations' entries must be [x, y, z] triples");
      out.push_back(CandidateLocation{index++, entry[0].get<double>(), entry[1].get<double>(),
                                      entry[2].get<double>()});
    }
    if (out.empty()) throw ConfigError("'locations' must not be empty when present");
    cfg.locations = std::move(out);
  }
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  return parse_config(j);
}

/// Materializes a scenario from a config: grids tile the area, candidate
/// locations are taken verbatim or sampled, demands are drawn from the
/// seeded log-normal sampler, and protection levels follow delta * J * K.
inline Scenario build_scenario(const ExperimentConfig& cfg,
                               std::optional<std::uint64_t> seed_override = {},
                               std::optional<double> delta_override = {}) {
  const std::uint64_t seed = seed_override.value_or(cfg.seed);
  const double delta = delta_override.value_or(cfg.delta);
  Scenario s;
  s.radio = cfg.radio;
  s.rng_seed = seed;
  try {
    s.grids = build_grid_set(cfg.area_w_m, cfg.area_h_m, cfg.cell_m);
    if (cfg.locations) {
      s.locations = *cfg.locations;
    } else {
      s.locations = sample_locations(seed, cfg.area_w_m, cfg.area_h_m, cfg.lamppost_height_m,
                                     cfg.num_locations);
    }
    s.demands = sample_demands(seed, cfg.m_sen_bits, cfg.m_com_bps, cfg.sd_sen, cfg.sd_com,
                               static_cast<int>(s.grids.size()));
    s.protection = make_protection_levels(delta, static_cast<int>(s.grids.size()),
                                          static_cast<int>(s.locations.size()),
                                          s.radio.num_subcarriers);
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  } catch (const std::domain_error& e) {
    throw ConfigError(e.what());
  }
  return s;
}

}  // namespace rabs
