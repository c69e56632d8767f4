#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace rabs {

/// OFDM/antenna/noise constants shared by every link-budget evaluation.
/// Gains and powers are linear; dB conversions happen at config boundaries.
struct RadioConfig {
  double f0_hz = 3.0e9;          ///< carrier base frequency
  double delta_f_hz = 0.25e6;    ///< subcarrier spacing
  int num_subcarriers = 64;
  double ts_s = 5.0e-6;          ///< OFDM symbol duration
  int ns_symbols = 16;           ///< integrated symbol count
  double tx_power_w = 1.0;       ///< per-subcarrier transmit power, uniform
  double gt_s = 1000.0;          ///< sensing TX antenna gain (30 dB)
  double gr_s = 1000.0;          ///< sensing RX antenna gain (30 dB)
  double gt_c = 1.0;             ///< comm TX antenna gain (0 dB)
  double gr_c = 1000.0;          ///< comm RX antenna gain (30 dB)
  double eta_m2 = 1.0;           ///< mean radar cross-section
  double noise_psd_dbm_hz = -174.0;
  double mu = 0.5;               ///< objective weight between sensing and comm

  /// Noise power per subcarrier: PSD (converted to W/Hz) times the spacing.
  double noise_power_w() const {
    return std::pow(10.0, (noise_psd_dbm_hz - 30.0) / 10.0) * delta_f_hz;
  }

  void validate() const {
    auto positive = [](double v, const char* what) {
      if (!(v > 0.0)) throw std::invalid_argument(std::string(what) + " must be strictly positive");
    };
    positive(f0_hz, "f0_hz");
    positive(delta_f_hz, "delta_f_hz");
    positive(ts_s, "ts_s");
    positive(tx_power_w, "tx_power_w");
    positive(gt_s, "gt_s");
    positive(gr_s, "gr_s");
    positive(gt_c, "gt_c");
    positive(gr_c, "gr_c");
    positive(eta_m2, "eta_m2");
    if (num_subcarriers < 1) throw std::invalid_argument("num_subcarriers must be >= 1");
    if (ns_symbols < 1) throw std::invalid_argument("ns_symbols must be >= 1");
    if (!(mu >= 0.0 && mu <= 1.0)) throw std::invalid_argument("mu must lie in [0, 1]");
  }
};

/// One square ground cell of the traffic grid.
struct Grid {
  int index = 0;
  double center_x = 0.0;
  double center_y = 0.0;
  double half_width = 0.0;
};

/// Elevated grasping point (lamppost) a RABS may attach to.
struct CandidateLocation {
  int index = 0;
  double x = 0.0, y = 0.0, z = 0.0;
};

struct DemandProfile {
  std::vector<double> sensing_bits;  ///< per-grid sensing demand
  std::vector<double> comm_bps;      ///< per-grid communication demand
};

/// Per-grid protection levels controlling robustness, plus the scalar that
/// generated them.
struct ProtectionLevels {
  std::vector<double> sensing;  ///< budget of sensing coefficients at worst case
  std::vector<double> comm;
  double delta = 0.0;
};

struct Scenario {
  RadioConfig radio;
  std::vector<Grid> grids;
  std::vector<CandidateLocation> locations;
  DemandProfile demands;
  ProtectionLevels protection;
  std::uint64_t rng_seed = 0;

  int num_grids() const { return static_cast<int>(grids.size()); }
  int num_locations() const { return static_cast<int>(locations.size()); }
  int num_subcarriers() const { return radio.num_subcarriers; }

  void validate() const {
    radio.validate();
    const size_t I = grids.size();
    if (I == 0) throw std::invalid_argument("scenario has no grids");
    if (locations.empty()) throw std::invalid_argument("scenario has no candidate locations");
    if (demands.sensing_bits.size() != I || demands.comm_bps.size() != I)
      throw std::invalid_argument("demand vectors must have one entry per grid");
    if (protection.sensing.size() != I || protection.comm.size() != I)
      throw std::invalid_argument("protection vectors must have one entry per grid");
    for (double d : demands.sensing_bits)
      if (!(d > 0.0)) throw std::invalid_argument("sensing demands must be strictly positive");
    for (double d : demands.comm_bps)
      if (!(d > 0.0)) throw std::invalid_argument("communication demands must be strictly positive");
    for (const auto& loc : locations)
      if (!(loc.z > 0.0)) throw std::invalid_argument("candidate location height must be positive");
    for (const auto& g : grids)
      if (!(g.half_width >= 0.0)) throw std::invalid_argument("grid half width must be nonnegative");
  }
};

/// Longest/shortest 3-D distances from a location to a grid square. The
/// longest distance drives the channel-gain lower bound.
struct DistanceBounds {
  double longest = 0.0;
  double shortest = 0.0;
};

/// Tiles a rectangular area with square cells, row-major (x fastest).
/// Dimensions must be exact multiples of the cell size.
inline std::vector<Grid> build_grid_set(double area_w, double area_h, double cell) {
  if (!(cell > 0.0)) throw std::invalid_argument("cell size must be positive");
  auto cells_along = [&](double extent, const char* axis) {
    const double q = extent / cell;
    const long n = std::lround(q);
    if (n < 1 || std::fabs(q - static_cast<double>(n)) > 1e-9)
      throw std::invalid_argument(std::string("area ") + axis + " (" + std::to_string(extent) +
                                  ") is not an exact multiple of the cell size (" +
                                  std::to_string(cell) + ")");
    return static_cast<int>(n);
  };
  const int nx = cells_along(area_w, "width");
  const int ny = cells_along(area_h, "height");
  std::vector<Grid> grids;
  grids.reserve(static_cast<size_t>(nx) * ny);
  for (int row = 0; row < ny; ++row)
    for (int col = 0; col < nx; ++col)
      grids.push_back(Grid{row * nx + col, (col + 0.5) * cell, (row + 0.5) * cell, cell / 2.0});
  return grids;
}

/// 3-D distance extremes between an elevated point and a ground square.
inline DistanceBounds distance_bounds(const Grid& grid, const CandidateLocation& loc) {
  if (!(loc.z > 0.0)) throw std::domain_error("candidate location height must be positive");
  const double dx = std::fabs(loc.x - grid.center_x);
  const double dy = std::fabs(loc.y - grid.center_y);
  const double h = grid.half_width;
  const double near_x = std::max(0.0, dx - h);
  const double near_y = std::max(0.0, dy - h);
  const double far_x = dx + h;
  const double far_y = dy + h;
  return DistanceBounds{std::sqrt(far_x * far_x + far_y * far_y + loc.z * loc.z),
                        std::sqrt(near_x * near_x + near_y * near_y + loc.z * loc.z)};
}

namespace detail {

/// Distinct deterministic engine per (seed, purpose) pair.
inline std::mt19937_64 seeded_engine(std::uint64_t seed, std::uint64_t tag) {
  return std::mt19937_64(seed ^ (0x9E3779B97F4A7C15ULL * (tag + 1)));
}

/// Uniform in [0, 1). Hand-rolled so sequences do not depend on the standard
/// library's distribution implementation.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Standard normal via Box-Muller.
inline double standard_normal(std::mt19937_64& rng) {
  const double u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

/// Log-normal draw with arithmetic mean `mean` and underlying-normal
/// standard deviation `sd`.
inline double lognormal_with_mean(std::mt19937_64& rng, double mean, double sd) {
  if (sd == 0.0) return mean;
  const double mu_log = std::log(mean) - 0.5 * sd * sd;
  return std::exp(mu_log + sd * standard_normal(rng));
}

}  // namespace detail

/// Per-grid demands, log-normal around the configured arithmetic means.
/// Deterministic for a given seed.
inline DemandProfile sample_demands(std::uint64_t seed, double mean_sensing, double mean_comm,
                                    double sd_sensing, double sd_comm, int num_grids) {
  if (!(mean_sensing > 0.0) || !(mean_comm > 0.0))
    throw std::invalid_argument("demand means must be strictly positive");
  if (sd_sensing < 0.0 || sd_comm < 0.0)
    throw std::invalid_argument("demand standard deviations must be nonnegative");
  DemandProfile profile;
  profile.sensing_bits.reserve(num_grids);
  profile.comm_bps.reserve(num_grids);
  auto rng_sen = detail::seeded_engine(seed, 1);
  auto rng_com = detail::seeded_engine(seed, 2);
  for (int i = 0; i < num_grids; ++i)
    profile.sensing_bits.push_back(detail::lognormal_with_mean(rng_sen, mean_sensing, sd_sensing));
  for (int i = 0; i < num_grids; ++i)
    profile.comm_bps.push_back(detail::lognormal_with_mean(rng_com, mean_comm, sd_comm));
  return profile;
}

/// Candidate locations placed uniformly at random in the area at the given
/// height.
inline std::vector<CandidateLocation> sample_locations(std::uint64_t seed, double area_w,
                                                       double area_h, double height, int count) {
  if (count < 1) throw std::invalid_argument("need at least one candidate location");
  if (!(height > 0.0)) throw std::invalid_argument("location height must be positive");
  auto rng = detail::seeded_engine(seed, 0);
  std::vector<CandidateLocation> locations;
  locations.reserve(count);
  for (int j = 0; j < count; ++j) {
    const double x = detail::uniform01(rng) * area_w;
    const double y = detail::uniform01(rng) * area_h;
    locations.push_back(CandidateLocation{j, x, y, height});
  }
  return locations;
}

/// Uniform protection levels: level = delta * J * K for every grid, clamped
/// to the coefficient count.
inline ProtectionLevels make_protection_levels(double delta, int num_grids, int num_locations,
                                               int num_subcarriers) {
  if (delta < 0.0) throw std::invalid_argument("delta must be nonnegative");
  const double cap = static_cast<double>(num_locations) * num_subcarriers;
  const double level = std::min(delta * cap, cap);
  ProtectionLevels p;
  p.sensing.assign(num_grids, level);
  p.comm.assign(num_grids, level);
  p.delta = delta;
  return p;
}

}  // namespace rabs
