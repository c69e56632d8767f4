#pragma once

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "rabs/scenario.hpp"

namespace rabs {

inline constexpr double speed_of_light_m_s = 299792458.0;

inline double subcarrier_frequency(int k, const RadioConfig& radio) {
  if (k < 0 || k >= radio.num_subcarriers) throw std::out_of_range("subcarrier index out of range");
  return radio.f0_hz + static_cast<double>(k) * radio.delta_f_hz;
}

inline double wavelength(int k, const RadioConfig& radio) {
  return speed_of_light_m_s / subcarrier_frequency(k, radio);
}

/// Two-way surveillance channel gain: antenna gains, cross-section and
/// wavelength over the fourth power of distance.
inline double sensing_channel_gain(double distance_m, int k, const RadioConfig& radio) {
  if (!(distance_m > 0.0)) throw std::domain_error("sensing_channel_gain requires distance > 0");
  const double lam = wavelength(k, radio);
  const double four_pi = 4.0 * M_PI;
  const double d2 = distance_m * distance_m;
  return radio.gt_s * radio.gr_s * radio.eta_m2 * lam * lam /
         (four_pi * four_pi * four_pi * d2 * d2);
}

/// Sensing mutual information (bits) accumulated over the integrated pulse
/// train at one subcarrier.
inline double sensing_mi(double channel_gain, int k, const RadioConfig& radio) {
  if (channel_gain < 0.0) throw std::domain_error("channel gain must be nonnegative");
  (void)k;
  const double ns = static_cast<double>(radio.ns_symbols);
  const double snr = radio.tx_power_w * radio.ts_s * radio.ts_s * ns * channel_gain /
                     radio.noise_power_w();
  return 0.5 * radio.delta_f_hz * radio.ts_s * ns * std::log2(1.0 + snr);
}

/// One-way free-space communication channel gain.
inline double comm_channel_gain(double distance_m, int k, const RadioConfig& radio) {
  if (!(distance_m > 0.0)) throw std::domain_error("comm_channel_gain requires distance > 0");
  const double lam = wavelength(k, radio);
  const double four_pi_d = 4.0 * M_PI * distance_m;
  return radio.gt_c * radio.gr_c * lam * lam / (four_pi_d * four_pi_d);
}

/// Achievable rate (bit/s) on one subcarrier.
inline double comm_rate(double channel_gain, int k, const RadioConfig& radio) {
  if (channel_gain < 0.0) throw std::domain_error("channel gain must be nonnegative");
  (void)k;
  return radio.delta_f_hz *
         std::log2(1.0 + radio.tx_power_w * channel_gain / radio.noise_power_w());
}

/// Dense interval tables: average and half-width (bias) of the MI and rate
/// achievable from grid i served from location j on subcarrier k. Averages
/// dominate biases elementwise because the worst-case values stay
/// nonnegative.
struct LinkCoefficients {
  int num_grids = 0, num_locations = 0, num_subcarriers = 0;
  std::vector<double> mi_avg, mi_bias, rate_avg, rate_bias;

  size_t idx(int i, int j, int k) const {
    return (static_cast<size_t>(i) * num_locations + j) * num_subcarriers + k;
  }
  double mi_avg_at(int i, int j, int k) const { return mi_avg[idx(i, j, k)]; }
  double mi_bias_at(int i, int j, int k) const { return mi_bias[idx(i, j, k)]; }
  double rate_avg_at(int i, int j, int k) const { return rate_avg[idx(i, j, k)]; }
  double rate_bias_at(int i, int j, int k) const { return rate_bias[idx(i, j, k)]; }
};

/// Evaluates the interval endpoints for every (grid, location, subcarrier)
/// triple and stores midpoint/half-width form. The gain lower bound comes
/// from the longest distance, the upper bound from the shortest.
inline LinkCoefficients build_coefficients(const Scenario& scenario) {
  const int I = scenario.num_grids();
  const int J = scenario.num_locations();
  const int K = scenario.num_subcarriers();
  LinkCoefficients c;
  c.num_grids = I;
  c.num_locations = J;
  c.num_subcarriers = K;
  const size_t total = static_cast<size_t>(I) * J * K;
  c.mi_avg.resize(total);
  c.mi_bias.resize(total);
  c.rate_avg.resize(total);
  c.rate_bias.resize(total);
  for (int i = 0; i < I; ++i) {
    for (int j = 0; j < J; ++j) {
      const DistanceBounds d = distance_bounds(scenario.grids[i], scenario.locations[j]);
      for (int k = 0; k < K; ++k) {
        const double mi_lb = sensing_mi(sensing_channel_gain(d.longest, k, scenario.radio), k, scenario.radio);
        const double mi_ub = sensing_mi(sensing_channel_gain(d.shortest, k, scenario.radio), k, scenario.radio);
        const double r_lb = comm_rate(comm_channel_gain(d.longest, k, scenario.radio), k, scenario.radio);
        const double r_ub = comm_rate(comm_channel_gain(d.shortest, k, scenario.radio), k, scenario.radio);
        const size_t at = c.idx(i, j, k);
        c.mi_avg[at] = 0.5 * (mi_ub + mi_lb);
        c.mi_bias[at] = 0.5 * (mi_ub - mi_lb);
        c.rate_avg[at] = 0.5 * (r_ub + r_lb);
        c.rate_bias[at] = 0.5 * (r_ub - r_lb);
      }
    }
  }
  return c;
}

/// CSV dump of the coefficient tensors for external inspection.
inline void write_coefficients_csv(const LinkCoefficients& c, std::ostream& out) {
  out << "i,j,k,m_bar,m_hat,r_bar,r_hat\n";
  char buf[160];
  for (int i = 0; i < c.num_grids; ++i)
    for (int j = 0; j < c.num_locations; ++j)
      for (int k = 0; k < c.num_subcarriers; ++k) {
        std::snprintf(buf, sizeof(buf), "%d,%d,%d,%.9g,%.9g,%.9g,%.9g\n", i, j, k,
                      c.mi_avg_at(i, j, k), c.mi_bias_at(i, j, k), c.rate_avg_at(i, j, k),
                      c.rate_bias_at(i, j, k));
        out << buf;
      }
}

}  // namespace rabs
