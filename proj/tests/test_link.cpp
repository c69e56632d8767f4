#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rabs/link.hpp"

using rabs::LinkCoefficients;
using rabs::RadioConfig;

namespace {

RadioConfig table_radio() { return RadioConfig{}; }  // defaults carry the benchmark constants

// Independent scalar oracle: same physics composed differently (dB domain,
// long double), used to cross-check the frozen reference values below.
long double sensing_gain_oracle(long double d, long double f) {
  const long double lam = 299792458.0L / f;
  const long double log_gain = std::log10(1000.0L) + std::log10(1000.0L) +
                               2.0L * std::log10(lam) - 3.0L * std::log10(4.0L * M_PIl) -
                               4.0L * std::log10(d);
  return std::pow(10.0L, log_gain);
}

long double comm_gain_oracle(long double d, long double f) {
  const long double lam = 299792458.0L / f;
  const long double log_gain =
      std::log10(1000.0L) + 2.0L * std::log10(lam) - 2.0L * std::log10(4.0L * M_PIl * d);
  return std::pow(10.0L, log_gain);
}

}  // namespace

TEST_CASE("subcarrier frequency and wavelength") {
  const RadioConfig radio = table_radio();
  CHECK(rabs::subcarrier_frequency(0, radio) == Catch::Approx(3.0e9));
  CHECK(rabs::subcarrier_frequency(1, radio) == Catch::Approx(3.00025e9));
  CHECK(rabs::subcarrier_frequency(63, radio) == Catch::Approx(3.01575e9));
  CHECK(rabs::wavelength(0, radio) == Catch::Approx(0.099930819333333333).epsilon(1e-12));
  CHECK_THROWS_AS(rabs::subcarrier_frequency(-1, radio), std::out_of_range);
  CHECK_THROWS_AS(rabs::subcarrier_frequency(64, radio), std::out_of_range);
}

TEST_CASE("sensing channel gain") {
  const RadioConfig radio = table_radio();
  const double h100 = rabs::sensing_channel_gain(100.0, 0, radio);
  // Frozen high-precision evaluation at d=100 m, 3 GHz, 30 dB gains, eta=1.
  CHECK(h100 == Catch::Approx(5.0323322211886867e-8).epsilon(1e-6));
  CHECK(static_cast<double>(sensing_gain_oracle(100.0L, 3.0e9L)) ==
        Catch::Approx(h100).epsilon(1e-9));
  SECTION("inverse fourth-power law") {
    const double h200 = rabs::sensing_channel_gain(200.0, 0, radio);
    CHECK(h100 / h200 == Catch::Approx(16.0).epsilon(1e-12));
  }
  SECTION("zero cross-section kills the gain") {
    RadioConfig r = radio;
    r.eta_m2 = 0.25;
    CHECK(rabs::sensing_channel_gain(100.0, 0, r) == Catch::Approx(h100 * 0.25));
  }
  CHECK_THROWS_AS(rabs::sensing_channel_gain(0.0, 0, radio), std::domain_error);
  CHECK_THROWS_AS(rabs::sensing_channel_gain(-5.0, 0, radio), std::domain_error);
}

TEST_CASE("sensing mutual information") {
  const RadioConfig radio = table_radio();
  CHECK(rabs::sensing_mi(0.0, 0, radio) == 0.0);
  // Frozen value for the gain of the 100 m example; the prefactor
  // 0.5 * delta_f * Ts * Ns equals 10 with the benchmark constants.
  const double h100 = rabs::sensing_channel_gain(100.0, 0, radio);
  CHECK(rabs::sensing_mi(h100, 0, radio) == Catch::Approx(0.28887408488174601).epsilon(1e-6));
  SECTION("monotone in the channel gain") {
    double prev = -1.0;
    for (double h = 0.0; h <= 1e-6; h += 1e-7) {
      const double m = rabs::sensing_mi(h, 0, radio);
      CHECK(m > prev);
      prev = m;
    }
  }
}

TEST_CASE("communication gain and rate") {
  const RadioConfig radio = table_radio();
  const double h100 = rabs::comm_channel_gain(100.0, 0, radio);
  CHECK(h100 == Catch::Approx(6.3238151746038339e-6).epsilon(1e-6));
  CHECK(static_cast<double>(comm_gain_oracle(100.0L, 3.0e9L)) ==
        Catch::Approx(h100).epsilon(1e-9));
  CHECK(rabs::comm_rate(h100, 0, radio) == Catch::Approx(8141247.8000291212).epsilon(1e-6));
  SECTION("inverse square law") {
    CHECK(rabs::comm_channel_gain(50.0, 0, radio) / h100 == Catch::Approx(4.0).epsilon(1e-12));
  }
  CHECK(rabs::comm_rate(0.0, 0, radio) == 0.0);
  CHECK_THROWS_AS(rabs::comm_channel_gain(0.0, 0, radio), std::domain_error);
}

TEST_CASE("noise power follows the PSD over one subcarrier") {
  const RadioConfig radio = table_radio();
  CHECK(radio.noise_power_w() == Catch::Approx(9.9526792638374313e-16).epsilon(1e-9));
}

TEST_CASE("coefficient tables") {
  rabs::Scenario s;
  s.radio = table_radio();
  s.radio.num_subcarriers = 8;
  s.grids = rabs::build_grid_set(40.0, 40.0, 20.0);
  s.locations = {{0, 10.0, 10.0, 10.0}, {1, 35.0, 30.0, 10.0}};
  s.demands = rabs::sample_demands(1, 15.0, 2.0e7, 0.0, 0.0, 4);
  s.protection = rabs::make_protection_levels(0.1, 4, 2, 8);
  s.rng_seed = 1;
  const LinkCoefficients c = rabs::build_coefficients(s);

  SECTION("interval consistency and sign") {
    for (size_t e = 0; e < c.mi_avg.size(); ++e) {
      CHECK(c.mi_bias[e] >= 0.0);
      CHECK(c.rate_bias[e] >= 0.0);
      CHECK(c.mi_avg[e] >= c.mi_bias[e]);
      CHECK(c.rate_avg[e] >= c.rate_bias[e]);
      CHECK(std::isfinite(c.mi_avg[e]));
      CHECK(c.mi_avg[e] > 0.0);
      CHECK(c.rate_avg[e] > 0.0);
    }
  }
  SECTION("endpoints reconstruct from midpoint and half-width") {
    for (int i = 0; i < 4; ++i)
      for (int k = 0; k < 8; ++k) {
        const rabs::DistanceBounds d = rabs::distance_bounds(s.grids[i], s.locations[0]);
        const double lb = rabs::sensing_mi(rabs::sensing_channel_gain(d.longest, k, s.radio), k, s.radio);
        const double ub = rabs::sensing_mi(rabs::sensing_channel_gain(d.shortest, k, s.radio), k, s.radio);
        CHECK(c.mi_avg_at(i, 0, k) - c.mi_bias_at(i, 0, k) == Catch::Approx(lb).margin(1e-15));
        CHECK(c.mi_avg_at(i, 0, k) + c.mi_bias_at(i, 0, k) == Catch::Approx(ub).margin(1e-15));
      }
  }
  SECTION("frequency monotonicity: higher subcarriers see smaller gains") {
    for (int i = 0; i < 4; ++i)
      for (int k = 0; k + 1 < 8; ++k) {
        CHECK(c.mi_avg_at(i, 0, k + 1) < c.mi_avg_at(i, 0, k));
        CHECK(c.rate_avg_at(i, 0, k + 1) < c.rate_avg_at(i, 0, k));
      }
  }
  SECTION("distance monotonicity across locations") {
    // Location 0 sits on grid 0's center; location 1 is farther from grid 0
    // in both interval endpoints, so its average MI must be lower.
    const auto d0 = rabs::distance_bounds(s.grids[0], s.locations[0]);
    const auto d1 = rabs::distance_bounds(s.grids[0], s.locations[1]);
    REQUIRE(d1.longest >= d0.longest);
    REQUIRE(d1.shortest >= d0.shortest);
    for (int k = 0; k < 8; ++k) CHECK(c.mi_avg_at(0, 1, k) <= c.mi_avg_at(0, 0, k));
  }
  SECTION("point grid collapses the interval") {
    rabs::Scenario sp = s;
    sp.grids = {rabs::Grid{0, 10.0, 10.0, 0.0}};
    sp.demands.sensing_bits.resize(1);
    sp.demands.comm_bps.resize(1);
    sp.protection.sensing.resize(1);
    sp.protection.comm.resize(1);
    const LinkCoefficients cp = rabs::build_coefficients(sp);
    for (int k = 0; k < 8; ++k) {
      CHECK(cp.mi_bias_at(0, 0, k) == 0.0);
      CHECK(cp.rate_bias_at(0, 0, k) == 0.0);
    }
  }
}

TEST_CASE("paper-scale tensors are finite and positive") {
  rabs::Scenario s;
  s.radio = table_radio();
  s.grids = rabs::build_grid_set(100.0, 100.0, 20.0);
  s.locations = rabs::sample_locations(11, 100.0, 100.0, 10.0, 10);
  s.demands = rabs::sample_demands(11, 15.0, 2.0e7, 1.0, 1.0, 25);
  s.protection = rabs::make_protection_levels(0.01, 25, 10, 64);
  s.rng_seed = 11;
  const LinkCoefficients c = rabs::build_coefficients(s);
  REQUIRE(c.mi_avg.size() == 25u * 10u * 64u);
  int bad = 0;
  for (size_t e = 0; e < c.mi_avg.size(); ++e) {
    if (!(std::isfinite(c.mi_avg[e]) && c.mi_avg[e] > 0.0)) ++bad;
    if (!(std::isfinite(c.rate_avg[e]) && c.rate_avg[e] > 0.0)) ++bad;
  }
  CHECK(bad == 0);
}

TEST_CASE("coefficient CSV dump") {
  rabs::Scenario s;
  s.radio = table_radio();
  s.radio.num_subcarriers = 2;
  s.grids = rabs::build_grid_set(20.0, 20.0, 20.0);
  s.locations = {{0, 10.0, 10.0, 10.0}};
  s.demands = rabs::sample_demands(1, 15.0, 2.0e7, 0.0, 0.0, 1);
  s.protection = rabs::make_protection_levels(0.0, 1, 1, 2);
  const LinkCoefficients c = rabs::build_coefficients(s);
  std::ostringstream out;
  rabs::write_coefficients_csv(c, out);
  const std::string text = out.str();
  CHECK(text.rfind("i,j,k,m_bar,m_hat,r_bar,r_hat\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 3);  // header + 2 rows
}
