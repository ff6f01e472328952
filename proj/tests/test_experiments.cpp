#include <doctest.h>

#include <cmath>
#include <numbers>

#include "thzqkd/error.hpp"
#include "thzqkd/experiments.hpp"

using namespace thzqkd;

TEST_CASE("LoS scenario defaults") {
  const Scenario s = los_scenario(15e12, 32, 10.0);
  CHECK(s.arrays.n_tx == 32);
  CHECK(s.arrays.n_rx == 32);
  CHECK(s.arrays.element_gain == 1000.0);
  CHECK(s.env.signal_variance == 1e3);
  CHECK(s.env.eve_noise == 1.0);
  CHECK(s.env.temperature_k == 296.0);
  REQUIRE(s.paths.size() == 1);
  CHECK(s.paths[0].is_los);
  CHECK_NOTHROW(s.validate());
}

TEST_CASE("with_distance rescales every path") {
  Scenario s = los_scenario(15e12, 4, 2.0);
  PathSpec bounce = s.paths[0];
  bounce.is_los = false;
  bounce.length_m = 3.0;
  bounce.delay_s = 3.0 / constants::speed_of_light;
  bounce.aod_rad = 0.3;
  s.paths.push_back(bounce);
  const Scenario t = with_distance(s, 4.0);
  CHECK(t.paths[0].length_m == 4.0);
  CHECK(t.paths[1].length_m == doctest::Approx(6.0));
  CHECK(t.paths[1].delay_s == doctest::Approx(6.0 / constants::speed_of_light));
  CHECK_THROWS_AS(with_distance(s, 0.0), DomainError);
}

TEST_CASE("single-path transmittance follows the inverse square law") {
  const Scenario s = los_scenario(15e12, 8, 1.0);
  const double t1 = scenario_transmittances(with_distance(s, 2.0))[0];
  const double t2 = scenario_transmittances(with_distance(s, 4.0))[0];
  const double absorption = std::pow(10.0, -0.1 * 50.0 * 0.002);
  CHECK(t1 / t2 == doctest::Approx(4.0 / absorption).epsilon(1e-12));
}

TEST_CASE("distance sweep") {
  SweepSpec spec;
  spec.scenario = los_scenario(15e12, 32, 1.0);
  spec.grid = logspace(1.0, 100.0, 9);
  spec.methods = {RateMethod::large_modulation, RateMethod::taylor};
  const auto rows = sweep(spec);
  REQUIRE(rows.size() == 18);
  CHECK(rows[0].method == RateMethod::large_modulation);
  CHECK(rows[1].method == RateMethod::taylor);
  CHECK(rows[0].parameter_value == rows[1].parameter_value);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].ok());
    CHECK(rows[i].feasible);
    CHECK(rows[i].per_channel_rates.size() == 1);
    if (i >= 2) CHECK(rows[i].total_rate_bits < rows[i - 2].total_rate_bits);
  }

  spec.grid = {0.01, 1.0};
  const auto near = sweep(spec);
  CHECK_FALSE(near[0].ok());
  CHECK(near[0].error.find("exceeds 1") != std::string::npos);
  CHECK(near[2].ok());

  spec.grid = {2.0, 1.0};
  CHECK_THROWS_AS(sweep(spec), DomainError);
  spec.grid = {};
  CHECK_THROWS_AS(sweep(spec), DomainError);
}

TEST_CASE("sweeps over other parameters") {
  SweepSpec spec;
  spec.scenario = los_scenario(15e12, 4, 1.0);
  spec.parameter = SweepParameter::array_size;
  spec.grid = {1, 2, 4, 8};
  const auto rows = sweep(spec);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].total_rate_bits > rows[i - 1].total_rate_bits);
  spec.grid = {1.5};
  CHECK_FALSE(sweep(spec)[0].ok());

  spec.parameter = SweepParameter::temperature_k;
  spec.grid = {100.0, 200.0, 300.0, 400.0};
  const auto hot = sweep(spec);
  for (std::size_t i = 1; i < hot.size(); ++i) CHECK(hot[i].zeta < hot[i - 1].zeta);
  CHECK(to_string(SweepParameter::frequency_hz) == "frequency_hz");
}

TEST_CASE("max distance bisection") {
  const Scenario s = los_scenario(15e12, 32, 1.0);
  const double d_lo = min_physical_distance(s);
  const MaxDistanceResult r = max_distance(s, 1e-5, RateMethod::large_modulation, d_lo, 1e4);
  CHECK(r.distance_m == doctest::Approx(11.487).epsilon(1e-3));
  CHECK(r.residual <= r.residual_bound);
  CHECK(r.iterations > 0);
  CHECK_THROWS_AS(max_distance(s, 1e-5, RateMethod::large_modulation, 20.0, 30.0), BracketError);
  CHECK_THROWS_AS(max_distance(s, 1e-5, RateMethod::large_modulation, 30.0, 20.0), DomainError);
  CHECK_THROWS_AS(max_distance(s, -1.0, RateMethod::large_modulation, 1.0, 20.0), DomainError);
  try {
    max_distance(s, 1e-5, RateMethod::large_modulation, 20.0, 30.0);
  } catch (const BracketError& e) {
    CHECK(e.rate_lo() < 1e-5);
    CHECK(e.rate_hi() < e.rate_lo());
  }
}

TEST_CASE("nearest physical distance") {
  const Scenario s = los_scenario(15e12, 1024, 1.0);
  const double d = min_physical_distance(s);
  CHECK(d > 0.5);
  CHECK(d < 5.0);
  CHECK_NOTHROW(scenario_transmittances(with_distance(s, d)));
  CHECK_THROWS_AS(scenario_transmittances(with_distance(s, 0.9 * d)), DomainError);
  CHECK(min_physical_distance(los_scenario(15e12, 1, 1.0)) == doctest::Approx(wavelength_m(15e12) * 1000.0 / (4.0 * std::numbers::pi)).epsilon(1e-6));
}

TEST_CASE("frequency profile statuses") {
  Scenario s = los_scenario(15e12, 32, 1.0);
  const auto pts = frequency_profile(s, 1e-5, RateMethod::large_modulation, {9e12, 15e12, 31e12});
  CHECK(pts[0].status.rfind("error", 0) == 0);
  CHECK_FALSE(pts[0].max_distance_m.has_value());
  CHECK(pts[1].status == "ok");
  CHECK(pts[1].max_distance_m.value() == doctest::Approx(11.487).epsilon(1e-3));
  CHECK(pts[2].status.rfind("error", 0) == 0);

  s.absorption = AbsorptionTable::from_rows(std::vector<std::pair<double, double>>{{0.5e12, 10.0}, {40e12, 10.0}});
  const auto low = max_distance_at_frequency(s, 1e-5, RateMethod::large_modulation, 1e12);
  CHECK(low.zeta < 0.0);
  CHECK(low.status.rfind("infeasible", 0) == 0);
  CHECK_FALSE(low.max_distance_m.has_value());

  const auto unreachable = max_distance_at_frequency(s, 10.0, RateMethod::large_modulation, 15e12);
  CHECK(unreachable.status.rfind("infeasible", 0) == 0);
}

TEST_CASE("zeta temperature sweep") {
  const auto pts = zeta_temperature_sweep(1e3, 1.0, {10e12, 30e12}, {100.0, 296.0});
  REQUIRE(pts.size() == 4);
  CHECK(pts[0].temperature_k == 100.0);
  CHECK(pts[1].frequency_hz == 30e12);
  CHECK(pts[2].temperature_k == 296.0);
  CHECK(pts[2].zeta == doctest::Approx(0.365799703882243).epsilon(1e-10));
  CHECK(pts[3].zeta == doctest::Approx(0.709278472895613).epsilon(1e-10));
  CHECK(pts[0].vacuum_variance < pts[2].vacuum_variance);
}

TEST_CASE("grids") {
  const auto l = linspace(0.0, 1.0, 5);
  CHECK(l == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
  const auto g = logspace(1.0, 1000.0, 4);
  CHECK(g[1] == doctest::Approx(10.0));
  CHECK(g.back() == 1000.0);
  CHECK_THROWS_AS(logspace(0.0, 1.0, 3), DomainError);
  CHECK_THROWS_AS(linspace(0.0, 1.0, 0), DomainError);
  CHECK(default_distance_grid().front() == 0.01);
  CHECK(default_distance_grid().back() == 1000.0);
  const auto f = default_frequency_grid();
  CHECK(f.size() == 201);
  CHECK(f.front() == 10e12);
  CHECK(f.back() == doctest::Approx(30e12));
  CHECK(default_temperature_grid().size() == 301);
}
