// Acceptance checks, one PASS/FAIL line per criterion.
// Usage: acceptance [criterion ...]   (default: all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "thzqkd/channel_model.hpp"
#include "thzqkd/cli.hpp"
#include "thzqkd/experiments.hpp"
#include "thzqkd/gaussian_core.hpp"
#include "thzqkd/keyrate.hpp"
#include "thzqkd/protocol_mc.hpp"

using namespace thzqkd;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

const double kMimoFrequencies[] = {10e12, 15e12, 30e12};
const double kSisoFrequencies[] = {15e12, 30e12};
constexpr double kTargetRate = 1e-5;

// 1. zeta > alpha at 10, 15, 30 THz and not at 1 THz.
Outcome feasibility_window() {
  Outcome o;
  for (double f : {1e12, 10e12, 15e12, 30e12}) {
    Scenario s = los_scenario(f, 32, 5.0);
    if (f < 10e12) {
      // the default absorption table starts at 10 THz
      s.absorption = AbsorptionTable::from_rows(std::vector<std::pair<double, double>>{{0.5e12, 10.0}, {2e12, 10.0}});
    }
    const Feasibility fz = feasibility_threshold(scenario_transmittances(s), s.env, s.keyrate);
    const bool expected = f >= 10e12;
    o.require(fz.feasible == expected, "f=" + fmt(f) + " zeta=" + fmt(fz.zeta) + " alpha=" + fmt(fz.alpha));
    if (o.detail.empty() && f == 1e12) o.detail = "zeta(1 THz)=" + fmt(fz.zeta);
  }
  return o;
}

// 2. Meters-scale MIMO curves, centimeter-scale SISO curves. The SISO
// "positive-rate range" uses the 1e-5 bit reporting floor, since with W = 1
// the rate is positive at every distance.
Outcome rate_distance_shape() {
  Outcome o;
  for (double f : kMimoFrequencies) {
    SweepSpec spec;
    spec.scenario = los_scenario(f, 32, 1.0);
    spec.grid = logspace(1.0, 20.0, 40);
    spec.methods = {RateMethod::large_modulation};
    const auto rows = sweep(spec);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      o.require(rows[i].ok() && rows[i].total_rate_bits > 0.0, "32x32 f=" + fmt(f) + " d=" + fmt(rows[i].parameter_value) + " not positive");
      if (i > 0) o.require(rows[i].total_rate_bits < rows[i - 1].total_rate_bits, "32x32 f=" + fmt(f) + " not decreasing");
    }
    const Scenario& s = spec.scenario;
    const double reach = max_distance(s, kTargetRate, RateMethod::large_modulation, min_physical_distance(s), 1e4).distance_m;
    o.require(reach > 1.0, "32x32 f=" + fmt(f) + " reach " + fmt(reach) + " m is not meters-scale");
  }
  std::string siso;
  for (double f : kSisoFrequencies) {
    const Scenario s = los_scenario(f, 1, 0.1);
    SweepSpec spec;
    spec.scenario = s;
    spec.grid = logspace(0.01, 0.5, 30);
    const auto rows = sweep(spec);
    for (std::size_t i = 1; i < rows.size(); ++i) {
      o.require(rows[i].ok() && rows[i].total_rate_bits < rows[i - 1].total_rate_bits, "SISO f=" + fmt(f) + " not decreasing");
    }
    const double reach = max_distance(s, kTargetRate, RateMethod::large_modulation, min_physical_distance(s), 1e4).distance_m;
    o.require(reach < 1.0 && reach >= 0.01, "SISO f=" + fmt(f) + " reach " + fmt(reach) + " m is not centimeter-scale");
    siso += (siso.empty() ? "" : ", ") + fmt(reach * 100.0) + " cm";
  }
  if (o.pass) o.detail = "SISO reach at 1e-5 bits: " + siso;
  return o;
}

// 3. Max distance at 1e-5 bits: ~160 m for 1024x1024 and ~10 m for 32x32 at 15 THz.
Outcome max_distance_anchors() {
  Outcome o;
  const Scenario big = los_scenario(15e12, 1024, 100.0);
  const double d_big = max_distance(big, kTargetRate, RateMethod::large_modulation, min_physical_distance(big), 1e4).distance_m;
  const Scenario small = los_scenario(15e12, 32, 10.0);
  const double d_small = max_distance(small, kTargetRate, RateMethod::large_modulation, min_physical_distance(small), 1e4).distance_m;
  o.require(std::abs(d_big / 160.0 - 1.0) <= 0.2, "1024x1024 gives " + fmt(d_big) + " m");
  o.require(std::abs(d_small / 10.0 - 1.0) <= 0.2, "32x32 gives " + fmt(d_small) + " m");
  if (o.pass) o.detail = "1024x1024: " + fmt(d_big) + " m, 32x32: " + fmt(d_small) + " m";
  return o;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// 4. Exact vs large-modulation vs Taylor.
Outcome approximation_hierarchy() {
  Outcome o;
  struct Point {
    double f;
    int n;
    std::vector<double> grid;
  };
  std::vector<Point> points;
  for (double f : kMimoFrequencies) points.push_back({f, 32, logspace(1.0, 20.0, 12)});
  for (double f : kSisoFrequencies) points.push_back({f, 1, logspace(0.01, 0.5, 12)});

  double worst_lm = 0.0, worst_taylor = 0.0;
  int checked = 0;
  for (const auto& p : points) {
    for (double d : p.grid) {
      const Scenario s = los_scenario(p.f, p.n, d);
      const double exact = scenario_rate(s, RateMethod::exact).total_rate_bits;
      if (!(exact > 0.0)) continue;
      const double lm = scenario_rate(s, RateMethod::large_modulation).total_rate_bits;
      const double taylor = scenario_rate(s, RateMethod::taylor).total_rate_bits;
      worst_lm = std::max(worst_lm, rel(lm, exact));
      worst_taylor = std::max(worst_taylor, rel(taylor, lm));
      ++checked;
    }
  }
  o.require(checked > 0, "no operating point with positive rate");
  o.require(worst_lm <= 0.05, "max |LM-exact|/exact = " + fmt(worst_lm));
  o.require(worst_taylor <= 0.05, "max |taylor-LM|/LM = " + fmt(worst_taylor));

  // Large modulation vs V_s at the same W = 1 operating point. There the
  // two routes agree analytically, so the error is roundoff of the exact
  // route, about eps * cond(cov) ~ eps * (2 Va)^2; anything below that counts as zero.
  const double v0 = vacuum_variance({15e12, 296.0, 1e3, 1.0});
  double worst_vs = 0.0;
  for (double t : {1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1}) {
    double prev = INFINITY;
    for (double vs : {1e2, 1e3, 1e4}) {
      const double va = vs + v0;
      const double e = rel(holevo_large_modulation(t, va, 1.0), holevo_exact(t, va, 1.0));
      worst_vs = std::max(worst_vs, e);
      const double roundoff = std::numeric_limits<double>::epsilon() * 4.0 * va * va;
      o.require(e <= std::max(prev, roundoff),
                "LM Holevo error grows to " + fmt(e) + " at T=" + fmt(t) + " Vs=" + fmt(vs));
      prev = e;
    }
  }

  // Taylor vs T.
  std::string taylor_errors;
  double prev = INFINITY;
  bool shrinking = true;
  for (double t : {1e-3, 1e-4, 1e-5, 1e-6}) {
    const double lm = rate_per_channel(t, 1e3, v0, 1.0, RateMethod::large_modulation);
    const double ty = rate_per_channel(t, 1e3, v0, 1.0, RateMethod::taylor);
    const double e = rel(ty, lm);
    taylor_errors += (taylor_errors.empty() ? "" : ", ") + fmt(e);
    if (!(e < prev)) shrinking = false;
    prev = e;
  }
  o.require(shrinking, "Taylor error vs T in {1e-3..1e-6} does not shrink: " + taylor_errors);
  if (o.pass) {
    o.detail = std::to_string(checked) + " points, max LM err " + fmt(worst_lm) + ", max Taylor err " +
               fmt(worst_taylor) + ", LM err over Vs <= " + fmt(worst_vs);
  }
  return o;
}

// 5. Symplectic invariants, TMSV purity, homodyne hand case, purity balance.
Outcome gaussian_invariants() {
  Outcome o;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const Eigen::MatrixXd omega = symplectic_form(2);
    Eigen::MatrixXd s = beam_splitter(u(rng)).matrix();
    const int one[] = {0};
    GaussianState probe = tensor_product(thermal_state(1.0 + 5.0 * u(rng)), thermal_state(1.0 + 5.0 * u(rng)));
    probe = apply(single_mode_squeezer(2.0 * u(rng) - 1.0), probe, one);
    const Eigen::MatrixXd sq = single_mode_squeezer(u(rng)).matrix();
    const Eigen::MatrixXd ph = phase_shift(6.28 * u(rng)).matrix();
    Eigen::MatrixXd local = Eigen::MatrixXd::Identity(4, 4);
    local.topLeftCorner(2, 2) = sq;
    local.bottomRightCorner(2, 2) = ph;
    s = local * s;
    const double err = (s * omega * s.transpose() - omega).norm();
    o.require(err < 1e-10, "symplectic form broken by " + fmt(err));
  }
  for (double w : {1.0, 1.01, 2.0, 50.0, 1e4}) {
    for (double nu : symplectic_eigenvalues(two_mode_squeezed(w))) {
      o.require(std::abs(nu - 1.0) <= 1e-8, "TMSV(" + fmt(w) + ") eigenvalue " + fmt(nu));
    }
    if (w > 1.0) {
      const Eigen::MatrixXd c = homodyne_condition(two_mode_squeezed(w), 1, Quadrature::q).cov();
      o.require(std::abs(c(0, 0) - 1.0 / w) < 1e-12 * w && std::abs(c(1, 1) - w) < 1e-12 * w &&
                    std::abs(c(0, 1)) < 1e-12 * w,
                "homodyne hand case W=" + fmt(w));
    }
  }
  std::uniform_real_distribution<double> t(0.001, 0.999), va(1.0, 1e4), w(1.0, 10.0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    GaussianState s = tensor_product(two_mode_squeezed(va(rng)), two_mode_squeezed(w(rng)));
    const int mixed[] = {1, 3};
    s = apply(beam_splitter(t(rng)), s, mixed);
    const int bob[] = {0, 1}, eve[] = {2, 3};
    worst = std::max(worst, std::abs(von_neumann_entropy(partial_trace(s, bob)) -
                                     von_neumann_entropy(partial_trace(s, eve))));
  }
  o.require(worst <= 1e-6, "purity balance off by " + fmt(worst) + " bits");
  if (o.pass) o.detail = "purity balance worst " + fmt(worst) + " bits";
  return o;
}

// 6. Monte Carlo at 1e6 rounds on 5 random operating points, plus determinism.
Outcome monte_carlo() {
  Outcome o;
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> logt(-5.0, 0.0), f(10e12, 30e12), vs(1e2, 1e4), w(1.0, 3.0);
  std::string first_csv;
  for (int i = 0; i < 5; ++i) {
    const double t = std::pow(10.0, logt(rng));
    const EnvironmentParams env{f(rng), 296.0, vs(rng), w(rng)};
    const ProtocolRun run = simulate(std::vector<double>{t}, env, 1000000, 1000 + i);
    for (const auto& row : mc_validate(run)) {
      o.require(row.within_3se, "T=" + fmt(t) + ": var " + fmt(row.var_bob) + " vs " + fmt(row.var_bob_expected) +
                                    ", MI " + fmt(row.mi_bits) + " vs " + fmt(row.mi_expected_bits));
    }
  }
  Scenario s = los_scenario(15e12, 32, 5.0);
  const auto t = scenario_transmittances(s);
  const auto csv = [&] {
    const ProtocolRun run = simulate(t, s.env, 100000, 42);
    return to_csv(mc_table(s, run, mc_validate(run)));
  };
  o.require(csv() == csv(), "identical seeds gave different CSV output");
  return o;
}

// 7. T_1 = gamma(N = 1) * N_t N_r for a broadside LoS path.
Outcome beamforming_gain() {
  Outcome o;
  const EnvironmentParams env{15e12, 296.0, 1e3, 1.0};
  const auto table = AbsorptionTable::default_terahertz();
  PathSpec los;
  los.length_m = 3.0;
  los.delay_s = 1e-8;
  los.aod_rad = 0.2;
  los.aoa_rad = -0.4;
  const std::vector<PathSpec> paths{los};
  const auto t1 = [&](int nt, int nr) {
    return decompose(build_channel(paths, env, {nt, nr, 1000.0, 0.5}, table)).transmittances.front();
  };
  const double base = t1(1, 1);
  double worst = 0.0;
  for (int nt = 1; nt <= 64; nt *= 2) {
    for (int nr = 1; nr <= 64; nr *= 2) {
      worst = std::max(worst, rel(t1(nt, nr), base * nt * nr));
    }
  }
  o.require(worst <= 1e-12, "worst relative error " + fmt(worst));
  if (o.pass) o.detail = "worst relative error " + fmt(worst);
  return o;
}

// 8. Upward jump in max distance across the 14 THz band edge.
Outcome band_edge() {
  Outcome o;
  const auto grid = default_frequency_grid();
  for (int n : {32, 1024}) {
    const auto profile = frequency_profile(los_scenario(15e12, n, 10.0), kTargetRate, RateMethod::large_modulation, grid);
    std::size_t edge = 0;
    while (edge + 1 < grid.size() && grid[edge + 1] <= 14e12 + 1.0) ++edge;
    const auto& below = profile[edge];
    const auto& above = profile[edge + 1];
    if (!below.max_distance_m || !above.max_distance_m) {
      o.require(false, std::to_string(n) + "x" + std::to_string(n) + " missing point at the edge");
      continue;
    }
    const double jump = *above.max_distance_m / *below.max_distance_m - 1.0;
    // every other step, skipping the 10 THz point which has its own band
    double largest_other = 0.0;
    for (std::size_t i = 2; i < profile.size(); ++i) {
      if (i == edge + 1 || !profile[i].max_distance_m || !profile[i - 1].max_distance_m) continue;
      largest_other = std::max(largest_other, std::abs(*profile[i].max_distance_m / *profile[i - 1].max_distance_m - 1.0));
    }
    const std::string label = std::to_string(n) + "x" + std::to_string(n);
    o.require(jump > 0.0 && jump > largest_other,
              label + " step across 14 THz " + fmt(jump) + " vs largest other step " + fmt(largest_other));
    o.detail += (o.detail.empty() ? "" : ", ") + label + ": " + fmt(*below.max_distance_m) + " -> " +
                fmt(*above.max_distance_m) + " m (other steps <= " + fmt(100.0 * largest_other) + "%)";
  }
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "feasibility window", 1.0, feasibility_window},
      {2, "rate-vs-distance shape", 10.0, rate_distance_shape},
      {3, "max-distance anchors", 30.0, max_distance_anchors},
      {4, "approximation hierarchy", 60.0, approximation_hierarchy},
      {5, "gaussian-core invariants", 10.0, gaussian_invariants},
      {6, "monte carlo consistency", 60.0, monte_carlo},
      {7, "beamforming gain law", 1.0, beamforming_gain},
      {8, "band-edge discontinuity", 30.0, band_edge},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& c : all) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.budget_s) {
      o.pass = false;
      o.detail += (o.detail.empty() ? "" : "; ") + std::string("over time budget");
    }
    std::printf("%s criterion %d (%s) [%.2fs]%s%s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs,
                o.detail.empty() ? "" : ": ", o.detail.c_str());
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
