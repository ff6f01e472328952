#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "thzqkd/error.hpp"
#include "thzqkd/keyrate.hpp"
#include "thzqkd/protocol_mc.hpp"

using namespace thzqkd;

namespace {

const EnvironmentParams kEnv{15e12, 296.0, 1e3, 1.0};

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("identical seeds give identical runs, different seeds differ") {
  const std::vector<double> t{0.3, 1e-3};
  const ProtocolRun a = simulate(t, kEnv, 1000, 42);
  const ProtocolRun b = simulate(t, kEnv, 1000, 42);
  const ProtocolRun c = simulate(t, kEnv, 1000, 43);
  for (std::size_t k = 0; k < t.size(); ++k) {
    CHECK(a.channels[k].x_bob == b.channels[k].x_bob);
    CHECK(a.channels[k].x_alice == b.channels[k].x_alice);
    CHECK(a.channels[k].quadrature == b.channels[k].quadrature);
    CHECK(a.channels[k].x_bob != c.channels[k].x_bob);
  }
  // channels use independent streams
  CHECK(a.channels[0].x_alice != a.channels[1].x_alice);
}

TEST_CASE("first draws are pinned") {
  // guards against silent changes of the generator or the normal transform
  const ProtocolRun r = simulate(std::vector<double>{0.5}, kEnv, 3, 42);
  const auto& ch = r.channels[0];
  CHECK(ch.x_alice[0] == doctest::Approx(33.301995387981364).epsilon(1e-14));
  CHECK(ch.x_alice[1] == doctest::Approx(0.48527896921014224).epsilon(1e-14));
  CHECK(ch.x_alice[2] == doctest::Approx(4.6552224355653271).epsilon(1e-14));
  CHECK(ch.x_bob[1] == doctest::Approx(-1.6599514931135544).epsilon(1e-14));
  CHECK(ch.x_eve[2] == doctest::Approx(-2.032623185148883).epsilon(1e-14));
  CHECK(ch.quadrature[0] == Quadrature::q);
}

TEST_CASE("sample statistics") {
  const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
  CHECK(sample_mean(x) == 2.5);
  CHECK(sample_variance(x) == doctest::Approx(5.0 / 3.0));
  const std::vector<double> y{2.0, 4.0, 6.0, 8.0};
  CHECK(sample_covariance(x, y) == doctest::Approx(10.0 / 3.0));
  CHECK_THROWS_AS(sample_variance(std::vector<double>{1.0}), DomainError);
  CHECK_THROWS_AS(sample_covariance(x, std::vector<double>{1.0}), DomainError);
}

TEST_CASE("variances match the channel model within 4 sigma") {
  const std::uint64_t n = 200000;
  for (double t : {1e-4, 0.02, 0.5, 0.97}) {
    const ProtocolRun run = simulate(std::vector<double>{t}, kEnv, n, 7);
    const auto& ch = run.channels[0];
    const double va = run.signal_variance + run.vacuum_variance;
    const double expected_a = run.signal_variance;
    const double expected_b = t * va + (1.0 - t) * run.eve_noise;
    const double se = std::sqrt(2.0 / (n - 1.0));
    CHECK(std::abs(sample_variance(ch.x_alice) - expected_a) < 4.0 * se * expected_a);
    CHECK(std::abs(sample_variance(ch.x_bob) - expected_b) < 4.0 * se * expected_b);
    const MutualInfoEstimate mi = estimate_mutual_information(ch.x_alice, ch.x_bob);
    const double exact = mutual_information(t, run.signal_variance, run.vacuum_variance, run.eve_noise);
    CHECK(std::abs(mi.bits - exact) < 4.0 * mi.standard_error + 1e-4);
  }
}

TEST_CASE("Eve's samples follow the beam-splitter algebra") {
  const std::uint64_t n = 200000;
  SUBCASE("T = 1 leaves Eve uncorrelated with Alice") {
    const ProtocolRun run = simulate(std::vector<double>{1.0}, kEnv, n, 5);
    const auto eve = eve_ancilla_samples(run)[0];
    const auto& a = run.channels[0].x_alice;
    const double rho = sample_covariance(a, eve) / std::sqrt(sample_variance(a) * sample_variance(eve));
    CHECK(std::abs(rho) < 4.0 / std::sqrt(double(n)));
  }
  SUBCASE("T = 0 sends Alice's mode to Eve with a sign flip") {
    const ProtocolRun run = simulate(std::vector<double>{0.0}, kEnv, n, 5);
    const auto eve = eve_ancilla_samples(run)[0];
    const auto& a = run.channels[0].x_alice;
    const double rho = sample_covariance(a, eve) / std::sqrt(sample_variance(a) * sample_variance(eve));
    const double expected = -std::sqrt(run.signal_variance / (run.signal_variance + run.vacuum_variance));
    CHECK(rho == doctest::Approx(expected).epsilon(2e-3));
  }
  SUBCASE("Bob-Eve covariance") {
    const double t = 0.3;
    const EnvironmentParams noisy{15e12, 296.0, 1e3, 3.0};
    const ProtocolRun run = simulate(std::vector<double>{t}, noisy, n, 9);
    const auto& ch = run.channels[0];
    const double va = run.signal_variance + run.vacuum_variance;
    const double expected = std::sqrt(t * (1.0 - t)) * (run.eve_noise - va);
    CHECK(sample_covariance(ch.x_bob, ch.x_eve) == doctest::Approx(expected).epsilon(0.02));
  }
}

TEST_CASE("mutual information does not depend on the selected quadrature") {
  const ProtocolRun run = simulate(std::vector<double>{0.05}, kEnv, 400000, 17);
  const auto& ch = run.channels[0];
  std::vector<double> aq, bq, ap, bp;
  for (std::size_t i = 0; i < ch.x_alice.size(); ++i) {
    (ch.quadrature[i] == Quadrature::q ? aq : ap).push_back(ch.x_alice[i]);
    (ch.quadrature[i] == Quadrature::q ? bq : bp).push_back(ch.x_bob[i]);
  }
  CHECK(aq.size() > 190000);
  CHECK(ap.size() > 190000);
  const auto mq = estimate_mutual_information(aq, bq);
  const auto mp = estimate_mutual_information(ap, bp);
  CHECK(std::abs(mq.bits - mp.bits) < 4.0 * std::hypot(mq.standard_error, mp.standard_error));
}

TEST_CASE("empirical mutual information needs enough rounds") {
  CHECK_THROWS_AS(empirical_mutual_information(simulate(std::vector<double>{0.1}, kEnv, 100, 1)),
                  DomainError);
  CHECK(empirical_mutual_information(simulate(std::vector<double>{0.1, 0.2}, kEnv, 10000, 1)).size() == 2);
}

TEST_CASE("raw sample dump is deterministic") {
  const auto dir = std::filesystem::temp_directory_path();
  const auto p1 = dir / "thzqkd_samples_1.csv";
  const auto p2 = dir / "thzqkd_samples_2.csv";
  write_samples_csv(simulate(std::vector<double>{0.2}, kEnv, 50, 3), p1);
  write_samples_csv(simulate(std::vector<double>{0.2}, kEnv, 50, 3), p2);
  const std::string a = slurp(p1);
  CHECK(a == slurp(p2));
  CHECK(a.find("round,channel,quadrature,x_alice,x_bob\n") != std::string::npos);
  std::filesystem::remove(p1);
  std::filesystem::remove(p2);
}

TEST_CASE("simulate validates inputs") {
  CHECK_THROWS_AS(simulate(std::vector<double>{1.5}, kEnv, 10, 1), DomainError);
  CHECK_THROWS_AS(simulate(std::vector<double>{0.5}, kEnv, 0, 1), DomainError);
}
