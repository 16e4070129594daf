#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "etest/composite_opt.hpp"
#include "etest/errors.hpp"
#include "etest/simple_opt.hpp"

using namespace etest;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const auto kQ = FiniteDistribution::from_probs({0.9, 0.1});
const std::vector<FiniteDistribution> kPair = {FiniteDistribution::from_probs({0.6, 0.4}),
                                               FiniteDistribution::from_probs({0.4, 0.6})};

CompositeProblem pair_problem() { return {kPair, kQ, Level(0.0), Utility::log()}; }

std::vector<double> random_probs(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.1, 1.0);
  std::vector<double> p(n);
  double t = 0.0;
  for (double& v : p) t += (v = u(rng));
  for (double& v : p) v /= t;
  return p;
}

}  // namespace

TEST_SUITE("composite_opt") {
  TEST_CASE("two-member log example") {
    const auto prob = pair_problem();
    const auto s = solve_composite(prob);
    CHECK(s.values[0] == doctest::Approx(1.5).epsilon(1e-6));
    CHECK(s.values[1] == doctest::Approx(0.25).epsilon(1e-6));
    CHECK(s.objective == doctest::Approx(0.9 * std::log(1.5) + 0.1 * std::log(0.25)));
    CHECK(s.objective == doctest::Approx(0.2263).epsilon(1e-4));
    CHECK(s.foc_slack <= 1e-8);
    REQUIRE(s.duality_gap);
    CHECK(*s.duality_gap <= 1e-8);
    CHECK(s.ripr.mass[0] == doctest::Approx(0.6).epsilon(1e-8));
    CHECK(s.ripr.mass[1] == doctest::Approx(0.4).epsilon(1e-8));
    CHECK(s.ripr.total_mass == doctest::Approx(1.0));
    CHECK(check_validity_exact(s.test(prob), kPair).valid);
  }

  TEST_CASE("first-order condition detects suboptimality") {
    const auto prob = pair_problem();
    CHECK(std::abs(verify_foc(std::vector<double>{1.5, 0.25}, prob)) <= 1e-8);
    CHECK(verify_foc(std::vector<double>{1.35, 0.225}, prob) > 1e-3);
    const CompositeProblem lin{{FiniteDistribution::from_probs({0.5, 0.5})}, kQ, Level(0.25), Utility::power(1.0)};
    CHECK(std::abs(verify_foc(std::vector<double>{2.0, 0.0}, lin)) <= 1e-12);
    CHECK(verify_foc(std::vector<double>{1.0, 1.0}, lin) == doctest::Approx(0.8));
  }

  TEST_CASE("reverse projection") {
    const auto prob = pair_problem();
    const std::vector<double> opt = {1.5, 0.25};
    const auto r = ripr(opt, prob);
    // log case: eps = lambda dQ/dP* with lambda = 1
    for (std::size_t i = 0; i < 2; ++i) CHECK(kQ[i] / r.mass[i] == doctest::Approx(opt[i]).epsilon(1e-12));
    CHECK(effective_membership(std::span<const double>(r.mass), kPair, Level(0.0)).member);
    CHECK_THROWS(ripr(std::vector<double>{1.5, 0.0}, prob));

    const auto p = FiniteDistribution::from_probs({0.3, 0.7});
    const CompositeProblem simple{{p}, kQ, Level(0.0), Utility::log()};
    const auto rs = solve_composite(simple).ripr;
    CHECK(rs.mass[0] == doctest::Approx(0.3).epsilon(1e-8));
    CHECK(rs.mass[1] == doctest::Approx(0.7).epsilon(1e-8));
  }

  TEST_CASE("effective membership") {
    const auto in = effective_membership(kPair[0], kPair, Level(0.0));
    CHECK(in.member);
    CHECK(in.value == doctest::Approx(1.0));
    const auto out = effective_membership(kQ, kPair, Level(0.0));
    CHECK_FALSE(out.member);
    CHECK(out.value == doctest::Approx(1.5).epsilon(1e-9));
    // mass where no null puts any: unbounded at level 0, capped otherwise
    const std::vector<FiniteDistribution> thin = {FiniteDistribution({"a", "b"}, {1.0, 0.0})};
    const auto cand = FiniteDistribution({"a", "b"}, {0.5, 0.5});
    const auto unbounded = effective_membership(cand, thin, Level(0.0));
    CHECK_FALSE(unbounded.member);
    CHECK(unbounded.value == kInf);
    CHECK(effective_membership(cand, thin, Level(0.5)).value == doctest::Approx(1.5));
  }

  TEST_CASE("Renyi divergence and testing distance") {
    const auto half = FiniteDistribution::from_probs({0.5, 0.5});
    CHECK(renyi_divergence(kQ, half, 1.0) == doctest::Approx(0.9 * std::log(1.8) + 0.1 * std::log(0.2)));
    CHECK(renyi_divergence(kQ, half, 1.0) == doctest::Approx(0.3681).epsilon(1e-4));
    CHECK(renyi_divergence(kQ, kPair[0], 1.0) == doctest::Approx(0.2263).epsilon(1e-4));
    CHECK(renyi_divergence(kQ, half, kInf) == doctest::Approx(std::log(1.8)));
    CHECK(renyi_divergence(kQ, half, 2.0) == doctest::Approx(std::log(0.81 / 0.5 + 0.01 / 0.5)));
    CHECK(renyi_divergence(kQ, half, 0.5) == doctest::Approx(-2.0 * std::log(std::sqrt(0.45) + std::sqrt(0.05))));
    // orders approach KL from both sides
    CHECK(renyi_divergence(kQ, half, 1.0 + 1e-6) == doctest::Approx(renyi_divergence(kQ, half, 1.0)).epsilon(1e-5));
    CHECK(renyi_divergence(kQ, half, 1.0 - 1e-6) == doctest::Approx(renyi_divergence(kQ, half, 1.0)).epsilon(1e-5));
    const auto point = FiniteDistribution({"a", "b"}, {1.0, 0.0});
    CHECK(renyi_divergence(half, point, 1.0) == kInf);

    CHECK(testing_distance(kQ, half) == doctest::Approx(1.8));
    CHECK(testing_distance(kQ, kQ) == doctest::Approx(1.0));
    CHECK(testing_distance(point, half) == doctest::Approx(2.0));
    CHECK(testing_distance(half, point) == kInf);
  }

  TEST_CASE("duality gap") {
    const auto prob = pair_problem();
    const std::vector<double> opt = {1.5, 0.25};
    CHECK(duality_gap(opt, std::vector<double>{0.6, 0.4}, prob) <= 1e-8);
    CHECK(duality_gap(opt, std::vector<double>{0.4, 0.6}, prob) > 1e-3);
    const auto half = FiniteDistribution::from_probs({0.5, 0.5});
    const CompositeProblem simple{{half}, kQ, Level(0.0), Utility::log()};
    CHECK(duality_gap(std::vector<double>{1.8, 0.2}, std::vector<double>{0.5, 0.5}, simple) <= 1e-12);
  }

  TEST_CASE("linear limit") {
    const auto half = FiniteDistribution::from_probs({0.5, 0.5});
    const auto lim = np_limit({half}, kQ, 0.25, {0.9, 0.99, 0.999});
    CHECK(lim.lp_power == doctest::Approx(1.8));
    CHECK(lim.lp_test[0] == doctest::Approx(2.0));
    CHECK(lim.lp_test[1] == doctest::Approx(0.0));
    CHECK(lim.deviation < 1e-2);
    for (std::size_t i = 1; i < lim.powers.size(); ++i) CHECK(lim.powers[i] >= lim.powers[i - 1] - 1e-9);

    const auto two = np_limit(kPair, kQ, 0.25, {0.5, 0.9, 0.99, 0.999});
    for (std::size_t i = 1; i < two.powers.size(); ++i) CHECK(two.powers[i] >= two.powers[i - 1] - 1e-9);
    CHECK(two.powers.back() <= two.lp_power + 1e-9);
    CHECK(two.deviation < 0.05);
    CHECK_THROWS_AS(np_limit({half}, kQ, 0.0, {0.9}), InputError);

    const CompositeProblem direct{{half}, kQ, Level(0.25), Utility::power(1.0)};
    const auto s = solve_composite(direct);
    CHECK(s.values[0] == doctest::Approx(2.0));
    CHECK(s.values[1] == doctest::Approx(0.0));
  }

  TEST_CASE("problem validation") {
    CHECK_THROWS_AS(solve_composite({kPair, kQ, Level(0.0), Utility::power(0.5)}), FrameworkViolation);
    CHECK_THROWS_AS(solve_composite({{}, kQ, Level(0.1), Utility::log()}), InputError);
    const std::vector<FiniteDistribution> wrong = {FiniteDistribution::from_probs({0.2, 0.3, 0.5})};
    CHECK_THROWS_AS(solve_composite({wrong, kQ, Level(0.1), Utility::log()}), InputError);
  }

  TEST_CASE("random instances: validity, positivity, projection, reduction") {
    std::mt19937_64 rng(2718);
    const double hs[] = {-1.0, 0.0, 0.5};
    for (int k = 0; k < 60; ++k) {
      const std::size_t n = 2 + rng() % 4;
      const std::size_t m = 1 + rng() % 4;
      const double h = hs[rng() % 3];
      std::vector<double> alphas = {0.1, 0.5};
      if (h <= 0.0) alphas.push_back(0.0);
      const double alpha = alphas[rng() % alphas.size()];
      std::vector<FiniteDistribution> nulls;
      for (std::size_t j = 0; j < m; ++j) nulls.push_back(FiniteDistribution::from_probs(random_probs(rng, n)));
      const CompositeProblem prob{nulls, FiniteDistribution::from_probs(random_probs(rng, n)), Level(alpha),
                                  Utility::power(h)};
      SolverOptions opt;
      opt.seed = static_cast<std::uint64_t>(k);
      const auto s = solve_composite(prob, opt);
      CHECK(s.foc_slack <= 1e-6);
      CHECK(s.restart_spread <= 1e-6);
      const auto report = check_validity_exact(s.test(prob), nulls);
      CHECK(report.max_expectation <= 1.0 + 1e-8);
      for (double v : s.values) {
        CHECK(v > 0.0);
        CHECK(v <= Level(alpha).cap() * (1.0 + 1e-12));
      }
      CHECK(effective_membership(std::span<const double>(s.ripr.mass), nulls, Level(alpha)).value <= 1.0 + 1e-6);
      if (h == 0.0 && alpha == 0.0) {
        const auto p_star = FiniteDistribution::from_probs(s.ripr.mass);
        CHECK(std::exp(s.objective) == doctest::Approx(std::exp(renyi_divergence(prob.alternative, p_star, 1.0))).epsilon(1e-6));
      }
      if (m == 1) {
        const auto simple = optimal_simple(nulls[0], prob.alternative, prob.utility, prob.level);
        for (std::size_t i = 0; i < n; ++i)
          CHECK(s.values[i] == doctest::Approx(simple.test.values()[i]).epsilon(1e-6));
      }
    }
  }
}
