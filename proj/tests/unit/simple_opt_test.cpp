#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "etest/errors.hpp"
#include "etest/simple_opt.hpp"

using namespace etest;

namespace {

const auto kP = FiniteDistribution::from_probs({0.5, 0.5});
const auto kQ = FiniteDistribution::from_probs({0.9, 0.1});

std::vector<double> random_probs(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> p(n);
  double t = 0.0;
  for (double& v : p) t += (v = u(rng));
  for (double& v : p) v /= t;
  return p;
}

}  // namespace

TEST_SUITE("simple_opt") {
  TEST_CASE("candidate family") {
    const auto c1 = candidate(1.0, kP, kQ, Utility::log(), Level(0.0));
    CHECK(c1.values()[0] == doctest::Approx(1.8));
    CHECK(c1.values()[1] == doctest::Approx(0.2));
    const auto c2 = candidate(0.6, kP, kQ, Utility::log(), Level(0.6));
    CHECK(c2.values()[0] == doctest::Approx(1.0 / 0.6));
    CHECK(c2.values()[1] == doctest::Approx(1.0 / 3.0));
    const auto c3 = candidate(1.0, FiniteDistribution::from_probs({1.0, 0.0}), FiniteDistribution::from_probs({0.5, 0.5}),
                              Utility::log(), Level(0.05));
    CHECK(c3.values()[0] == doctest::Approx(0.5));
    CHECK(c3.values()[1] == 20.0);
    const auto c0 = candidate(0.0, kP, kQ, Utility::log(), Level(0.25));
    CHECK(c0.values()[0] == 4.0);
    CHECK_THROWS_AS(candidate(1.0, kP, kQ, Utility::power(1.0), Level(0.5)), InputError);
  }

  TEST_CASE("both-zero and alternative-free outcomes") {
    const FiniteDistribution p({"a", "b", "c"}, {0.5, 0.5, 0.0});
    const FiniteDistribution q({"a", "b", "c"}, {1.0, 0.0, 0.0});
    const auto c = candidate(1.0, p, q, Utility::log(), Level(0.1));
    CHECK(c.values()[1] == 0.0);
    CHECK(c.values()[2] == 0.0);
  }

  TEST_CASE("multiplier search") {
    CHECK(solve_lambda(kP, kQ, Utility::log(), Level(0.0)).lambda == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(solve_lambda(kP, kQ, Utility::log(), Level(0.6)).lambda == doctest::Approx(0.6).epsilon(1e-10));
    CHECK(solve_lambda(kP, kP, Utility::power(0.5), Level(1.0)).lambda == 0.0);
    CHECK(solve_lambda(kP, kP, Utility::log(), Level(1.0)).lambda == 0.0);
  }

  TEST_CASE("optimal tests") {
    const auto log0 = optimal_simple(kP, kQ, Utility::log(), Level(0.0));
    CHECK(log0.test.values()[0] == doctest::Approx(1.8));
    CHECK(log0.test.values()[1] == doctest::Approx(0.2));
    CHECK(log0.objective == doctest::Approx(0.9 * std::log(1.8) + 0.1 * std::log(0.2)));
    CHECK(log0.objective == doctest::Approx(0.3681).epsilon(1e-4));

    const auto log6 = optimal_simple(kP, kQ, Utility::log(), Level(0.6));
    CHECK(log6.test.values()[0] == doctest::Approx(1.6667).epsilon(1e-4));
    CHECK(log6.test.values()[1] == doctest::Approx(0.3333).epsilon(1e-4));

    // LR^(1/2) normalized: (sqrt 1.8, sqrt 0.2) / E_P  =  (1.5, 0.5)
    const auto neg = optimal_simple(kP, kQ, Utility::power(-1.0), Level(0.0));
    CHECK(neg.test.values()[0] == doctest::Approx(1.5).epsilon(1e-9));
    CHECK(neg.test.values()[1] == doctest::Approx(0.5).epsilon(1e-9));
    const auto oracle = brute_force_oracle(kP, kQ, Utility::power(-1.0), Level(0.0), 101);
    CHECK(neg.objective >= oracle.objective - 1e-3);
    REQUIRE(neg.inflation);
    CHECK(*neg.inflation * std::sqrt(1.8) == doctest::Approx(1.5).epsilon(1e-9));
  }

  TEST_CASE("linear utility routes to Neyman-Pearson") {
    const auto s = optimal_simple(kP, kQ, Utility::power(1.0), Level(0.25));
    REQUIRE(s.boundary);
    CHECK(s.boundary->critical_value == doctest::Approx(1.8));
    CHECK(s.boundary->boundary_value == 2.0);
    CHECK(s.objective == doctest::Approx(0.8));
    CHECK_THROWS_AS(optimal_simple(kP, kQ, Utility::power(1.0), Level(0.0)), FrameworkViolation);
  }

  TEST_CASE("Neyman-Pearson") {
    const auto np = neyman_pearson(kP, kQ, 0.25);
    CHECK(np.test.values()[0] == 2.0);
    CHECK(np.test.values()[1] == 0.0);
    CHECK(np.power == 1.8);
    // ties share one boundary value
    const auto tie = neyman_pearson(kP, kP, 0.5);
    CHECK(tie.test.values()[0] == 1.0);
    CHECK(tie.test.values()[1] == 1.0);
    CHECK(expectation(kP, tie.test.values()) == 1.0);
    const auto full = neyman_pearson(kP, kQ, 1.0);
    CHECK(full.test.values()[0] == 1.0);
    CHECK(full.test.values()[1] == 1.0);
    // null-free alternative mass takes the cap
    const FiniteDistribution p({"a", "b", "c"}, {0.5, 0.5, 0.0});
    const FiniteDistribution q({"a", "b", "c"}, {0.4, 0.1, 0.5});
    const auto z = neyman_pearson(p, q, 0.5);
    CHECK(z.test.values()[2] == 2.0);
    CHECK(expectation(p, z.test.values()) == doctest::Approx(1.0));
    CHECK_THROWS_AS(neyman_pearson(kP, kQ, 0.0), InputError);
  }

  TEST_CASE("existence failure is reported") {
    // h > 0 at level 0 with alternative-only support: the multiplier search has no bracket
    const FiniteDistribution p({"a", "b"}, {1.0, 0.0});
    const FiniteDistribution q({"a", "b"}, {0.5, 0.5});
    CHECK(optimal_simple(p, q, Utility::power(0.5), Level(0.0)).lambda_star > 0.0);
    CHECK_FALSE(admissibility(Utility::power(0.5), 0.0).admissible);
  }

  TEST_CASE("brute-force oracle") {
    const auto log0 = optimal_simple(kP, kQ, Utility::log(), Level(0.0));
    CHECK(brute_force_oracle(kP, kQ, Utility::log(), Level(0.0), 101).objective <= log0.objective + 1e-12);
    CHECK(brute_force_oracle(kP, kQ, Utility::log(), Level(0.0), 101).objective >= log0.objective - 1e-3);
    const auto flat = brute_force_oracle(kP, kP, Utility::log(), Level(0.5), 101);
    CHECK(flat.values[0] == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(flat.values[1] == doctest::Approx(1.0).epsilon(1e-3));
    const auto lin = brute_force_oracle(kP, kQ, Utility::power(1.0), Level(0.25), 101);
    CHECK(lin.objective + 1.0 == doctest::Approx(1.8).epsilon(1e-3));
    CHECK_THROWS_AS(brute_force_oracle(FiniteDistribution::from_probs(std::vector<double>(7, 1.0 / 7)),
                                       FiniteDistribution::from_probs(std::vector<double>(7, 1.0 / 7)),
                                       Utility::log(), Level(0.5), 11),
                    InputError);
  }

  TEST_CASE("validity, tightness, monotone structure and oracle dominance") {
    std::mt19937_64 rng(101);
    const double hs[] = {-1.0, 0.0, 0.5};
    for (int k = 0; k < 150; ++k) {
      const std::size_t n = 2 + rng() % 2;
      const double h = hs[rng() % 3];
      const double alpha = h <= 0.0 && k % 3 == 0 ? 0.0 : 0.05 + 0.9 * (rng() % 100) / 100.0;
      const auto p = FiniteDistribution::from_probs(random_probs(rng, n));
      const auto q = FiniteDistribution::from_probs(random_probs(rng, n));
      const auto s = optimal_simple(p, q, Utility::power(h), Level(alpha));
      const std::vector<FiniteDistribution> null = {p};
      CHECK(check_validity_exact(s.test, null).valid);
      if (s.lambda_star > 0.0) CHECK(std::abs(expectation(p, s.test.values()) - 1.0) <= 1e-9);
      const auto lr = likelihood_ratio(p, q).values;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (lr[i] < lr[j]) CHECK(s.test.values()[i] <= s.test.values()[j] * (1.0 + 1e-12));
      const auto oracle = brute_force_oracle(p, q, Utility::power(h), Level(alpha), 101);
      CHECK(s.objective >= oracle.objective - 1e-3);
    }
  }

  TEST_CASE("capping the level-0 optimum loses the inflation") {
    std::mt19937_64 rng(7);
    int compared = 0;
    for (int k = 0; k < 200; ++k) {
      const auto p = FiniteDistribution::from_probs(random_probs(rng, 3));
      const auto q = FiniteDistribution::from_probs(random_probs(rng, 3));
      const double alpha = 0.2 + 0.6 * (rng() % 100) / 100.0;
      const auto capped = optimal_simple(p, q, Utility::log(), Level(alpha));
      const auto free = optimal_simple(p, q, Utility::log(), Level(0.0));
      if (!(capped.lambda_star < free.lambda_star)) continue;
      std::vector<double> rounded(free.test.values().begin(), free.test.values().end());
      for (double& v : rounded) v = std::min(v, 1.0 / alpha);
      CHECK(capped.objective > expected_utility(q, rounded, Utility::log()));
      ++compared;
    }
    CHECK(compared > 20);
  }
}
