#include <doctest.h>

#include <cmath>
#include <limits>

#include "etest/errors.hpp"
#include "etest/measure.hpp"

using namespace etest;

TEST_SUITE("measure") {
  TEST_CASE("distribution validation") {
    CHECK_NOTHROW(FiniteDistribution({"a", "b"}, {0.5, 0.5}));
    CHECK_THROWS_AS(FiniteDistribution({"a", "b"}, {0.5, 0.6}), InputError);
    CHECK_THROWS_AS(FiniteDistribution({"a", "a"}, {0.5, 0.5}), InputError);
    CHECK_THROWS_AS(FiniteDistribution({"a", "b"}, {1.5, -0.5}), InputError);
    CHECK_THROWS_AS(FiniteDistribution({"a"}, {0.5, 0.5}), InputError);
    CHECK_THROWS_AS(FiniteDistribution({}, {}), InputError);
    // within the 1e-12 window but never renormalized
    const FiniteDistribution near({"a", "b"}, {0.5, 0.5 + 5e-13});
    CHECK(near[1] == 0.5 + 5e-13);
  }

  TEST_CASE("default labels") {
    const auto d = FiniteDistribution::from_probs({0.2, 0.3, 0.5});
    CHECK(d.outcomes() == std::vector<std::string>{"a", "b", "c"});
    CHECK(d.index_of("c") == 2);
    CHECK(FiniteDistribution::default_labels(28)[27] == "o27");
  }

  TEST_CASE("likelihood ratio cases") {
    const FiniteDistribution p({"a", "b", "c", "d"}, {0.5, 0.5, 0.0, 0.0});
    const FiniteDistribution q({"a", "b", "c", "d"}, {0.9, 0.0, 0.1, 0.0});
    const auto lr = likelihood_ratio(p, q);
    CHECK(lr.values[0] == doctest::Approx(1.8));
    CHECK(lr.values[1] == 0.0);
    CHECK(std::isinf(lr.values[2]));
    CHECK(lr.arbitrary[3]);
    CHECK_FALSE(lr.arbitrary[0]);
    CHECK(lr.resolved()[3] == 0.0);
  }

  TEST_CASE("support partition") {
    const FiniteDistribution p({"a", "b", "c", "d"}, {0.5, 0.5, 0.0, 0.0});
    const FiniteDistribution q({"a", "b", "c", "d"}, {0.9, 0.0, 0.1, 0.0});
    const auto s = support_partition(p, q);
    CHECK(s.common == std::vector<std::size_t>{0});
    CHECK(s.p_only == std::vector<std::size_t>{1});
    CHECK(s.q_only == std::vector<std::size_t>{2});
    CHECK(s.neither == std::vector<std::size_t>{3});
  }

  TEST_CASE("mismatched spaces are rejected") {
    const FiniteDistribution p({"a", "b"}, {0.5, 0.5});
    const FiniteDistribution q({"x", "y"}, {0.5, 0.5});
    CHECK_THROWS_AS(likelihood_ratio(p, q), ModelMismatch);
  }

  TEST_CASE("expectation treats 0 * inf as 0") {
    const auto p = FiniteDistribution::from_probs({1.0, 0.0});
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(expectation(p, std::vector<double>{2.0, inf}) == 2.0);
  }

  TEST_CASE("sampling frequencies") {
    const auto p = FiniteDistribution::from_probs({0.2, 0.0, 0.8});
    std::mt19937_64 rng(5);
    int counts[3] = {0, 0, 0};
    for (int i = 0; i < 20000; ++i) ++counts[p.sample(rng)];
    CHECK(counts[1] == 0);
    CHECK(counts[0] / 20000.0 == doctest::Approx(0.2).epsilon(0.05));
  }

  TEST_CASE("gaussian location") {
    CHECK_THROWS_AS(GaussianLocation(0.0, 0.0), InputError);
    const GaussianLocation g(0.0, 1.0);
    CHECK(g.pdf(0.0) == doctest::Approx(0.3989422804014327));
  }
}
