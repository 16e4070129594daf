#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "etest/composite_opt.hpp"
#include "etest/errors.hpp"
#include "etest/sequential.hpp"

using namespace etest;

namespace {

const auto kFair = FiniteDistribution::from_probs({0.5, 0.5});
const StreamModel kStream{kFair, FiniteDistribution::from_probs({0.7, 0.3})};

// Null law on the labels produced by repeated combine_product.
FiniteDistribution product_null(const std::vector<std::string>& labels, const FiniteDistribution& step) {
  std::vector<double> probs;
  for (const auto& label : labels) {
    double pr = 1.0;
    std::stringstream parts(label);
    std::string part;
    while (std::getline(parts, part, '*')) pr *= step[step.index_of(part)];
    probs.push_back(pr);
  }
  return FiniteDistribution(labels, probs);
}

}  // namespace

TEST_SUITE("sequential") {
  TEST_CASE("running product") {
    auto s = EProcessState::start(Level(0.1));
    s.wealth = 2.5;
    CHECK(update(s, 1.6).wealth == doctest::Approx(4.0));
    CHECK(update(EProcessState::start(Level(0.1)), 0.0).wealth == 0.0);
    auto run = EProcessState::start(Level(0.0));
    for (double f : {1.8, 1.8, 0.2}) run = update(run, f);
    CHECK(run.wealth == doctest::Approx(0.648).epsilon(1e-12));
    CHECK(run.t == 3);
    CHECK(run.factors.size() == 3);
    CHECK_THROWS_AS(update(run, -1.0), InputError);
  }

  TEST_CASE("capped step construction") {
    const Utility log = Utility::log();
    auto s = EProcessState::start(Level(0.1));
    const auto first = fischer_step(s, kStream, log);
    CHECK(first.level == doctest::Approx(0.1));
    for (double f : first.factors) CHECK(f <= 10.0 + 1e-12);

    s.wealth = 6.0;
    const auto second = fischer_step(s, kStream, log);
    CHECK(second.level == doctest::Approx(0.6));
    for (double f : second.factors) CHECK(6.0 * f <= 10.0 * (1.0 + 1e-12));

    s.wealth = 10.0;
    const auto top = fischer_step(s, kStream, log);
    CHECK(top.level == 1.0);
    for (double f : top.factors) CHECK(f == doctest::Approx(1.0));

    s.wealth = 0.0;
    CHECK_THROWS_AS(fischer_step(s, kStream, log), InputError);
    CHECK_THROWS_AS(fischer_step(EProcessState::start(Level(0.0)), kStream, log), InputError);
  }

  TEST_CASE("optional stopping audit") {
    CHECK(optional_stopping_audit(kStream, constant_strategy({1.5, 0.5}), 3) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(optional_stopping_audit(kStream, constant_strategy({1.2, 0.5}), 3) < 1.0);
    CHECK(optional_stopping_audit(kStream, constant_strategy({1.0, 1.0}), 8) == doctest::Approx(1.0));
    // a strategy with null mean above one is caught
    CHECK(optional_stopping_audit(kStream, constant_strategy({1.6, 0.5}), 3) > 1.0);
    CHECK(optional_stopping_audit(kStream, fischer_strategy(kStream, Utility::log()), 8, Level(0.1)) <= 1.0 + 1e-9);
    CHECK(optional_stopping_audit(kStream, fischer_strategy(kStream, Utility::power(-1.0)), 6, Level(0.2)) <= 1.0 + 1e-9);
    CHECK(optional_stopping_audit(kStream, likelihood_ratio_strategy(kStream), 8) <= 1.0 + 1e-9);
    CHECK_THROWS_AS(optional_stopping_audit(kStream, constant_strategy({1.0, 1.0}), 9), InputError);
    const StreamModel wide{FiniteDistribution::from_probs({0.25, 0.25, 0.25, 0.25}),
                           FiniteDistribution::from_probs({0.4, 0.3, 0.2, 0.1})};
    CHECK_THROWS_AS(optional_stopping_audit(wide, constant_strategy({1, 1, 1, 1}), 2), InputError);
  }

  TEST_CASE("product validity on the product space") {
    const std::vector<double> factors = {1.4, 0.6};
    const auto step = ContinuousTest::tabulated(Level(0.0), kFair, factors);
    auto running = step;
    for (int t = 2; t <= 4; ++t) {
      running = combine_product(running, step, MeanIndependence::declared);
      const auto null = product_null(running.table().outcomes, kFair);
      const std::vector<FiniteDistribution> nulls = {null};
      const auto report = check_validity_exact(running, nulls);
      CHECK(report.valid);
      CHECK(report.max_expectation == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(running.values().size() == static_cast<std::size_t>(1) << t);
    }
  }

  TEST_CASE("simulation is deterministic and bounded") {
    SimulationOptions opt;
    opt.paths = 2000;
    opt.horizon = 15;
    opt.seed = 3;
    opt.keep_paths = true;
    const auto strategy = fischer_strategy(kStream, Utility::log());
    const auto one = simulate(kStream, strategy, opt);
    opt.workers = 3;
    const auto three = simulate(kStream, strategy, opt);
    CHECK(one.crossing_frequency == three.crossing_frequency);
    CHECK(one.mean_log_growth == three.mean_log_growth);
    CHECK(one.terminal_quantiles == three.terminal_quantiles);
    CHECK(one.wealth_paths == three.wealth_paths);
    CHECK(one.max_wealth <= 10.0);
    for (const auto& path : one.wealth_paths) {
      REQUIRE(path.size() >= 1);
      for (double w : path) CHECK(w <= 10.0);
    }
    CHECK(one.crossing_frequency <= 0.1 + 3.0 * one.crossing_se);
    CHECK(path_seed(3, 0) != path_seed(3, 1));
    CHECK(path_seed(3, 1) != path_seed(4, 1));
    opt.paths = 999;
    CHECK_THROWS_AS(simulate(kStream, strategy, opt), InputError);
  }

  TEST_CASE("growth rates") {
    SimulationOptions opt;
    opt.paths = 20000;
    opt.horizon = 10;
    opt.seed = 17;
    opt.regime = Regime::alternative;
    opt.target = Level(0.0);
    const auto lr = simulate(kStream, likelihood_ratio_strategy(kStream), opt);
    const double kl = renyi_divergence(kStream.alternative_step, kStream.null_step, 1.0);
    CHECK(std::abs(lr.mean_log_growth - 10.0 * kl) <= 3.0 * lr.log_growth_se);

    const StreamModel flat{kFair, kFair};
    const auto none = simulate(flat, likelihood_ratio_strategy(flat), opt);
    CHECK(std::abs(none.mean_log_growth) <= 1e-12);
    CHECK(none.crossing_frequency == 0.0);
  }
}
