#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "etest/evidence.hpp"
#include "etest/measure.hpp"
#include "etest/utility.hpp"

namespace etest {

struct CompositeProblem {
  std::vector<FiniteDistribution> nulls;
  FiniteDistribution alternative;
  Level level;
  Utility utility;

  // Shared outcome space, nonempty null set, and the level-0 restriction h <= 0.
  void validate() const;
};

// Reverse projection onto the effective null; total mass can fall short of 1.
struct RiprMeasure {
  std::vector<std::string> outcomes;
  std::vector<double> mass;
  double total_mass = 0.0;
  double normalizer = 0.0;  // E_Q[U'(eps) eps]
};

struct CompositeSolution {
  std::vector<double> values;
  double objective = 0.0;
  std::vector<double> multipliers;
  RiprMeasure ripr;
  double foc_slack = 0.0;
  std::optional<double> duality_gap;
  int iterations = 0;
  int restarts = 0;
  // Largest disagreement between restarts on the alternative's support.
  double restart_spread = 0.0;

  ContinuousTest test(const CompositeProblem& prob) const;
};

struct SolverOptions {
  double tol = 1e-6;
  int max_iter = 500;
  std::uint64_t seed = 0;
  int restarts = 3;
};

CompositeSolution solve_composite(const CompositeProblem& prob, const SolverOptions& options = {});

// LP maximum of E_Q[U'(eps*) eps] over valid tests minus its value at eps*.
double verify_foc(std::span<const double> values, const CompositeProblem& prob);

RiprMeasure ripr(std::span<const double> values, const CompositeProblem& prob);

struct Membership {
  double value;
  bool member;
};

Membership effective_membership(std::span<const double> candidate,
                                std::span<const FiniteDistribution> nulls, const Level& level);
Membership effective_membership(const FiniteDistribution& candidate,
                                std::span<const FiniteDistribution> nulls, const Level& level);

// Order 1 is Kullback-Leibler, +inf is the log of the largest ratio.
double renyi_divergence(const FiniteDistribution& q, const FiniteDistribution& p, double order);

double duality_gap(std::span<const double> values, std::span<const double> ripr_mass,
                   const CompositeProblem& prob);

struct NpLimit {
  std::vector<double> schedule;
  std::vector<double> powers;  // E_Q[eps] along the schedule
  std::vector<std::vector<double>> tests;
  std::vector<double> lp_test;
  double lp_power = 0.0;
  double deviation = 0.0;  // |last power - LP power|
};

NpLimit np_limit(const std::vector<FiniteDistribution>& nulls, const FiniteDistribution& alternative,
                 double alpha, const std::vector<double>& schedule, const SolverOptions& options = {});

double testing_distance(const FiniteDistribution& q, const FiniteDistribution& p_star);

}  // namespace etest
