#pragma once

#include <optional>

#include "etest/evidence.hpp"
#include "etest/measure.hpp"
#include "etest/utility.hpp"

namespace etest {

struct NeymanPearsonBoundary {
  double critical_value;  // likelihood ratio at the boundary
  double boundary_value;  // shared value on tied boundary outcomes
};

struct SimpleSolution {
  ContinuousTest test;
  double lambda_star = 0.0;
  std::optional<NeymanPearsonBoundary> boundary;
  // Power family only: the test equals b * LR^(1/(1-h)) capped.
  std::optional<double> inflation;
  double objective = 0.0;  // E_Q[U(test)] over finite values
  double power = 0.0;      // E_Q[test] over finite values
  double null_expectation = 0.0;
  int iterations = 0;
};

ContinuousTest candidate(double lambda, const FiniteDistribution& p, const FiniteDistribution& q,
                         const Utility& u, const Level& level);

struct LambdaSearch {
  double lambda = 0.0;
  double null_expectation = 0.0;
  int iterations = 0;
};

inline constexpr double kDefaultLambdaTolerance = 1e-10;

LambdaSearch solve_lambda(const FiniteDistribution& p, const FiniteDistribution& q, const Utility& u,
                          const Level& level, double tol = kDefaultLambdaTolerance);

SimpleSolution optimal_simple(const FiniteDistribution& p, const FiniteDistribution& q,
                              const Utility& u, const Level& level,
                              double tol = kDefaultLambdaTolerance);

SimpleSolution neyman_pearson(const FiniteDistribution& p, const FiniteDistribution& q, double alpha);

struct OracleResult {
  double objective;
  std::vector<double> values;
};

// Grid search over feasible tests, used as an independent check of the solvers.
OracleResult brute_force_oracle(const FiniteDistribution& p, const FiniteDistribution& q,
                                const Utility& u, const Level& level, int grid_n);

}  // namespace etest
