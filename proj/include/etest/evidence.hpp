#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "etest/measure.hpp"

namespace etest {

class Level {
 public:
  explicit Level(double alpha);
  double alpha() const { return alpha_; }
  // 1/alpha, +inf at alpha = 0.
  double cap() const { return cap_; }
  bool is_zero() const { return alpha_ == 0.0; }

 private:
  double alpha_;
  double cap_;
};

struct TabulatedBody {
  std::vector<std::string> outcomes;
  std::vector<double> values;
};

// Location-family test  min(b * exp((2 k x mu - k^2 mu^2) / (2 sigma^2)), cap)
// with k = 1/(1-h).  At h = 1 the body is the step  cap * 1{x beyond threshold}.
struct GaussianBody {
  double mu = 0.0;
  double sigma = 1.0;
  double h = 0.0;
  double log_inflation = 0.0;
  std::optional<double> threshold;
};

class ContinuousTest {
 public:
  static ContinuousTest tabulated(Level level, std::vector<std::string> outcomes,
                                  std::vector<double> values);
  static ContinuousTest tabulated(Level level, const FiniteDistribution& space,
                                  std::vector<double> values);
  static ContinuousTest gaussian(Level level, GaussianBody body);

  const Level& level() const { return level_; }
  bool is_tabulated() const { return std::holds_alternative<TabulatedBody>(body_); }
  const TabulatedBody& table() const;
  const GaussianBody& gaussian_body() const;
  std::span<const double> values() const { return table().values; }

  // Value of a gaussian body at observation x.
  double evaluate(double x) const;

 private:
  ContinuousTest(Level level, std::variant<TabulatedBody, GaussianBody> body)
      : level_(level), body_(std::move(body)) {}

  Level level_;
  std::variant<TabulatedBody, GaussianBody> body_;
};

double rescale_to_evidence(double tau, double alpha);

struct ValidityReport {
  double max_expectation = 0.0;
  bool valid = false;
  std::vector<double> expectations;
  std::size_t violations = 0;
};

inline constexpr double kValidityTolerance = 1e-9;

ValidityReport check_validity_exact(const ContinuousTest& test,
                                    std::span<const FiniteDistribution> nulls);

using NullModel = std::variant<FiniteDistribution, GaussianLocation>;

struct MonteCarloEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
  std::size_t draws = 0;
};

MonteCarloEstimate check_validity_mc(const ContinuousTest& test, const NullModel& null,
                                     std::size_t n, std::uint64_t seed);

ContinuousTest combine_convex(std::span<const ContinuousTest> tests, std::span<const double> weights);

// The caller asserts that the second factor is mean-independent of the first
// under every null; the library cannot check this.
enum class MeanIndependence { declared };

ContinuousTest combine_product(const ContinuousTest& first, const ContinuousTest& second,
                               MeanIndependence independence);

struct Interpretation {
  enum class Kind { rejection, partial_rejection, no_evidence };
  Kind kind;
  double alpha;
  double rejection_probability;
  // 1/value; only meaningful under the post-hoc level guarantee.
  double post_hoc_level;
  std::string summary;
};

Interpretation interpret(double value, double alpha);

}  // namespace etest
