#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace etest {

// Probability vector over a finite, labelled outcome space.
class FiniteDistribution {
 public:
  static constexpr double kSumTolerance = 1e-12;

  FiniteDistribution(std::vector<std::string> outcomes, std::vector<double> probs);

  // Labels default to "a", "b", ... (then "o26", "o27", ...).
  static FiniteDistribution from_probs(std::vector<double> probs);
  static std::vector<std::string> default_labels(std::size_t n);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> probs() const { return probs_; }
  const std::vector<std::string>& outcomes() const { return outcomes_; }
  std::size_t index_of(const std::string& label) const;

  bool same_space(const FiniteDistribution& other) const;
  std::size_t sample(std::mt19937_64& rng) const;

 private:
  std::vector<std::string> outcomes_;
  std::vector<double> probs_;
};

void require_same_space(const FiniteDistribution& a, const FiniteDistribution& b);

// Ratio in [0, inf] with outcomes where both masses vanish flagged arbitrary.
struct ExtendedRatio {
  std::vector<double> values;
  std::vector<bool> arbitrary;

  // Arbitrary entries resolve to zero.
  std::vector<double> resolved() const;
};

ExtendedRatio likelihood_ratio(const FiniteDistribution& p, const FiniteDistribution& q);

struct SupportPartition {
  std::vector<std::size_t> common;  // p > 0 and q > 0
  std::vector<std::size_t> q_only;  // p = 0, q > 0
  std::vector<std::size_t> p_only;  // p > 0, q = 0
  std::vector<std::size_t> neither;
};

SupportPartition support_partition(const FiniteDistribution& p, const FiniteDistribution& q);

// Sum of p_i * f_i with 0 * inf = 0.
double expectation(const FiniteDistribution& p, std::span<const double> f);
double expectation(std::span<const double> weights, std::span<const double> f);

class GaussianLocation {
 public:
  GaussianLocation(double mean, double sd);
  double mean() const { return mean_; }
  double sd() const { return sd_; }
  double pdf(double x) const;
  double sample(std::mt19937_64& rng) const;

 private:
  double mean_;
  double sd_;
};

}  // namespace etest
