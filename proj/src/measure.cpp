#include "etest/measure.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <unordered_set>

#include "etest/errors.hpp"

namespace etest {

FiniteDistribution::FiniteDistribution(std::vector<std::string> outcomes,
                                       std::vector<double> probs)
    : outcomes_(std::move(outcomes)), probs_(std::move(probs)) {
  if (probs_.empty()) throw InputError("distribution needs at least one outcome");
  if (outcomes_.size() != probs_.size())
    throw InputError("outcome labels and probabilities differ in length");
  std::unordered_set<std::string> seen;
  for (const auto& label : outcomes_)
    if (!seen.insert(label).second) throw InputError("duplicate outcome label '" + label + "'");
  double total = 0.0;
  for (double p : probs_) {
    if (!std::isfinite(p) || p < 0.0) throw InputError("probabilities must be finite and >= 0");
    total += p;
  }
  if (std::abs(total - 1.0) > kSumTolerance)
    throw InputError("probabilities sum to " + std::to_string(total) + ", not 1");
}

std::vector<std::string> FiniteDistribution::default_labels(std::size_t n) {
  std::vector<std::string> labels;
  labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    labels.push_back(i < 26 ? std::string(1, static_cast<char>('a' + i)) : "o" + std::to_string(i));
  return labels;
}

FiniteDistribution FiniteDistribution::from_probs(std::vector<double> probs) {
  auto labels = default_labels(probs.size());
  return FiniteDistribution(std::move(labels), std::move(probs));
}

std::size_t FiniteDistribution::index_of(const std::string& label) const {
  for (std::size_t i = 0; i < outcomes_.size(); ++i)
    if (outcomes_[i] == label) return i;
  throw InputError("unknown outcome '" + label + "'");
}

bool FiniteDistribution::same_space(const FiniteDistribution& other) const {
  return outcomes_ == other.outcomes_;
}

std::size_t FiniteDistribution::sample(std::mt19937_64& rng) const {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    if (probs_[i] <= 0.0) continue;
    acc += probs_[i];
    last = i;
    if (u < acc) return i;
  }
  return last;
}

void require_same_space(const FiniteDistribution& a, const FiniteDistribution& b) {
  if (!a.same_space(b)) throw ModelMismatch("distributions live on different outcome spaces");
}

std::vector<double> ExtendedRatio::resolved() const {
  std::vector<double> out(values);
  for (std::size_t i = 0; i < out.size(); ++i)
    if (arbitrary[i]) out[i] = 0.0;
  return out;
}

ExtendedRatio likelihood_ratio(const FiniteDistribution& p, const FiniteDistribution& q) {
  require_same_space(p, q);
  ExtendedRatio r;
  r.values.resize(p.size());
  r.arbitrary.assign(p.size(), false);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) {
      r.values[i] = q[i] / p[i];
    } else if (q[i] > 0.0) {
      r.values[i] = std::numeric_limits<double>::infinity();
    } else {
      r.values[i] = 0.0;
      r.arbitrary[i] = true;
    }
  }
  return r;
}

SupportPartition support_partition(const FiniteDistribution& p, const FiniteDistribution& q) {
  require_same_space(p, q);
  SupportPartition s;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const bool pp = p[i] > 0.0;
    const bool qq = q[i] > 0.0;
    if (pp && qq) s.common.push_back(i);
    else if (qq) s.q_only.push_back(i);
    else if (pp) s.p_only.push_back(i);
    else s.neither.push_back(i);
  }
  return s;
}

double expectation(std::span<const double> weights, std::span<const double> f) {
  if (weights.size() != f.size()) throw ModelMismatch("expectation: length mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (weights[i] != 0.0) total += weights[i] * f[i];
  return total;
}

double expectation(const FiniteDistribution& p, std::span<const double> f) {
  return expectation(p.probs(), f);
}

GaussianLocation::GaussianLocation(double mean, double sd) : mean_(mean), sd_(sd) {
  if (!std::isfinite(mean)) throw InputError("gaussian mean must be finite");
  if (!std::isfinite(sd) || sd <= 0.0) throw InputError("gaussian sd must be positive");
}

double GaussianLocation::pdf(double x) const {
  const double z = (x - mean_) / sd_;
  return std::exp(-0.5 * z * z) / (sd_ * std::sqrt(2.0 * std::numbers::pi));
}

double GaussianLocation::sample(std::mt19937_64& rng) const {
  return std::normal_distribution<double>(mean_, sd_)(rng);
}

}  // namespace etest
