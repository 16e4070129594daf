#include "etest/evidence.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <random>

#include "etest/errors.hpp"

namespace etest {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string short_number(double x) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void check_values(const Level& level, std::span<const double> values) {
  for (double v : values) {
    if (std::isnan(v) || v < 0.0) throw InputError("test values must be >= 0");
    if (v > level.cap())
      throw InputError("test value " + short_number(v) + " exceeds cap " + short_number(level.cap()));
  }
}

}  // namespace

Level::Level(double alpha) : alpha_(alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InputError("level must lie in [0,1]");
  cap_ = alpha == 0.0 ? kInf : 1.0 / alpha;
}

ContinuousTest ContinuousTest::tabulated(Level level, std::vector<std::string> outcomes,
                                         std::vector<double> values) {
  if (outcomes.size() != values.size()) throw InputError("outcome and value lists differ in length");
  check_values(level, values);
  return ContinuousTest(level, TabulatedBody{std::move(outcomes), std::move(values)});
}

ContinuousTest ContinuousTest::tabulated(Level level, const FiniteDistribution& space,
                                         std::vector<double> values) {
  return tabulated(level, space.outcomes(), std::move(values));
}

ContinuousTest ContinuousTest::gaussian(Level level, GaussianBody body) {
  if (!(body.sigma > 0.0) || !std::isfinite(body.mu)) throw InputError("gaussian body: bad mu/sigma");
  if (body.h > 1.0) throw InputError("gaussian body: h must be <= 1");
  if (body.h == 1.0 && !body.threshold) throw InputError("gaussian body: h = 1 needs a threshold");
  if (std::isnan(body.log_inflation)) throw InputError("gaussian body: inflation is NaN");
  return ContinuousTest(level, body);
}

const TabulatedBody& ContinuousTest::table() const {
  if (const auto* t = std::get_if<TabulatedBody>(&body_)) return *t;
  throw ModelMismatch("test is not tabulated");
}

const GaussianBody& ContinuousTest::gaussian_body() const {
  if (const auto* g = std::get_if<GaussianBody>(&body_)) return *g;
  throw ModelMismatch("test is not gaussian");
}

double ContinuousTest::evaluate(double x) const {
  const GaussianBody& g = gaussian_body();
  const double cap = level_.cap();
  if (g.threshold) {
    if (g.mu == 0.0) return 0.0;
    const bool beyond = g.mu > 0.0 ? x > *g.threshold : x < *g.threshold;
    return beyond ? cap : 0.0;
  }
  const double k = 1.0 / (1.0 - g.h);
  const double s2 = g.sigma * g.sigma;
  const double log_value = g.log_inflation + (2.0 * k * x * g.mu - k * k * g.mu * g.mu) / (2.0 * s2);
  if (log_value >= std::log(cap)) return cap;
  return std::min(std::exp(log_value), cap);
}

double rescale_to_evidence(double tau, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InputError("rescale_to_evidence: alpha must lie in (0,1]");
  if (!(tau >= 0.0 && tau <= 1.0)) throw InputError("rescale_to_evidence: tau must lie in [0,1]");
  return std::min(tau / alpha, 1.0 / alpha);
}

ValidityReport check_validity_exact(const ContinuousTest& test,
                                    std::span<const FiniteDistribution> nulls) {
  if (nulls.empty()) throw InputError("validity check needs a nonempty null set");
  const TabulatedBody& t = test.table();
  ValidityReport report;
  report.max_expectation = -kInf;
  for (const auto& p : nulls) {
    if (p.outcomes() != t.outcomes) throw ModelMismatch("null distribution and test differ in outcomes");
    const double e = expectation(p, t.values);
    report.expectations.push_back(e);
    report.max_expectation = std::max(report.max_expectation, e);
    if (e > 1.0 + kValidityTolerance) ++report.violations;
  }
  report.valid = report.violations == 0;
  return report;
}

MonteCarloEstimate check_validity_mc(const ContinuousTest& test, const NullModel& null,
                                     std::size_t n, std::uint64_t seed) {
  if (n < 100) throw InputError("Monte Carlo validity check needs n >= 100");
  std::mt19937_64 rng(seed);
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double v;
    if (const auto* fd = std::get_if<FiniteDistribution>(&null)) {
      v = test.values()[fd->sample(rng)];
    } else {
      v = test.evaluate(std::get<GaussianLocation>(null).sample(rng));
    }
    const double delta = v - mean;
    mean += delta / static_cast<double>(k + 1);
    m2 += delta * (v - mean);
  }
  const double var = m2 / static_cast<double>(n - 1);
  return {mean, std::sqrt(var / static_cast<double>(n)), n};
}

ContinuousTest combine_convex(std::span<const ContinuousTest> tests, std::span<const double> weights) {
  if (tests.empty() || tests.size() != weights.size())
    throw InputError("combine_convex: need one weight per test");
  double wsum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw InputError("combine_convex: weights must be nonnegative");
    wsum += w;
  }
  if (std::abs(wsum - 1.0) > 1e-12) throw InputError("combine_convex: weights must sum to 1");

  const auto& outcomes = tests[0].table().outcomes;
  double cap_sum = 0.0;
  for (std::size_t k = 0; k < tests.size(); ++k) {
    if (tests[k].table().outcomes != outcomes) throw ModelMismatch("combine_convex: outcome sets differ");
    if (weights[k] > 0.0) cap_sum += weights[k] * tests[k].level().cap();
  }
  const Level level(std::isinf(cap_sum) ? 0.0 : 1.0 / cap_sum);
  std::vector<double> values(outcomes.size(), 0.0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (std::size_t k = 0; k < tests.size(); ++k)
      if (weights[k] > 0.0) values[i] += weights[k] * tests[k].values()[i];
    values[i] = std::min(values[i], level.cap());
  }
  return ContinuousTest::tabulated(level, outcomes, std::move(values));
}

ContinuousTest combine_product(const ContinuousTest& first, const ContinuousTest& second,
                               MeanIndependence) {
  const auto& a = first.table();
  const auto& b = second.table();
  const Level level(first.level().alpha() * second.level().alpha());
  std::vector<std::string> outcomes;
  std::vector<double> values;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    for (std::size_t j = 0; j < b.values.size(); ++j) {
      if (a.values.size() == 1) outcomes.push_back(b.outcomes[j]);
      else if (b.values.size() == 1) outcomes.push_back(a.outcomes[i]);
      else outcomes.push_back(a.outcomes[i] + "*" + b.outcomes[j]);
      const double x = a.values[i];
      const double y = b.values[j];
      const double v = (x == 0.0 || y == 0.0) ? 0.0 : x * y;
      values.push_back(std::min(v, level.cap()));
    }
  }
  return ContinuousTest::tabulated(level, std::move(outcomes), std::move(values));
}

Interpretation interpret(double value, double alpha) {
  const Level level(alpha);
  if (std::isnan(value) || value < 0.0) throw InputError("interpret: value must be >= 0");
  if (value > level.cap()) throw InputError("interpret: value exceeds the cap 1/alpha");
  Interpretation out{};
  out.alpha = alpha;
  out.post_hoc_level = value == 0.0 ? kInf : 1.0 / value;
  const std::string at = " at level " + short_number(alpha);
  if (value == 0.0) {
    out.kind = Interpretation::Kind::no_evidence;
    out.rejection_probability = 0.0;
    out.summary = "no evidence";
  } else if (value == level.cap()) {
    out.kind = Interpretation::Kind::rejection;
    out.rejection_probability = 1.0;
    out.summary = "rejection" + at;
  } else {
    out.kind = Interpretation::Kind::partial_rejection;
    out.rejection_probability = alpha * value;
    out.summary = "rejection with probability " + short_number(out.rejection_probability) + at;
  }
  return out;
}

}  // namespace etest
