#include "etest/bridge.hpp"

#include <algorithm>
#include <cmath>

#include "etest/errors.hpp"

namespace etest {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_e(double e) {
  if (std::isnan(e) || e < 0.0) throw InputError("e-value must be >= 0");
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InputError("alpha must lie in (0,1]");
}

struct Moments {
  double mean = 0.0;
  double m2 = 0.0;
  std::size_t n = 0;

  void add(double v) {
    ++n;
    const double d = v - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (v - mean);
  }
  double se() const { return n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0; }
};

}  // namespace

double e_to_continuous(double e, double alpha) {
  check_e(e);
  check_alpha(alpha);
  return std::min(e, 1.0 / alpha);
}

double e_to_binary(double e, double alpha) {
  check_e(e);
  check_alpha(alpha);
  return alpha * e >= 1.0 ? 1.0 / alpha : 0.0;
}

bool randomize(double epsilon, double alpha, double u) {
  check_alpha(alpha);
  if (std::isnan(epsilon) || epsilon < 0.0) throw InputError("test value must be >= 0");
  if (epsilon > 1.0 / alpha) throw InputError("test value exceeds the cap 1/alpha");
  const double chance = alpha * epsilon;
  return chance >= 1.0 || u < chance;
}

PValueFamily PValueFamily::threshold(double p0) {
  if (!(p0 > 0.0)) throw InputError("threshold p-value must be positive");
  PValueFamily f;
  f.p0_ = p0;
  return f;
}

PValueFamily PValueFamily::never() { return PValueFamily{}; }

PValueFamily PValueFamily::grid(std::vector<double> alphas, std::vector<bool> rejects) {
  if (alphas.empty() || alphas.size() != rejects.size())
    throw InputError("p-value grid needs one decision per level");
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (!(alphas[i] > 0.0 && alphas[i] <= 1.0)) throw InputError("grid levels must lie in (0,1]");
    if (i > 0 && !(alphas[i] > alphas[i - 1])) throw InputError("grid levels must be strictly increasing");
    if (i > 0 && rejects[i - 1] && !rejects[i])
      throw InputError("family is not sorted: a rejection at a smaller level is lost at a larger one");
  }
  PValueFamily f;
  f.threshold_form_ = false;
  f.alphas_ = std::move(alphas);
  f.rejects_ = std::move(rejects);
  return f;
}

bool PValueFamily::rejects(double alpha) const {
  if (threshold_form_) return alpha >= p0_;
  bool out = false;
  for (std::size_t i = 0; i < alphas_.size() && alphas_[i] <= alpha; ++i) out = rejects_[i];
  return out;
}

PValueReading p_from_family(const PValueFamily& family) {
  PValueReading r{kInf, 0.0, false};
  if (family.is_threshold()) {
    r.p = family.threshold_value();
    r.sup_evidence = std::isinf(r.p) ? 0.0 : 1.0 / r.p;
  } else {
    const auto& levels = family.grid_levels();
    const auto& decisions = family.grid_decisions();
    for (std::size_t i = 0; i < levels.size(); ++i) {
      if (!decisions[i]) continue;
      r.p = levels[i];
      break;
    }
    for (std::size_t i = 0; i < levels.size(); ++i)
      if (decisions[i]) r.sup_evidence = std::max(r.sup_evidence, 1.0 / levels[i]);
  }
  r.identity_holds = r.sup_evidence == strong_p(r.p);
  return r;
}

double strong_p(double epsilon) {
  if (std::isnan(epsilon) || epsilon < 0.0) throw InputError("test value must be >= 0");
  if (epsilon == 0.0) return kInf;
  if (std::isinf(epsilon)) return 0.0;
  return 1.0 / epsilon;
}

MarkovChain markov_chain_values(double x, double alpha) {
  check_e(x);
  check_alpha(alpha);
  MarkovChain c{};
  c.product = alpha * x;
  c.minimum = std::min(c.product, 1.0);
  c.floor = std::floor(c.minimum);
  c.indicator = c.product >= 1.0 ? 1.0 : 0.0;
  c.ordered = c.indicator == c.floor && c.floor <= c.minimum && c.minimum <= c.product;
  if (x == 0.0) {
    c.markov_equality = 0.0;
  } else {
    const double at = 1.0 / x;
    c.markov_equality = (at * x >= 1.0 ? 1.0 : 0.0) / at;
  }
  return c;
}

std::vector<LevelExceedance> weak_p_audit(const Sampler& p_sampler, const std::vector<double>& alphas,
                                          std::size_t n, std::uint64_t seed) {
  if (n < 10000) throw InputError("weak p-value audit needs n >= 10^4");
  for (double a : alphas) check_alpha(a);
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> hits(alphas.size(), 0);
  for (std::size_t k = 0; k < n; ++k) {
    const double p = p_sampler(rng);
    for (std::size_t j = 0; j < alphas.size(); ++j)
      if (p <= alphas[j]) ++hits[j];
  }
  std::vector<LevelExceedance> out;
  const double nn = static_cast<double>(n);
  for (std::size_t j = 0; j < alphas.size(); ++j) {
    const double a = alphas[j];
    const double freq = static_cast<double>(hits[j]) / nn;
    const double se = std::sqrt(a * (1.0 - a) / nn);
    out.push_back({a, freq, se, freq > a + 3.0 * se});
  }
  return out;
}

CrossLevelAudit cross_level_audit(const Sampler& epsilon_sampler, std::size_t n, std::uint64_t seed) {
  if (n < 100) throw InputError("cross-level audit needs n >= 100");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  Moments raw;
  Moments reduced;
  for (std::size_t k = 0; k < n; ++k) {
    const double eps = epsilon_sampler(rng);
    if (std::isnan(eps) || eps < 0.0) throw InputError("sampled test value must be >= 0");
    const double level = eps > 1.0 ? 1.0 / eps : 1.0;
    const double reject_prob = std::min(1.0, eps * level);
    const bool reject = uniform(rng) < reject_prob;
    raw.add(reject ? 1.0 / level : 0.0);
    reduced.add(eps);
  }
  CrossLevelAudit a{raw.mean, raw.se(), reduced.mean, reduced.se(), false};
  a.flagged = a.raw_estimate > 1.0 + 3.0 * a.raw_se || a.reduced_estimate > 1.0 + 3.0 * a.reduced_se;
  return a;
}

CrossLevelAudit cross_level_audit(const ContinuousTest& test, const NullModel& null, std::size_t n,
                                  std::uint64_t seed) {
  if (test.level().is_zero()) throw InputError("cross-level audit needs a test with alpha > 0");
  Sampler sampler;
  if (const auto* fd = std::get_if<FiniteDistribution>(&null)) {
    const auto values = std::vector<double>(test.values().begin(), test.values().end());
    sampler = [fd = *fd, values](std::mt19937_64& rng) { return values[fd.sample(rng)]; };
  } else {
    const GaussianLocation g = std::get<GaussianLocation>(null);
    sampler = [g, test](std::mt19937_64& rng) { return test.evaluate(g.sample(rng)); };
  }
  return cross_level_audit(sampler, n, seed);
}

}  // namespace etest
