#include "etest/simple_opt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "etest/errors.hpp"

namespace etest {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxDoublings = 200;
constexpr int kMaxBisections = 200;
constexpr double kTightness = 1e-11;

std::vector<double> candidate_values(double lambda, const FiniteDistribution& p,
                                     const FiniteDistribution& q, const Utility& u, double cap) {
  std::vector<double> v(p.size(), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (q[i] > 0.0 && p[i] > 0.0) {
      v[i] = lambda == 0.0 ? cap : std::min(u.derivative_inverse(lambda * p[i] / q[i]), cap);
    } else if (q[i] > 0.0) {
      v[i] = cap;
    }
  }
  return v;
}

double null_mass(double lambda, const FiniteDistribution& p, const FiniteDistribution& q,
                 const Utility& u, double cap) {
  return expectation(p, candidate_values(lambda, p, q, u, cap));
}

SimpleSolution finish(ContinuousTest test, const FiniteDistribution& p, const FiniteDistribution& q,
                      const Utility& u) {
  SimpleSolution s{std::move(test), 0.0, std::nullopt, std::nullopt};
  s.objective = expected_utility(q, s.test.values(), u);
  s.power = expected_utility(q, s.test.values(), Utility::power(1.0)) + 1.0;
  s.null_expectation = expectation(p, s.test.values());
  return s;
}

}  // namespace

ContinuousTest candidate(double lambda, const FiniteDistribution& p, const FiniteDistribution& q,
                         const Utility& u, const Level& level) {
  require_same_space(p, q);
  if (!(lambda >= 0.0)) throw InputError("candidate: lambda must be >= 0");
  if (!u.invertible()) throw InputError("candidate: utility derivative is not invertible; use neyman_pearson");
  return ContinuousTest::tabulated(level, p, candidate_values(lambda, p, q, u, level.cap()));
}

LambdaSearch solve_lambda(const FiniteDistribution& p, const FiniteDistribution& q, const Utility& u,
                          const Level& level, double tol) {
  require_same_space(p, q);
  if (!u.invertible()) throw InputError("solve_lambda: utility derivative is not invertible");
  const double cap = level.cap();
  auto m = [&](double lambda) { return null_mass(lambda, p, q, u, cap); };

  LambdaSearch out;
  const double m0 = m(0.0);
  if (m0 <= 1.0 + 1e-12) {
    out.null_expectation = m0;
    return out;
  }

  double lo = 0.0;
  double hi = 1.0;
  double m_hi = m(hi);
  if (m_hi > 1.0) {
    int k = 0;
    while (m_hi > 1.0) {
      if (++k > kMaxDoublings)
        throw InfeasibleError(
            "no multiplier found after 200 doublings; xU'(x) may be unbounded at this level "
            "(existence not established)");
      lo = hi;
      hi *= 2.0;
      m_hi = m(hi);
    }
  } else {
    lo = 0.5;
    while (m(lo) <= 1.0) {
      hi = lo;
      lo *= 0.5;
      if (lo == 0.0) throw NonConvergence("solve_lambda: multiplier underflow");
    }
    m_hi = m(hi);
  }

  int it = 0;
  while (it < kMaxBisections) {
    const bool narrow = (hi - lo) <= tol * hi;
    if (narrow && std::abs(m_hi - 1.0) <= kTightness) break;
    const double mid = lo > 0.0 ? std::sqrt(lo * hi) : 0.5 * hi;
    if (mid <= lo || mid >= hi) break;
    ++it;
    const double m_mid = m(mid);
    if (m_mid > 1.0) {
      lo = mid;
    } else {
      hi = mid;
      m_hi = m_mid;
    }
  }
  out.lambda = hi;
  out.null_expectation = m_hi;
  out.iterations = it;
  return out;
}

SimpleSolution optimal_simple(const FiniteDistribution& p, const FiniteDistribution& q,
                              const Utility& u, const Level& level, double tol) {
  require_same_space(p, q);
  if (!u.invertible()) {
    if (level.is_zero())
      throw FrameworkViolation("a non-invertible (linear) utility has no optimum at level 0");
    SimpleSolution np = neyman_pearson(p, q, level.alpha());
    np.objective = expected_utility(q, np.test.values(), u);
    return np;
  }
  const LambdaSearch search = solve_lambda(p, q, u, level, tol);
  SimpleSolution s = finish(candidate(search.lambda, p, q, u, level), p, q, u);
  s.lambda_star = search.lambda;
  s.iterations = search.iterations;
  if (auto h = u.exponent(); h && search.lambda > 0.0)
    s.inflation = std::exp(-std::log(search.lambda) / (1.0 - *h));
  return s;
}

SimpleSolution neyman_pearson(const FiniteDistribution& p, const FiniteDistribution& q, double alpha) {
  require_same_space(p, q);
  if (!(alpha > 0.0)) throw InputError("neyman_pearson needs alpha > 0");
  const Level level(alpha);
  const double cap = level.cap();
  const std::size_t n = p.size();

  std::vector<double> values(n, 0.0);
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < n; ++i) {
    if (p[i] > 0.0) order.push_back(i);
    else if (q[i] > 0.0) values[i] = cap;
  }
  auto ratio = [&](std::size_t i) { return q[i] / p[i]; };
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return ratio(a) > ratio(b); });

  double budget = 1.0;
  double critical = 0.0;
  double boundary = cap;
  bool filled = false;
  for (std::size_t start = 0; start < order.size();) {
    std::size_t end = start;
    double mass = 0.0;
    while (end < order.size() && ratio(order[end]) == ratio(order[start])) mass += p[order[end++]];
    const double lr = ratio(order[start]);
    double k = cap;
    if (cap * mass > budget) {
      k = budget / mass;
      filled = true;
    }
    for (std::size_t j = start; j < end; ++j) values[order[j]] = k;
    budget = std::max(0.0, budget - k * mass);
    critical = lr;
    boundary = k;
    start = end;
    if (filled) break;
  }

  SimpleSolution s = finish(ContinuousTest::tabulated(level, p, values), p, q, Utility::power(1.0));
  s.objective = s.power;
  if (filled) {
    s.lambda_star = critical;
    s.boundary = NeymanPearsonBoundary{critical, boundary};
  } else {
    s.lambda_star = 0.0;
    s.boundary = NeymanPearsonBoundary{0.0, cap};
  }
  return s;
}

OracleResult brute_force_oracle(const FiniteDistribution& p, const FiniteDistribution& q,
                                const Utility& u, const Level& level, int grid_n) {
  require_same_space(p, q);
  if (p.size() > 6) throw InputError("brute_force_oracle: at most 6 outcomes");
  if (grid_n < 2 || grid_n > 101) throw InputError("brute_force_oracle: grid_n must lie in [2,101]");
  const double cap = level.cap();

  // Outcomes outside the common support are settled without search:
  // free mass under the alternative takes the cap, dead mass takes 0.
  std::vector<double> base(p.size(), 0.0);
  std::vector<std::size_t> free;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0 && q[i] > 0.0) free.push_back(i);
    else if (q[i] > 0.0) base[i] = cap;
  }
  OracleResult best{-kInf, base};
  if (free.empty()) {
    best.objective = expected_utility(q, base, u);
    return best;
  }

  const std::size_t k = free.size();
  std::vector<double> upper(k);
  for (std::size_t j = 0; j < k; ++j) upper[j] = std::min(cap, 1.0 / p[free[j]]);

  auto search = [&](const std::vector<double>& lo, const std::vector<double>& hi) {
    std::vector<int> idx(k - 1, 0);
    std::vector<double> x = base;
    while (true) {
      double used = 0.0;
      for (std::size_t j = 0; j + 1 < k; ++j) {
        const double t = static_cast<double>(idx[j]) / (grid_n - 1);
        x[free[j]] = lo[j] + t * (hi[j] - lo[j]);
        used += p[free[j]] * x[free[j]];
      }
      const std::size_t last = free[k - 1];
      const double room = 1.0 - used;
      if (room >= -1e-15) {
        x[last] = std::min(upper[k - 1], std::max(0.0, room) / p[last]);
        const double obj = expected_utility(q, x, u);
        if (obj > best.objective) best = {obj, x};
      }
      std::size_t j = 0;
      while (j + 1 < k && ++idx[j] == grid_n) idx[j++] = 0;
      if (j + 1 >= k) break;
    }
  };

  std::vector<double> lo(k, 0.0);
  search(lo, upper);
  if (k > 1) {
    std::vector<double> rlo(k), rhi(k);
    for (std::size_t j = 0; j < k; ++j) {
      const double step = upper[j] / (grid_n - 1);
      rlo[j] = std::max(0.0, best.values[free[j]] - step);
      rhi[j] = std::min(upper[j], best.values[free[j]] + step);
    }
    search(rlo, rhi);
  }
  return best;
}

}  // namespace etest
