#include "etest/composite_opt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "etest/errors.hpp"
#include "etest/lp.hpp"

namespace etest {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Dual of  max E_Q[U(eps)]  s.t.  E_Pj[eps] <= 1,  0 <= eps <= c,
// restricted to outcomes charged by the alternative and by some null:
//   g(y) = sum_i q_i U(eps_i(y)) - s_i eps_i(y) + sum_j y_j,   y >= 0,
// with s = P^T y and eps_i(y) = min(U'^-1(s_i / q_i), c_i).
class Dual {
 public:
  Dual(const CompositeProblem& prob, std::vector<std::size_t> index)
      : u_(prob.utility), index_(std::move(index)), m_(prob.nulls.size()) {
    const double cap = prob.level.cap();
    for (std::size_t i : index_) {
      double peak = 0.0;
      for (const auto& p : prob.nulls) peak = std::max(peak, p[i]);
      q_.push_back(prob.alternative[i]);
      bound_.push_back(std::min(cap, 1.0 / peak));
    }
    rows_.assign(m_, std::vector<double>(index_.size()));
    for (std::size_t j = 0; j < m_; ++j)
      for (std::size_t k = 0; k < index_.size(); ++k) rows_[j][k] = prob.nulls[j][index_[k]];
  }

  std::size_t dim() const { return m_; }
  std::size_t size() const { return index_.size(); }
  const std::vector<std::size_t>& index() const { return index_; }

  struct Eval {
    double value;
    std::vector<double> eps;
    std::vector<double> grad;
    std::vector<bool> capped;
    std::vector<double> s;
  };

  Eval evaluate(const std::vector<double>& y) const {
    Eval e{0.0, std::vector<double>(size()), std::vector<double>(m_, 1.0),
           std::vector<bool>(size(), false), std::vector<double>(size(), 0.0)};
    for (std::size_t k = 0; k < size(); ++k) {
      double s = 0.0;
      for (std::size_t j = 0; j < m_; ++j) s += y[j] * rows_[j][k];
      e.s[k] = s;
      const double free_value = s > 0.0 ? u_.derivative_inverse(s / q_[k]) : kInf;
      e.capped[k] = !(free_value < bound_[k]);
      e.eps[k] = e.capped[k] ? bound_[k] : free_value;
      e.value += q_[k] * u_.value(e.eps[k]) - s * e.eps[k];
    }
    for (std::size_t j = 0; j < m_; ++j) {
      e.value += y[j];
      for (std::size_t k = 0; k < size(); ++k) e.grad[j] -= rows_[j][k] * e.eps[k];
    }
    return e;
  }

  std::vector<std::vector<double>> hessian(const Eval& e) const {
    std::vector<std::vector<double>> hess(m_, std::vector<double>(m_, 0.0));
    for (std::size_t k = 0; k < size(); ++k) {
      if (e.capped[k]) continue;
      const double w = -u_.derivative_inverse_slope(e.s[k] / q_[k]) / q_[k];
      for (std::size_t a = 0; a < m_; ++a)
        for (std::size_t b = 0; b < m_; ++b) hess[a][b] += rows_[a][k] * rows_[b][k] * w;
    }
    return hess;
  }

 private:
  const Utility& u_;
  std::vector<std::size_t> index_;
  std::size_t m_;
  std::vector<double> q_;
  std::vector<double> bound_;
  std::vector<std::vector<double>> rows_;
};

double projected_residual(const std::vector<double>& y, const std::vector<double>& grad) {
  double r = 0.0;
  for (std::size_t j = 0; j < y.size(); ++j) r = std::max(r, std::abs(y[j] - std::max(0.0, y[j] - grad[j])));
  return r;
}

// Cholesky solve of (H + tau I) d = rhs, escalating tau until positive definite.
std::vector<double> regularized_solve(std::vector<std::vector<double>> h, std::vector<double> rhs) {
  const std::size_t n = rhs.size();
  double diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) diag = std::max(diag, h[i][i]);
  if (diag <= 0.0) return rhs;
  for (double tau = 1e-12 * diag;; tau *= 100.0) {
    std::vector<std::vector<double>> l(n, std::vector<double>(n, 0.0));
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        double s = h[i][j] + (i == j ? tau : 0.0);
        for (std::size_t k = 0; k < j; ++k) s -= l[i][k] * l[j][k];
        if (i == j) {
          if (s <= 0.0) {
            ok = false;
            break;
          }
          l[i][i] = std::sqrt(s);
        } else {
          l[i][j] = s / l[j][j];
        }
      }
    }
    if (!ok) continue;
    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i) {
      double s = rhs[i];
      for (std::size_t k = 0; k < i; ++k) s -= l[i][k] * z[k];
      z[i] = s / l[i][i];
    }
    for (std::size_t i = n; i-- > 0;) {
      double s = z[i];
      for (std::size_t k = i + 1; k < n; ++k) s -= l[k][i] * z[k];
      z[i] = s / l[i][i];
    }
    return z;
  }
}

struct DualRun {
  std::vector<double> y;
  int iterations = 0;
  double residual = kInf;
};

DualRun minimize_dual(const Dual& dual, std::vector<double> y, int max_iter) {
  const std::size_t m = dual.dim();
  DualRun run;
  Dual::Eval cur = dual.evaluate(y);
  for (int it = 0; it < max_iter; ++it) {
    run.iterations = it;
    const double res = projected_residual(y, cur.grad);
    if (res <= 1e-13) break;

    // Variables pinned at zero with the gradient pushing outward stay in the active set.
    const double slack = std::min(1e-6, res);
    std::vector<std::size_t> free;
    std::vector<bool> active(m, false);
    for (std::size_t j = 0; j < m; ++j) {
      active[j] = y[j] <= slack && cur.grad[j] > 0.0;
      if (!active[j]) free.push_back(j);
    }
    const auto hess = dual.hessian(cur);
    std::vector<double> dir(m, 0.0);
    for (std::size_t j = 0; j < m; ++j)
      if (active[j]) dir[j] = -cur.grad[j] / (hess[j][j] > 0.0 ? hess[j][j] : 1.0);
    if (!free.empty()) {
      std::vector<std::vector<double>> hf(free.size(), std::vector<double>(free.size()));
      std::vector<double> rhs(free.size());
      for (std::size_t a = 0; a < free.size(); ++a) {
        rhs[a] = -cur.grad[free[a]];
        for (std::size_t b = 0; b < free.size(); ++b) hf[a][b] = hess[free[a]][free[b]];
      }
      const auto d = regularized_solve(std::move(hf), std::move(rhs));
      for (std::size_t a = 0; a < free.size(); ++a) dir[free[a]] = d[a];
    }

    auto try_direction = [&](const std::vector<double>& d, std::vector<double>& y_next,
                             Dual::Eval& next) {
      for (double t = 1.0; t > 1e-20; t *= 0.5) {
        double decrease = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
          y_next[j] = std::max(0.0, y[j] + t * d[j]);
          decrease += cur.grad[j] * (y_next[j] - y[j]);
        }
        if (decrease >= 0.0) continue;
        next = dual.evaluate(y_next);
        if (next.value <= cur.value + 1e-4 * decrease) return true;
      }
      return false;
    };

    std::vector<double> y_next(m);
    Dual::Eval next;
    if (!try_direction(dir, y_next, next)) {
      std::vector<double> steep(m);
      for (std::size_t j = 0; j < m; ++j) steep[j] = -cur.grad[j];
      if (!try_direction(steep, y_next, next)) break;
    }
    y = std::move(y_next);
    cur = std::move(next);
  }
  run.residual = projected_residual(y, cur.grad);
  run.y = std::move(y);
  return run;
}

bool lexicographically_less(const std::vector<double>& a, const std::vector<double>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

double finite_part_objective(const CompositeProblem& prob, const std::vector<double>& values) {
  return expected_utility(prob.alternative, values, prob.utility);
}

LinearProgram validity_polytope(std::span<const double> gain, std::span<const FiniteDistribution> nulls,
                                const Level& level, const std::vector<std::size_t>& vars) {
  LinearProgram lp;
  for (std::size_t i : vars) {
    lp.objective.push_back(gain[i]);
    lp.upper.push_back(level.cap());
  }
  for (const auto& p : nulls) {
    std::vector<double> row;
    for (std::size_t i : vars) row.push_back(p[i]);
    lp.rows.push_back(std::move(row));
    lp.rhs.push_back(1.0);
  }
  return lp;
}

std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

CompositeSolution linear_solution(const CompositeProblem& prob) {
  const std::size_t n = prob.alternative.size();
  const auto vars = all_indices(n);
  const LpResult lp = solve_lp(validity_polytope(prob.alternative.probs(), prob.nulls, prob.level, vars));
  if (!lp.bounded) throw InfeasibleError("linear program unbounded");
  CompositeSolution sol;
  sol.values = lp.x;
  sol.iterations = 0;
  sol.restarts = 1;
  return sol;
}

}  // namespace

void CompositeProblem::validate() const {
  if (nulls.empty()) throw InputError("composite problem needs at least one null distribution");
  for (const auto& p : nulls) require_same_space(p, alternative);
  if (level.is_zero()) {
    const auto h = utility.exponent();
    if (!h || *h > 0.0)
      throw FrameworkViolation("level 0 composite problems are supported only for h <= 0");
  }
}

ContinuousTest CompositeSolution::test(const CompositeProblem& prob) const {
  return ContinuousTest::tabulated(prob.level, prob.alternative, values);
}

CompositeSolution solve_composite(const CompositeProblem& prob, const SolverOptions& options) {
  prob.validate();
  const std::size_t n = prob.alternative.size();
  const FiniteDistribution& q = prob.alternative;

  CompositeSolution sol;
  if (!prob.utility.invertible()) {
    sol = linear_solution(prob);
  } else {
    std::vector<double> base(n, 0.0);
    std::vector<std::size_t> index;
    for (std::size_t i = 0; i < n; ++i) {
      if (q[i] == 0.0) continue;
      bool charged = false;
      for (const auto& p : prob.nulls) charged = charged || p[i] > 0.0;
      if (charged) index.push_back(i);
      else base[i] = prob.level.cap();
    }
    const Dual dual(prob, index);
    const std::size_t m = dual.dim();

    std::vector<std::vector<double>> found;
    std::vector<std::vector<double>> multipliers;
    std::vector<double> objectives;
    int total_iterations = 0;
    const int restarts = std::max(1, options.restarts);
    for (int r = 0; r < restarts; ++r) {
      std::vector<double> y0(m, 1.0 / static_cast<double>(m));
      if (r > 0) {
        std::mt19937_64 rng(options.seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(r));
        std::uniform_real_distribution<double> draw(0.05, 2.0);
        for (double& v : y0) v = draw(rng) / static_cast<double>(m);
      }
      DualRun run = index.empty() ? DualRun{y0, 0, 0.0} : minimize_dual(dual, y0, options.max_iter);
      total_iterations += run.iterations;
      std::vector<double> values = base;
      if (!index.empty()) {
        const auto e = dual.evaluate(run.y);
        for (std::size_t k = 0; k < index.size(); ++k) values[index[k]] = e.eps[k];
        // Steep exponents can push a positive optimum below the double range.
        if (std::isinf(prob.utility.derivative(0.0)))
          for (std::size_t i : index)
            if (values[i] == 0.0) values[i] = std::numeric_limits<double>::denorm_min();
        double worst = 0.0;
        for (const auto& p : prob.nulls) worst = std::max(worst, expectation(p, values));
        if (worst > 1.0)
          for (std::size_t i : index) values[i] /= worst;
      }
      objectives.push_back(finite_part_objective(prob, values));
      found.push_back(std::move(values));
      multipliers.push_back(std::move(run.y));
    }

    std::size_t best = 0;
    for (std::size_t r = 1; r < found.size(); ++r) {
      const double gap = objectives[r] - objectives[best];
      const double scale = 1e-12 * std::max(1.0, std::abs(objectives[best]));
      if (gap > scale || (std::abs(gap) <= scale && lexicographically_less(found[r], found[best]))) best = r;
    }
    sol.values = found[best];
    sol.multipliers = multipliers[best];
    sol.iterations = total_iterations;
    sol.restarts = restarts;
    for (const auto& other : found)
      for (std::size_t i = 0; i < n; ++i)
        if (q[i] > 0.0 && std::isfinite(sol.values[i]))
          sol.restart_spread = std::max(sol.restart_spread, std::abs(other[i] - sol.values[i]));
  }

  sol.objective = finite_part_objective(prob, sol.values);
  sol.foc_slack = verify_foc(sol.values, prob);
  if (!(sol.foc_slack <= options.tol))
    throw NonConvergence("composite solver: first-order slack " + std::to_string(sol.foc_slack) +
                         " exceeds tolerance after " + std::to_string(sol.iterations) + " iterations");
  sol.ripr = ripr(sol.values, prob);
  if (prob.utility.invertible()) sol.duality_gap = duality_gap(sol.values, sol.ripr.mass, prob);
  return sol;
}

double verify_foc(std::span<const double> values, const CompositeProblem& prob) {
  prob.validate();
  const FiniteDistribution& q = prob.alternative;
  if (values.size() != q.size()) throw ModelMismatch("verify_foc: length mismatch");
  std::vector<double> gain(q.size(), 0.0);
  std::vector<std::size_t> vars;
  double at_solution = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (std::isinf(values[i])) continue;
    vars.push_back(i);
    if (q[i] == 0.0) continue;
    const double d = prob.utility.derivative(values[i]);
    if (std::isinf(d)) return kInf;
    gain[i] = q[i] * d;
    at_solution += gain[i] * values[i];
  }
  const LpResult lp = solve_lp(validity_polytope(gain, prob.nulls, prob.level, vars));
  if (!lp.bounded) return kInf;
  return lp.value - at_solution;
}

RiprMeasure ripr(std::span<const double> values, const CompositeProblem& prob) {
  const FiniteDistribution& q = prob.alternative;
  if (values.size() != q.size()) throw ModelMismatch("ripr: length mismatch");
  const Utility& u = prob.utility;
  RiprMeasure out;
  out.outcomes = q.outcomes();
  out.mass.assign(q.size(), 0.0);
  double norm = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] == 0.0) continue;
    if (values[i] <= 0.0 && std::isinf(u.derivative(values[i])))
      throw InputError("positivity violation: zero test value on the alternative's support");
    norm += q[i] * (std::isinf(values[i]) ? u.scale_at_infinity() : values[i] * u.derivative(values[i]));
  }
  if (!(norm > 0.0) || std::isinf(norm)) throw InputError("ripr: normalizer is not a positive finite number");
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] == 0.0 || std::isinf(values[i])) continue;
    out.mass[i] = q[i] * u.derivative(values[i]) / norm;
    out.total_mass += out.mass[i];
  }
  out.normalizer = norm;
  return out;
}

Membership effective_membership(std::span<const double> candidate,
                                std::span<const FiniteDistribution> nulls, const Level& level) {
  if (nulls.empty()) throw InputError("effective_membership: empty null set");
  for (const auto& p : nulls)
    if (p.size() != candidate.size()) throw ModelMismatch("effective_membership: length mismatch");
  const LpResult lp = solve_lp(validity_polytope(candidate, nulls, level, all_indices(candidate.size())));
  if (!lp.bounded) return {kInf, false};
  return {lp.value, lp.value <= 1.0 + 1e-9};
}

Membership effective_membership(const FiniteDistribution& candidate,
                                std::span<const FiniteDistribution> nulls, const Level& level) {
  for (const auto& p : nulls) require_same_space(p, candidate);
  return effective_membership(candidate.probs(), nulls, level);
}

double renyi_divergence(const FiniteDistribution& q, const FiniteDistribution& p, double order) {
  require_same_space(q, p);
  if (!(order > 0.0)) throw InputError("Renyi order must be positive");
  if (std::isinf(order)) {
    double worst = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      if (q[i] == 0.0) continue;
      if (p[i] == 0.0) return kInf;
      worst = std::max(worst, q[i] / p[i]);
    }
    return std::log(worst);
  }
  if (order == 1.0) {
    double kl = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      if (q[i] == 0.0) continue;
      if (p[i] == 0.0) return kInf;
      kl += q[i] * std::log(q[i] / p[i]);
    }
    return kl;
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] == 0.0) continue;
    if (p[i] == 0.0) {
      if (order > 1.0) return kInf;
      continue;
    }
    acc += q[i] * std::pow(q[i] / p[i], order - 1.0);
  }
  if (acc == 0.0) return kInf;
  return std::log(acc) / (order - 1.0);
}

double duality_gap(std::span<const double> values, std::span<const double> ripr_mass,
                   const CompositeProblem& prob) {
  const FiniteDistribution& q = prob.alternative;
  const Utility& u = prob.utility;
  if (!u.invertible()) throw InputError("duality_gap needs an invertible derivative");
  if (values.size() != q.size() || ripr_mass.size() != q.size()) throw ModelMismatch("duality_gap: length mismatch");
  double norm = 0.0;
  double finite_norm = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] == 0.0) continue;
    if (std::isinf(values[i])) {
      norm += q[i] * u.scale_at_infinity();
    } else {
      const double s = q[i] * values[i] * u.derivative(values[i]);
      norm += s;
      finite_norm += s;
    }
  }
  double primal = 0.0;
  double dual = finite_norm;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] == 0.0 || std::isinf(values[i])) continue;
    primal += q[i] * u.value(values[i]);
    const double y = norm * ripr_mass[i] / q[i];
    if (!(y > 0.0)) return kInf;
    dual += q[i] * legendre(u, y);
  }
  return std::abs(primal - dual);
}

NpLimit np_limit(const std::vector<FiniteDistribution>& nulls, const FiniteDistribution& alternative,
                 double alpha, const std::vector<double>& schedule, const SolverOptions& options) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InputError("np_limit needs alpha in (0,1]");
  if (schedule.empty()) throw InputError("np_limit needs a nonempty schedule");
  NpLimit out;
  out.schedule = schedule;
  const Utility linear = Utility::power(1.0);
  for (double h : schedule) {
    if (!(h < 1.0)) throw InputError("np_limit schedule entries must be < 1");
    const CompositeProblem prob{nulls, alternative, Level(alpha), Utility::power(h)};
    const CompositeSolution sol = solve_composite(prob, options);
    out.powers.push_back(expected_utility(alternative, sol.values, linear) + 1.0);
    out.tests.push_back(sol.values);
  }
  const CompositeProblem lp_prob{nulls, alternative, Level(alpha), linear};
  const CompositeSolution lp = solve_composite(lp_prob, options);
  out.lp_test = lp.values;
  out.lp_power = lp.objective + 1.0;
  out.deviation = std::abs(out.powers.back() - out.lp_power);
  return out;
}

double testing_distance(const FiniteDistribution& q, const FiniteDistribution& p_star) {
  return std::exp(renyi_divergence(q, p_star, kInf));
}

}  // namespace etest
