#include "etest/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "etest/errors.hpp"

namespace etest {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivotEps = 1e-12;

void validate(const LinearProgram& lp) {
  const std::size_t n = lp.objective.size();
  if (lp.rows.size() != lp.rhs.size()) throw InputError("LP: rows and rhs differ in length");
  if (lp.upper.size() != n) throw InputError("LP: upper bounds must match the variable count");
  for (const auto& row : lp.rows)
    if (row.size() != n) throw InputError("LP: row width mismatch");
  for (double b : lp.rhs)
    if (!(b >= 0.0)) throw InputError("LP: right-hand sides must be >= 0");
  for (double u : lp.upper)
    if (!(u >= 0.0)) throw InputError("LP: upper bounds must be >= 0");
}

// Gaussian elimination with partial pivoting; false when singular.
bool solve_dense(std::vector<std::vector<double>> a, std::vector<double> b, std::vector<double>& x) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (std::abs(a[piv][col]) < 1e-13) return false;
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  x.assign(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
    x[i] = s / a[i][i];
  }
  return true;
}

}  // namespace

LpResult solve_simplex(const LinearProgram& lp) {
  validate(lp);
  const std::size_t n = lp.objective.size();
  std::vector<std::vector<double>> rows = lp.rows;
  std::vector<double> rhs = lp.rhs;
  for (std::size_t j = 0; j < n; ++j) {
    if (std::isinf(lp.upper[j])) continue;
    std::vector<double> row(n, 0.0);
    row[j] = 1.0;
    rows.push_back(std::move(row));
    rhs.push_back(lp.upper[j]);
  }
  const std::size_t m = rows.size();
  const std::size_t width = n + m + 1;
  std::vector<std::vector<double>> t(m + 1, std::vector<double>(width, 0.0));
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    std::copy(rows[i].begin(), rows[i].end(), t[i].begin());
    t[i][n + i] = 1.0;
    t[i][width - 1] = rhs[i];
    basis[i] = n + i;
  }
  for (std::size_t j = 0; j < n; ++j) t[m][j] = -lp.objective[j];

  const int max_pivots = 50000;
  for (int it = 0;; ++it) {
    if (it > max_pivots) throw NonConvergence("simplex: pivot limit reached");
    // Bland's rule: lowest-index improving column.
    std::size_t enter = width;
    for (std::size_t j = 0; j + 1 < width; ++j)
      if (t[m][j] < -kPivotEps) {
        enter = j;
        break;
      }
    if (enter == width) break;
    std::size_t leave = m;
    double best = kInf;
    for (std::size_t i = 0; i < m; ++i) {
      if (t[i][enter] <= kPivotEps) continue;
      const double ratio = t[i][width - 1] / t[i][enter];
      if (ratio < best - 1e-15 || (ratio <= best + 1e-15 && leave < m && basis[i] < basis[leave])) {
        best = ratio;
        leave = i;
      }
    }
    if (leave == m) return LpResult{false, kInf, {}};
    const double piv = t[leave][enter];
    for (double& v : t[leave]) v /= piv;
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == leave) continue;
      const double f = t[i][enter];
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < width; ++c) t[i][c] -= f * t[leave][c];
    }
    basis[leave] = enter;
  }
  LpResult out;
  out.x.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    if (basis[i] < n) out.x[basis[i]] = std::clamp(t[i][width - 1], 0.0, lp.upper[basis[i]]);
  out.value = 0.0;
  for (std::size_t j = 0; j < n; ++j) out.value += lp.objective[j] * out.x[j];
  return out;
}

LpResult solve_by_vertices(const LinearProgram& lp) {
  validate(lp);
  const std::size_t n = lp.objective.size();
  if (n > 6) throw InputError("vertex enumeration supports at most 6 variables");
  for (const auto& row : lp.rows)
    for (double a : row)
      if (a < 0.0) throw InputError("vertex enumeration needs nonnegative constraint rows");

  // Tightest implied box; an unbounded direction with positive gain means no optimum.
  std::vector<double> ub(lp.upper);
  std::vector<std::size_t> vars;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < lp.rows.size(); ++i)
      if (lp.rows[i][j] > 0.0) ub[j] = std::min(ub[j], lp.rhs[i] / lp.rows[i][j]);
    if (std::isinf(ub[j])) {
      if (lp.objective[j] > 0.0) return LpResult{false, kInf, {}};
      continue;
    }
    vars.push_back(j);
  }

  const std::size_t k = vars.size();
  const std::size_t m = lp.rows.size();
  LpResult best{true, -kInf, std::vector<double>(n, 0.0)};
  std::size_t combos = 1;
  for (std::size_t j = 0; j < k; ++j) combos *= 3;

  std::vector<double> x(n, 0.0);
  std::vector<int> status(k);
  for (std::size_t code = 0; code < combos; ++code) {
    std::size_t c = code;
    std::vector<std::size_t> free;
    for (std::size_t j = 0; j < k; ++j) {
      status[j] = static_cast<int>(c % 3);
      c /= 3;
      if (status[j] == 2) free.push_back(j);
    }
    const std::size_t f = free.size();
    if (f > m) continue;
    std::fill(x.begin(), x.end(), 0.0);
    for (std::size_t j = 0; j < k; ++j)
      if (status[j] == 1) x[vars[j]] = ub[vars[j]];

    // Every f-subset of rows as the tight set.
    std::vector<std::size_t> pick(f);
    for (std::size_t i = 0; i < f; ++i) pick[i] = i;
    while (true) {
      bool ok = true;
      if (f > 0) {
        std::vector<std::vector<double>> a(f, std::vector<double>(f));
        std::vector<double> rhs(f);
        for (std::size_t r = 0; r < f; ++r) {
          const auto& row = lp.rows[pick[r]];
          double fixed = 0.0;
          for (std::size_t j = 0; j < k; ++j)
            if (status[j] == 1) fixed += row[vars[j]] * ub[vars[j]];
          rhs[r] = lp.rhs[pick[r]] - fixed;
          for (std::size_t cidx = 0; cidx < f; ++cidx) a[r][cidx] = row[vars[free[cidx]]];
        }
        std::vector<double> sol;
        ok = solve_dense(std::move(a), std::move(rhs), sol);
        if (ok) {
          for (std::size_t cidx = 0; cidx < f; ++cidx) {
            const std::size_t j = vars[free[cidx]];
            const double tol = 1e-10 * std::max(1.0, ub[j]);
            if (sol[cidx] < -tol || sol[cidx] > ub[j] + tol) ok = false;
            x[j] = std::clamp(sol[cidx], 0.0, ub[j]);
          }
        }
      }
      if (ok) {
        for (std::size_t i = 0; i < m && ok; ++i) {
          double s = 0.0;
          for (std::size_t j = 0; j < n; ++j) s += lp.rows[i][j] * x[j];
          if (s > lp.rhs[i] + 1e-10 * std::max(1.0, lp.rhs[i])) ok = false;
        }
      }
      if (ok) {
        double value = 0.0;
        for (std::size_t j = 0; j < n; ++j) value += lp.objective[j] * x[j];
        if (value > best.value + 1e-13 * std::max(1.0, std::abs(value))) best = {true, value, x};
      }
      // Next combination.
      std::size_t i = f;
      while (i > 0 && pick[i - 1] == m - f + i - 1) --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (std::size_t r = i; r < f; ++r) pick[r] = pick[r - 1] + 1;
    }
  }
  return best;
}

LpResult solve_lp(const LinearProgram& lp) {
  bool nonnegative = lp.objective.size() <= 6;
  for (const auto& row : lp.rows)
    for (double a : row) nonnegative = nonnegative && a >= 0.0;
  return nonnegative ? solve_by_vertices(lp) : solve_simplex(lp);
}

}  // namespace etest
