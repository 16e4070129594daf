#include "etest/gaussian.hpp"

#include <charconv>
#include <cmath>
#include <limits>

#include "etest/errors.hpp"
#include "etest/normal.hpp"

namespace etest {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxIterations = 200;

void check_model(double mu, double sigma, double h) {
  if (!std::isfinite(mu)) throw InputError("mu must be finite");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InputError("sigma must be positive");
  if (!(h < 1.0)) throw InputError("exponential form needs h < 1");
}

void append_number(std::string& out, double x) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  out.append(buf, res.ptr);
}

}  // namespace

ContinuousTest closed_form_level0(double mu, double sigma, double h) {
  check_model(mu, sigma, h);
  return ContinuousTest::gaussian(Level(0.0), GaussianBody{mu, sigma, h, 0.0, std::nullopt});
}

double normalizer_b0(double mu, double sigma, double h) {
  check_model(mu, sigma, h);
  const double k = 1.0 / (1.0 - h);
  return std::exp(-k * mu * mu * (k - 1.0) / (2.0 * sigma * sigma));
}

double capped_null_expectation(double mu, double sigma, double h, double log_b, double alpha) {
  check_model(mu, sigma, h);
  const Level level(alpha);
  const double cap = level.cap();
  if (log_b == kInf) return cap;
  if (std::isinf(cap)) return std::exp(log_b);
  const double log_cap = std::log(cap);
  if (mu == 0.0) return std::min(std::exp(log_b), cap);
  // The uncapped integrand is b times the N(k|mu|, sigma^2) density over the
  // null density; it reaches the cap at t (in the |mu| orientation).
  const double m = std::abs(mu);
  const double k = 1.0 / (1.0 - h);
  const double t = (sigma * sigma * (log_cap - log_b) + 0.5 * k * k * m * m) / (k * m);
  const double below = std::exp(log_b + log_normal_cdf((t - k * m) / sigma));
  return below + cap * normal_sf(t / sigma);
}

double log_inflation_b_alpha(double mu, double sigma, double h, double alpha, double tol) {
  check_model(mu, sigma, h);
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InputError("inflation needs alpha in (0,1]");
  if (alpha == 1.0) return kInf;
  auto e = [&](double lb) { return capped_null_expectation(mu, sigma, h, lb, alpha); };
  if (e(0.0) >= 1.0) return 0.0;
  double lo = 0.0;
  double hi = 60.0;
  int expansions = 0;
  while (e(hi) < 1.0) {
    lo = hi;
    hi *= 2.0;
    if (++expansions > 64) throw NonConvergence("inflation constant bracket not found");
  }
  for (int it = 0; it < kMaxIterations; ++it) {
    if (hi - lo <= tol * std::max(1.0, hi)) return lo;
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) return lo;
    if (e(mid) <= 1.0) lo = mid;
    else hi = mid;
  }
  throw NonConvergence("inflation constant not resolved within 200 bisection steps");
}

double inflation_b_alpha(double mu, double sigma, double h, double alpha, double tol) {
  return std::exp(log_inflation_b_alpha(mu, sigma, h, alpha, tol));
}

ContinuousTest calibrated_test(double mu, double sigma, double h, double alpha) {
  if (h == 1.0) return np_z_test(mu, sigma, alpha);
  if (alpha == 0.0) return closed_form_level0(mu, sigma, h);
  const double log_b = log_inflation_b_alpha(mu, sigma, h, alpha);
  return ContinuousTest::gaussian(Level(alpha), GaussianBody{mu, sigma, h, log_b, std::nullopt});
}

ContinuousTest np_z_test(double mu, double sigma, double alpha) {
  if (!std::isfinite(mu) || mu == 0.0) throw InputError("Z test needs a nonzero finite mu");
  if (!(sigma > 0.0)) throw InputError("sigma must be positive");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InputError("Z test needs alpha in (0,1]");
  const double z = normal_quantile(1.0 - alpha);
  const double threshold = mu > 0.0 ? sigma * z : -sigma * z;
  return ContinuousTest::gaussian(Level(alpha), GaussianBody{mu, sigma, 1.0, 0.0, threshold});
}

std::vector<FigureRow> figure_data(double mu, double sigma, double alpha,
                                   const std::vector<double>& h_list,
                                   const std::vector<double>& x_grid) {
  std::vector<FigureRow> rows;
  rows.reserve(h_list.size() * x_grid.size());
  for (double h : h_list) {
    if (h == 1.0 && alpha == 0.0)
      throw InputError("h = 1 has no level-0 curve (the optimum degenerates)");
    const ContinuousTest test = calibrated_test(mu, sigma, h, alpha);
    for (double x : x_grid) {
      if (!std::isfinite(x)) throw InputError("figure grid must be finite");
      rows.push_back({x, h, test.evaluate(x)});
    }
  }
  return rows;
}

std::vector<double> linear_grid(double from, double to, std::size_t points) {
  if (points < 2) throw InputError("grid needs at least two points");
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i)
    grid[i] = from + (to - from) * static_cast<double>(i) / static_cast<double>(points - 1);
  return grid;
}

std::string figure_csv(const std::vector<FigureRow>& rows) {
  std::string out = "x,h,value\n";
  for (const auto& r : rows) {
    append_number(out, r.x);
    out += ',';
    append_number(out, r.h);
    out += ',';
    if (std::isinf(r.value)) out += "inf";
    else append_number(out, r.value);
    out += '\n';
  }
  return out;
}

MonteCarloEstimate mc_validity_gaussian(const ContinuousTest& test, std::size_t n, std::uint64_t seed) {
  if (n < 10000) throw InputError("Gaussian Monte Carlo audit needs n >= 10^4");
  return check_validity_mc(test, GaussianLocation(0.0, test.gaussian_body().sigma), n, seed);
}

}  // namespace etest
