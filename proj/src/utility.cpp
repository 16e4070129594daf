#include "etest/utility.hpp"

#include <cmath>
#include <limits>

#include "etest/errors.hpp"

namespace etest {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

Utility Utility::power(double h) {
  if (!std::isfinite(h) || h > 1.0) throw InputError("power utility needs finite h <= 1");
  Utility u;
  u.family_ = h == 0.0 ? Family::log : Family::power;
  u.h_ = h;
  u.name_ = h == 0.0 ? "log" : "power(" + std::to_string(h) + ")";
  u.strictly_concave_ = h < 1.0;
  return u;
}

Utility Utility::log() { return power(0.0); }

Utility Utility::custom(std::string name, Fn value, Fn derivative, Fn derivative_inverse,
                        bool strictly_concave, std::optional<double> bounded_on) {
  if (!value || !derivative || (strictly_concave && !derivative_inverse))
    throw InputError("custom utility needs value, derivative and inverse derivative");
  Utility u;
  u.family_ = Family::custom;
  u.name_ = std::move(name);
  u.strictly_concave_ = strictly_concave;
  u.bounded_on_ = bounded_on;
  u.value_fn_ = std::move(value);
  u.derivative_fn_ = std::move(derivative);
  u.inverse_fn_ = std::move(derivative_inverse);
  if (strictly_concave) {
    for (double x = 1e-3; x <= 1e3; x *= 1.5) {
      const double back = u.inverse_fn_(u.derivative_fn_(x));
      if (!(std::abs(back - x) <= 1e-9 * std::max(1.0, x)))
        throw InputError("custom utility: inverse derivative fails the round trip at x=" + std::to_string(x));
    }
  }
  return u;
}

std::optional<double> Utility::exponent() const {
  if (family_ == Family::custom) return std::nullopt;
  return h_;
}

double Utility::value(double x) const {
  if (family_ == Family::custom) return value_fn_(x);
  if (x == kInf) return h_ < 0.0 ? -1.0 / h_ : kInf;
  if (h_ == 0.0) return x == 0.0 ? -kInf : std::log(x);
  if (x == 0.0) return h_ < 0.0 ? -kInf : -1.0 / h_;
  return std::expm1(h_ * std::log(x)) / h_;
}

double Utility::derivative(double x) const {
  if (family_ == Family::custom) return derivative_fn_(x);
  if (h_ == 1.0) return 1.0;
  if (x == 0.0) return kInf;
  if (x == kInf) return 0.0;
  return std::exp((h_ - 1.0) * std::log(x));
}

double Utility::derivative_inverse(double y) const {
  if (!strictly_concave_) throw InputError("utility '" + name_ + "' has no invertible derivative");
  if (family_ == Family::custom) return inverse_fn_(y);
  if (y == 0.0) return kInf;
  if (y == kInf) return 0.0;
  return std::exp(std::log(y) / (h_ - 1.0));
}

double Utility::derivative_inverse_slope(double y) const {
  if (!strictly_concave_) throw InputError("utility '" + name_ + "' has no invertible derivative");
  if (family_ == Family::custom) {
    const double step = 1e-6 * std::max(y, 1e-12);
    return (inverse_fn_(y + step) - inverse_fn_(y - step)) / (2.0 * step);
  }
  const double k = 1.0 / (h_ - 1.0);
  return k * std::exp((k - 1.0) * std::log(y));
}

double Utility::scale_at_infinity() const {
  if (family_ == Family::custom) {
    const double x = 1e12;
    return x * derivative_fn_(x);
  }
  if (h_ < 0.0) return 0.0;
  if (h_ == 0.0) return 1.0;
  return kInf;
}

Admissibility admissibility(const Utility& u, double alpha) {
  if (alpha > 0.0) return {true, "alpha > 0 bounds the utility on [0, 1/alpha]"};
  if (u.bounded_on()) return {true, "utility declared bounded"};
  if (auto h = u.exponent()) {
    if (*h == 0.0) return {true, "xU'(x)=1"};
    if (*h < 0.0) return {true, "xU'(x)=x^h bounded for h <= 0"};
    return {false, "not guaranteed: xU'(x) unbounded at level 0"};
  }
  const double near = 1e9 * u.derivative(1e9);
  const double far = 1e12 * u.derivative(1e12);
  const bool growing = !(far <= near * (1.0 + 1e-6));
  if (!growing && std::isfinite(far)) return {true, "xU'(x) numerically bounded"};
  return {false, "not guaranteed: xU'(x) appears unbounded"};
}

double generalized_mean(const FiniteDistribution& q, std::span<const double> values, double h) {
  if (values.size() != q.size()) throw ModelMismatch("generalized_mean: length mismatch");
  if (h > 1.0) throw InputError("generalized_mean: h must be <= 1");
  for (double v : values)
    if (std::isnan(v) || v < 0.0) throw InputError("generalized_mean: values must be >= 0");
  if (h == 0.0) {
    double acc = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (q[i] == 0.0) continue;
      if (values[i] == 0.0) return 0.0;
      acc += q[i] * std::log(values[i]);
    }
    return std::exp(acc);
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (q[i] == 0.0) continue;
    if (values[i] == 0.0) {
      if (h < 0.0) return 0.0;
      continue;
    }
    acc += q[i] * std::pow(values[i], h);
  }
  return std::pow(acc, 1.0 / h);
}

double legendre(const Utility& u, double y) {
  if (!(y > 0.0)) throw InputError("legendre: y must be positive");
  const double x = u.derivative_inverse(y);
  return u.value(x) - y * x;
}

double expected_utility(const FiniteDistribution& q, std::span<const double> values, const Utility& u) {
  if (values.size() != q.size()) throw ModelMismatch("expected_utility: length mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (q[i] == 0.0 || std::isinf(values[i])) continue;
    acc += q[i] * u.value(values[i]);
  }
  return acc;
}

}  // namespace etest
