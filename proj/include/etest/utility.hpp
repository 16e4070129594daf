#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>

#include "etest/measure.hpp"

namespace etest {

class Utility {
 public:
  enum class Family { power, log, custom };
  using Fn = std::function<double(double)>;

  // (x^h - 1)/h for h != 0, log x for h = 0.
  static Utility power(double h);
  static Utility log();
  // Round-trips derivative_inverse(derivative(x)) on a grid before accepting.
  static Utility custom(std::string name, Fn value, Fn derivative, Fn derivative_inverse,
                        bool strictly_concave, std::optional<double> bounded_on = std::nullopt);

  Family family() const { return family_; }
  // Exponent of the power family (0 for log); empty for custom utilities.
  std::optional<double> exponent() const;
  const std::string& name() const { return name_; }
  bool strictly_concave() const { return strictly_concave_; }
  bool invertible() const { return strictly_concave_; }
  std::optional<double> bounded_on() const { return bounded_on_; }

  double value(double x) const;
  double derivative(double x) const;
  // Inverse of the derivative; +inf at y = 0 and 0 at y = +inf.
  double derivative_inverse(double y) const;
  // d/dy of derivative_inverse (nonpositive).
  double derivative_inverse_slope(double y) const;
  // lim x U'(x) as x -> inf.
  double scale_at_infinity() const;

 private:
  Utility() = default;

  Family family_ = Family::power;
  double h_ = 0.0;
  std::string name_;
  bool strictly_concave_ = true;
  std::optional<double> bounded_on_;
  Fn value_fn_;
  Fn derivative_fn_;
  Fn inverse_fn_;
};

struct Admissibility {
  bool admissible;
  std::string reason;
};

Admissibility admissibility(const Utility& u, double alpha);

double generalized_mean(const FiniteDistribution& q, std::span<const double> values, double h);

// V(y) = sup_x U(x) - y x.
double legendre(const Utility& u, double y);

// E_Q[U(values)] over outcomes with q > 0 and a finite value.
double expected_utility(const FiniteDistribution& q, std::span<const double> values, const Utility& u);

}  // namespace etest
