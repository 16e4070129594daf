#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "etest/evidence.hpp"

namespace etest {

// Level-0 optimum for N(mu, sigma^2) against N(0, sigma^2): the likelihood
// ratio of N(mu/(1-h), sigma^2) against the null.
ContinuousTest closed_form_level0(double mu, double sigma, double h);

// Constant turning LR^(1/(1-h)) into a null-mean-one test.
double normalizer_b0(double mu, double sigma, double h);

// E_{N(0,sigma^2)}[min(b * e0(X), 1/alpha)] for the parametric family, in closed form.
double capped_null_expectation(double mu, double sigma, double h, double log_b, double alpha);

inline constexpr double kDefaultInflationTolerance = 1e-12;

// log b >= 0 with E[min(b e0, 1/alpha)] = 1 (the returned side never exceeds 1).
// +inf at alpha = 1, where the optimum is the constant cap.
double log_inflation_b_alpha(double mu, double sigma, double h, double alpha,
                             double tol = kDefaultInflationTolerance);
double inflation_b_alpha(double mu, double sigma, double h, double alpha,
                         double tol = kDefaultInflationTolerance);

// min(b e0, 1/alpha) with b calibrated; h = 1 gives the Z test.
ContinuousTest calibrated_test(double mu, double sigma, double h, double alpha);

ContinuousTest np_z_test(double mu, double sigma, double alpha);

struct FigureRow {
  double x;
  double h;
  double value;
};

std::vector<FigureRow> figure_data(double mu, double sigma, double alpha,
                                   const std::vector<double>& h_list,
                                   const std::vector<double>& x_grid);
std::vector<double> linear_grid(double from, double to, std::size_t points);
std::string figure_csv(const std::vector<FigureRow>& rows);

MonteCarloEstimate mc_validity_gaussian(const ContinuousTest& test, std::size_t n, std::uint64_t seed);

}  // namespace etest
