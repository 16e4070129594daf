#pragma once

#include <vector>

namespace etest {

// maximize c.x  subject to  A x <= b,  0 <= x <= upper   (upper may be +inf)
// with b >= 0, so the origin is feasible.
struct LinearProgram {
  std::vector<double> objective;
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  std::vector<double> upper;
};

struct LpResult {
  bool bounded = true;
  double value = 0.0;
  std::vector<double> x;
};

LpResult solve_simplex(const LinearProgram& lp);
// Exhaustive vertex search for at most 6 variables; needs A >= 0 elementwise.
LpResult solve_by_vertices(const LinearProgram& lp);
// Vertex search for small programs with nonnegative rows, simplex otherwise.
LpResult solve_lp(const LinearProgram& lp);

}  // namespace etest
