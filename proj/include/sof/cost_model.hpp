#pragma once

#include <array>

namespace sof {

// Convex piecewise-linear load cost. Each piece is c = slope*l - intercept*p
// on utilization l/p up to its threshold; the last piece is unbounded.
// Slopes 1,3,10,70,500,5000 with intercepts chosen so the curve is
// continuous at every breakpoint. This table is sometimes printed with
// 14318/3 as the last intercept, which breaks continuity at l/p = 11/10;
// the continuous value is 16318/3 and is the default here.
struct cost_model_params {
  struct piece {
    double threshold;  // piece applies while l/p <= threshold (last: +inf)
    double slope;
    double intercept;  // multiplies p
  };
  std::array<piece, 6> pieces;

  static cost_model_params standard();          // continuous last intercept
  static cost_model_params printed_variant();   // last intercept as printed
};

double element_cost(double load, double capacity, const cost_model_params& params);
double element_cost(double load, double capacity);  // standard params

}  // namespace sof
