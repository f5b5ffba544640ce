#include "sof/cost_model.hpp"

#include <limits>

#include "sof/errors.hpp"

namespace sof {

cost_model_params cost_model_params::standard() {
  cost_model_params p;
  p.pieces = {{{1.0 / 3.0, 1.0, 0.0},
               {2.0 / 3.0, 3.0, 2.0 / 3.0},
               {9.0 / 10.0, 10.0, 16.0 / 3.0},
               {1.0, 70.0, 178.0 / 3.0},
               {11.0 / 10.0, 500.0, 1468.0 / 3.0},
               {std::numeric_limits<double>::infinity(), 5000.0, 16318.0 / 3.0}}};
  return p;
}

cost_model_params cost_model_params::printed_variant() {
  cost_model_params p = standard();
  p.pieces[5].intercept = 14318.0 / 3.0;
  return p;
}

double element_cost(double load, double capacity, const cost_model_params& params) {
  if (capacity <= 0) throw input_error("element_cost: capacity must be positive");
  if (load < 0) throw input_error("element_cost: negative load");
  double util = load / capacity;
  for (const auto& piece : params.pieces)
    if (util <= piece.threshold) return piece.slope * load - piece.intercept * capacity;
  const auto& last = params.pieces.back();
  return last.slope * load - last.intercept * capacity;
}

double element_cost(double load, double capacity) {
  static const cost_model_params params = cost_model_params::standard();
  return element_cost(load, capacity, params);
}

}  // namespace sof
