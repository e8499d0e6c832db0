#include "irldrive/human_likeness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "irldrive/errors.hpp"

namespace irldrive {

std::vector<std::size_t> top_k_indices(std::span<const double> probabilities,
                                       std::size_t k) {
  std::vector<std::size_t> order(probabilities.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return probabilities[a] > probabilities[b];
                   });
  order.resize(std::min(k, order.size()));
  return order;
}

double final_displacement(Point2 a, Point2 b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

double human_likeness(std::span<const double> probabilities,
                      std::span<const Point2> endpoints, Point2 truth,
                      std::size_t k) {
  if (probabilities.empty()) {
    throw EvalError("human likeness needs at least one candidate");
  }
  if (probabilities.size() != endpoints.size()) {
    throw EvalError("probability and endpoint counts differ");
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i : top_k_indices(probabilities, k)) {
    best = std::min(best, final_displacement(endpoints[i], truth));
  }
  return best;
}

}  // namespace irldrive
