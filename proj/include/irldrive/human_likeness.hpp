#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "irldrive/scene.hpp"

namespace irldrive {

// Indices of the k most probable candidates, highest first. Equal
// probabilities keep candidate order, so the lower index wins a tie.
std::vector<std::size_t> top_k_indices(std::span<const double> probabilities,
                                       std::size_t k);

double final_displacement(Point2 a, Point2 b);

// Minimum final displacement error over the top-k candidates (all of them
// when fewer than k). Throws EvalError when there are no candidates.
double human_likeness(std::span<const double> probabilities,
                      std::span<const Point2> endpoints, Point2 truth,
                      std::size_t k = 3);

}  // namespace irldrive
