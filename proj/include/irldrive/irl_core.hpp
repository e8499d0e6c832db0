#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "irldrive/features.hpp"
#include "irldrive/scene.hpp"

namespace irldrive {

// One training scene: the demonstration and the generated candidates, with
// features already normalized. Endpoints are optional and only used to
// report human likeness during training.
struct SceneEntry {
  std::string scene_id;
  FeatureVector demo{};
  std::vector<FeatureVector> candidates;
  std::vector<Point2> endpoints;
  Point2 truth;
};

using FeatureMask = std::array<bool, kFeatureCount>;

inline constexpr double kCollisionWeight = -10.0;

// Which weights are learned; the rest are pinned to `fixed`.
struct WeightLayout {
  FeatureMask learnable{true, true, true, true, true, true, false, true};
  FeatureVector fixed{0, 0, 0, 0, 0, 0, kCollisionWeight, 0};

  // Collision pinned at -10, the rest learnable.
  static WeightLayout standard() { return {}; }
  // Same as standard but with `feature` pinned to 0, which removes it from
  // the reward.
  static WeightLayout without(FeatureIndex feature);
};

double reward(const FeatureVector& theta, const FeatureVector& f);

// Boltzmann distribution over the scene's candidates (the demonstration is
// appended last when include_demo is set).
std::vector<double> candidate_distribution(const FeatureVector& theta,
                                           const SceneEntry& scene,
                                           bool include_demo = false);

// theta . f_demo - log sum_i exp(theta . f_i).
double log_likelihood(const FeatureVector& theta, const SceneEntry& scene,
                      bool include_demo = false);

// Regularized log-likelihood summed over scenes; the penalty covers
// learnable weights only.
double objective(const FeatureVector& theta, std::span<const SceneEntry> buffer,
                 double lambda, const WeightLayout& layout = {},
                 bool include_demo = false);

// Gradient of objective; pinned components are 0.
FeatureVector gradient(const FeatureVector& theta,
                       std::span<const SceneEntry> buffer, double lambda,
                       const WeightLayout& layout = {},
                       bool include_demo = false);

// Per-scene mean of f_demo - E[f] under theta.
FeatureVector mean_feature_gap(const FeatureVector& theta,
                               std::span<const SceneEntry> buffer,
                               bool include_demo = false);

class Adam {
 public:
  explicit Adam(double alpha, double beta1 = 0.9, double beta2 = 0.999,
                double eps = 1e-8);

  // Ascent step on the components selected by `mask`.
  void step(FeatureVector& theta, const FeatureVector& grad,
            const FeatureMask& mask);

 private:
  double alpha_, beta1_, beta2_, eps_;
  FeatureVector m_{}, v_{};
  int t_ = 0;
};

struct TrainOptions {
  double lambda = 0.01;
  double alpha = 0.05;
  int epochs = 200;
  std::uint64_t seed = 0;
  double init_std = 0.05;
  bool include_demo_in_partition = false;
  WeightLayout layout;
};

struct EpochRecord {
  int epoch = 0;
  double objective = 0.0;
  double mean_log_likelihood = 0.0;
  double feature_gap_l2 = 0.0;
  // NaN when the buffer carries no endpoints.
  double train_human_likeness = 0.0;
  FeatureVector theta{};
};

struct TrainReport {
  std::uint64_t seed = 0;
  FeatureVector initial_theta{};
  FeatureVector theta{};
  // Row 0 describes the initialization; row e the weights after epoch e.
  std::vector<EpochRecord> epochs;
};

FeatureVector initial_weights(const TrainOptions& options);

EpochRecord evaluate_epoch(const FeatureVector& theta,
                           std::span<const SceneEntry> buffer,
                           const TrainOptions& options, int epoch);

// Full-batch Adam ascent on the objective. Throws ConfigError for an empty
// buffer or a scene with fewer than two candidates, NumericError when the
// objective stops being finite.
TrainReport train(std::span<const SceneEntry> buffer,
                  const TrainOptions& options = {});

}  // namespace irldrive
