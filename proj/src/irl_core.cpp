#include "irldrive/irl_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "irldrive/errors.hpp"
#include "irldrive/human_likeness.hpp"

namespace irldrive {
namespace {

// Rewards of the partition set: candidates, then optionally the demo.
std::vector<double> partition_rewards(const FeatureVector& theta,
                                      const SceneEntry& scene,
                                      bool include_demo) {
  std::vector<double> r;
  r.reserve(scene.candidates.size() + 1);
  for (const auto& f : scene.candidates) r.push_back(reward(theta, f));
  if (include_demo) r.push_back(reward(theta, scene.demo));
  return r;
}

double log_sum_exp(const std::vector<double>& r) {
  const double m = *std::max_element(r.begin(), r.end());
  if (!std::isfinite(m)) return m;
  double sum = 0.0;
  for (double v : r) sum += std::exp(v - m);
  return m + std::log(sum);
}

const FeatureVector& partition_feature(const SceneEntry& scene,
                                       std::size_t i) {
  return i < scene.candidates.size() ? scene.candidates[i] : scene.demo;
}

}  // namespace

WeightLayout WeightLayout::without(FeatureIndex feature) {
  WeightLayout layout;
  layout.learnable[feature] = false;
  layout.fixed[feature] = feature == kCollision ? kCollisionWeight : 0.0;
  return layout;
}

double reward(const FeatureVector& theta, const FeatureVector& f) {
  double r = 0.0;
  for (std::size_t i = 0; i < kFeatureCount; ++i) r += theta[i] * f[i];
  return r;
}

std::vector<double> candidate_distribution(const FeatureVector& theta,
                                           const SceneEntry& scene,
                                           bool include_demo) {
  auto p = partition_rewards(theta, scene, include_demo);
  if (p.empty()) return p;
  const double m = *std::max_element(p.begin(), p.end());
  double sum = 0.0;
  for (double& v : p) {
    v = std::exp(v - m);
    sum += v;
  }
  for (double& v : p) v /= sum;
  return p;
}

double log_likelihood(const FeatureVector& theta, const SceneEntry& scene,
                      bool include_demo) {
  return reward(theta, scene.demo) -
         log_sum_exp(partition_rewards(theta, scene, include_demo));
}

double objective(const FeatureVector& theta, std::span<const SceneEntry> buffer,
                 double lambda, const WeightLayout& layout, bool include_demo) {
  double j = 0.0;
  for (const auto& scene : buffer) {
    j += log_likelihood(theta, scene, include_demo);
  }
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    if (layout.learnable[i]) j -= lambda * theta[i] * theta[i];
  }
  return j;
}

FeatureVector gradient(const FeatureVector& theta,
                       std::span<const SceneEntry> buffer, double lambda,
                       const WeightLayout& layout, bool include_demo) {
  FeatureVector g{};
  for (const auto& scene : buffer) {
    const auto p = candidate_distribution(theta, scene, include_demo);
    for (std::size_t i = 0; i < kFeatureCount; ++i) g[i] += scene.demo[i];
    for (std::size_t c = 0; c < p.size(); ++c) {
      const auto& f = partition_feature(scene, c);
      for (std::size_t i = 0; i < kFeatureCount; ++i) g[i] -= p[c] * f[i];
    }
  }
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    g[i] = layout.learnable[i] ? g[i] - 2.0 * lambda * theta[i] : 0.0;
  }
  return g;
}

FeatureVector mean_feature_gap(const FeatureVector& theta,
                               std::span<const SceneEntry> buffer,
                               bool include_demo) {
  FeatureVector gap = gradient(theta, buffer, 0.0,
                               {{true, true, true, true, true, true, true, true},
                                {}},
                               include_demo);
  if (!buffer.empty()) {
    for (double& v : gap) v /= static_cast<double>(buffer.size());
  }
  return gap;
}

Adam::Adam(double alpha, double beta1, double beta2, double eps)
    : alpha_(alpha), beta1_(beta1), beta2_(beta2), eps_(eps) {}

void Adam::step(FeatureVector& theta, const FeatureVector& grad,
                const FeatureMask& mask) {
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, t_);
  const double c2 = 1.0 - std::pow(beta2_, t_);
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    if (!mask[i]) continue;
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
    theta[i] += alpha_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps_);
  }
}

FeatureVector initial_weights(const TrainOptions& options) {
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal(0.0, options.init_std);
  FeatureVector theta = options.layout.fixed;
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    if (options.layout.learnable[i]) theta[i] = normal(rng);
  }
  return theta;
}

EpochRecord evaluate_epoch(const FeatureVector& theta,
                           std::span<const SceneEntry> buffer,
                           const TrainOptions& options, int epoch) {
  EpochRecord rec;
  rec.epoch = epoch;
  rec.theta = theta;
  rec.objective = objective(theta, buffer, options.lambda, options.layout,
                            options.include_demo_in_partition);
  double ll = 0.0;
  for (const auto& scene : buffer) {
    ll += log_likelihood(theta, scene, options.include_demo_in_partition);
  }
  rec.mean_log_likelihood = ll / static_cast<double>(buffer.size());
  const auto gap =
      mean_feature_gap(theta, buffer, options.include_demo_in_partition);
  double sq = 0.0;
  for (double v : gap) sq += v * v;
  rec.feature_gap_l2 = std::sqrt(sq);

  double hl = 0.0;
  bool have_endpoints = true;
  for (const auto& scene : buffer) {
    if (scene.endpoints.size() != scene.candidates.size() ||
        scene.endpoints.empty()) {
      have_endpoints = false;
      break;
    }
    hl += human_likeness(candidate_distribution(theta, scene), scene.endpoints,
                         scene.truth);
  }
  rec.train_human_likeness =
      have_endpoints ? hl / static_cast<double>(buffer.size())
                     : std::numeric_limits<double>::quiet_NaN();
  return rec;
}

TrainReport train(std::span<const SceneEntry> buffer,
                  const TrainOptions& options) {
  if (buffer.empty()) throw ConfigError("training buffer is empty");
  for (const auto& scene : buffer) {
    if (scene.candidates.size() < 2) {
      throw ConfigError("scene " + scene.scene_id +
                        " has fewer than two candidates");
    }
  }
  if (options.epochs < 0) throw ConfigError("epochs must be >= 0");

  TrainReport report;
  report.seed = options.seed;
  FeatureVector theta = initial_weights(options);
  report.initial_theta = theta;

  auto record = [&](int epoch) {
    auto rec = evaluate_epoch(theta, buffer, options, epoch);
    if (!std::isfinite(rec.objective)) {
      throw NumericError("objective became non-finite at epoch " +
                         std::to_string(epoch));
    }
    report.epochs.push_back(rec);
  };

  record(0);
  Adam adam(options.alpha);
  for (int e = 1; e <= options.epochs; ++e) {
    const auto g = gradient(theta, buffer, options.lambda, options.layout,
                            options.include_demo_in_partition);
    for (double v : g) {
      if (!std::isfinite(v)) {
        throw NumericError("gradient became non-finite at epoch " +
                           std::to_string(e));
      }
    }
    adam.step(theta, g, options.layout.learnable);
    record(e);
  }
  report.theta = theta;
  return report;
}

}  // namespace irldrive
