#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "irldrive/road_model.hpp"
#include "irldrive/scene.hpp"

namespace irldrive {

// Dense polynomial c[0] + c[1] t + ... in time.
template <std::size_t N>
struct Polynomial {
  std::array<double, N> c{};

  double value(double t) const { return derivative(t, 0); }

  // order-th time derivative at t.
  double derivative(double t, int order) const {
    double sum = 0.0;
    for (int j = static_cast<int>(N) - 1; j >= order; --j) {
      double falling = 1.0;
      for (int d = 0; d < order; ++d) falling *= j - d;
      sum = sum * t + falling * c[j];
    }
    return sum;
  }
};

using Quartic = Polynomial<5>;
using Quintic = Polynomial<6>;

struct TargetState {
  double vxe = 0.0;
  double axe = 0.0;
  double ye = 0.0;
  double vye = 0.0;
  double aye = 0.0;
};

struct PolynomialPair {
  Quartic longitudinal;
  Quintic lateral;
  double horizon = 5.0;
};

struct TrajectoryPoint {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  double vx = 0.0;
  double vy = 0.0;
  double ax = 0.0;
  double ay = 0.0;
  double jx = 0.0;
};

enum class TrajectorySource { kGenerated, kDemonstration, kBaseline };

struct CandidateTrajectory {
  std::vector<TrajectoryPoint> points;
  TrajectorySource source = TrajectorySource::kGenerated;
  std::optional<TargetState> target;
  // Present for polynomial plans; baselines carry sampled points only.
  std::optional<PolynomialPair> polynomials;

  double dt() const {
    return points.size() > 1 ? points[1].t - points[0].t : kFrameDt;
  }
  double horizon() const { return points.empty() ? 0.0 : points.back().t; }
};

// Quartic x(t) with x(0)=x_s, x'(0)=v_xs, x''(0)=a_xs, x'(T)=v_xe, x''(T)=a_xe.
Quartic solve_longitudinal(double x_s, double v_xs, double a_xs, double v_xe,
                           double a_xe, double T);

// Quintic y(t) matching position, velocity and acceleration at both ends.
Quintic solve_lateral(double y_s, double v_ys, double a_ys, double y_e,
                      double v_ye, double a_ye, double T);

// Samples both polynomials on t = k * dt, k = 0..steps.
CandidateTrajectory sample_polynomials(const PolynomialPair& poly, double dt,
                                       int steps, TrajectorySource source,
                                       std::optional<TargetState> target);

struct SamplingSpace {
  double speed_half_range = 5.0;
  double speed_step = 1.0;
};

// End targets: speeds v-5..v+5 (clamped at 0, duplicates removed) crossed
// with {current y, left lane centre, right lane centre} where those lanes
// exist. Ordered lateral-major: keep, left, right; speeds ascending.
std::vector<TargetState> sample_targets(const TrackState& ego_init,
                                        const RoadModel& road,
                                        const SamplingSpace& space = {});

// Boundary-value plans from the scene's initial ego state to every target.
std::vector<CandidateTrajectory> generate_candidates(
    const Scene& scene, const RoadModel& road,
    const SamplingSpace& space = {});

}  // namespace irldrive
