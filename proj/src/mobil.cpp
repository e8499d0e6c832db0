#include "irldrive/mobil.hpp"

#include <cmath>
#include <limits>

namespace irldrive {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int lane_of(const LaneVehicle& v, const RoadModel& road) {
  return road.lane_at(v.x, v.y).value_or(0);
}

struct Neighbors {
  const LaneVehicle* leader = nullptr;
  const LaneVehicle* follower = nullptr;
};

// Nearest vehicles ahead and behind position x in `lane`, skipping `skip`.
Neighbors neighbors_in_lane(double x, int lane,
                            std::span<const LaneVehicle> others,
                            const RoadModel& road, long skip) {
  Neighbors n;
  for (const auto& o : others) {
    if (o.id == skip || lane_of(o, road) != lane) continue;
    if (o.x > x) {
      if (!n.leader || o.x < n.leader->x) n.leader = &o;
    } else if (o.x < x) {
      if (!n.follower || o.x > n.follower->x) n.follower = &o;
    }
  }
  return n;
}

double gap_between(double rear_x, double rear_len, double front_x,
                   double front_len) {
  return front_x - rear_x - 0.5 * (front_len + rear_len);
}

// IDM acceleration of `rear` behind `front` (free road when front is null).
double accel_behind(const LaneVehicle& rear, const LaneVehicle* front,
                    IDMParams idm) {
  idm.v0 = std::max(rear.desired_speed, 0.1);
  if (!front) return idm_acceleration(rear.speed, 0.0, kInf, idm);
  const double gap = gap_between(rear.x, rear.length, front->x, front->length);
  if (gap <= 0.0) return -9.0;
  return idm_acceleration(rear.speed, rear.speed - front->speed, gap, idm);
}

}  // namespace

LaneChangeEvaluation evaluate_lane_change(const LaneVehicle& subject,
                                          int target_lane,
                                          std::span<const LaneVehicle> others,
                                          const RoadModel& road,
                                          const IDMParams& idm,
                                          const MOBILParams& mobil) {
  LaneChangeEvaluation eval;
  eval.target_lane = target_lane;
  const int current_lane = lane_of(subject, road);
  const auto here = neighbors_in_lane(subject.x, current_lane, others, road,
                                      subject.id);
  const auto there = neighbors_in_lane(subject.x, target_lane, others, road,
                                       subject.id);

  const double a_c = accel_behind(subject, here.leader, idm);
  const double a_c_new = accel_behind(subject, there.leader, idm);

  double gain_old = 0.0;
  if (here.follower) {
    const double a_o = accel_behind(*here.follower, &subject, idm);
    const double a_o_new = accel_behind(*here.follower, here.leader, idm);
    gain_old = a_o_new - a_o;
  }

  double gain_new = 0.0;
  eval.safe = true;
  if (there.leader &&
      gap_between(subject.x, subject.length, there.leader->x,
                  there.leader->length) <= 0.0) {
    eval.safe = false;
  }
  if (there.follower) {
    const double a_n = accel_behind(*there.follower, there.leader, idm);
    LaneVehicle moved = subject;
    moved.y = road.lane_center(target_lane);
    if (gap_between(there.follower->x, there.follower->length, moved.x,
                    moved.length) <= 0.0) {
      eval.safe = false;
    }
    const double a_n_new = accel_behind(*there.follower, &moved, idm);
    eval.new_follower_accel = a_n_new;
    gain_new = a_n_new - a_n;
    if (a_n_new < -mobil.b_safe) eval.safe = false;
  }

  eval.incentive =
      a_c_new - a_c + mobil.politeness * (gain_new + gain_old);
  eval.accepted = eval.safe && eval.incentive > mobil.a_th;
  return eval;
}

std::optional<LaneChangeEvaluation> mobil_lane_choice(
    const LaneVehicle& subject, std::span<const LaneVehicle> others,
    const RoadModel& road, const IDMParams& idm, const MOBILParams& mobil) {
  const int lane = lane_of(subject, road);
  if (lane == 0) return std::nullopt;
  std::optional<LaneChangeEvaluation> best;
  for (auto target : {road.left_neighbor(lane), road.right_neighbor(lane)}) {
    if (!target) continue;
    auto eval = evaluate_lane_change(subject, *target, others, road, idm, mobil);
    if (eval.accepted && (!best || eval.incentive > best->incentive)) {
      best = eval;
    }
  }
  return best;
}

}  // namespace irldrive
