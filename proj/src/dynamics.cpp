#include "swarmdef/dynamics.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>

#include <spdlog/spdlog.h>

namespace swarmdef {

void AgentParams::validate() const {
  if (!(u_max > 0.0) || !(drag > 0.0) || !(body_radius > 0.0)) {
    throw std::invalid_argument("agent params: u_max, drag and body_radius must be positive");
  }
  if (interception_radius < 0.0 || sensing_radius < 0.0) {
    throw std::invalid_argument("agent params: radii must be non-negative");
  }
}

AgentParams default_attacker_params() {
  return AgentParams{9.0, 1.5, 0.5, 0.0, 15.0};
}

AgentParams default_defender_params() {
  return AgentParams{18.4, 1.5, 0.5, 5.0, 400.0};
}

void WorldGeometry::validate() const {
  if (!(protected_radius > 0.0)) throw std::invalid_argument("world: protected radius must be positive");
  if (!(sense_inner < sense_outer)) throw std::invalid_argument("world: sensing annulus must satisfy inner < outer");
  for (const auto& s : safe_areas) {
    if (!(s.radius > 0.0)) throw std::invalid_argument("world: safe-area radius must be positive");
    if ((s.center - protected_center).norm() <= s.radius + protected_radius) {
      throw std::invalid_argument("world: safe area overlaps the protected area");
    }
  }
}

bool WorldGeometry::inside_protected(const Vec2& p) const {
  return (p - protected_center).norm() <= protected_radius;
}

Vec2 WorldGeometry::nearest_protected_point(const Vec2& p) const {
  Vec2 d = p - protected_center;
  double n = d.norm();
  if (n <= protected_radius) return p;
  return protected_center + d * (protected_radius / n);
}

PathParametrization::PathParametrization(std::vector<Vec2> waypoints)
    : points_(std::move(waypoints)) {
  if (points_.empty()) throw std::invalid_argument("path: no waypoints");
  cumulative_.push_back(0.0);
  for (size_t i = 1; i < points_.size(); ++i) {
    length_ += (points_[i] - points_[i - 1]).norm();
    cumulative_.push_back(length_);
  }
}

Vec2 PathParametrization::position_at(double gamma) const {
  if (points_.size() == 1 || gamma <= 0.0) return points_.front();
  if (gamma >= length_) return points_.back();
  for (size_t i = 1; i < points_.size(); ++i) {
    if (gamma <= cumulative_[i]) {
      double seg = cumulative_[i] - cumulative_[i - 1];
      if (seg <= 0.0) continue;
      double s = (gamma - cumulative_[i - 1]) / seg;
      return points_[i - 1] + s * (points_[i] - points_[i - 1]);
    }
  }
  return points_.back();
}

double PathParametrization::tangent_angle_at(double gamma) const {
  if (points_.size() < 2) return 0.0;
  size_t seg = points_.size() - 1;
  for (size_t i = 1; i < points_.size(); ++i) {
    if (gamma <= cumulative_[i] && cumulative_[i] > cumulative_[i - 1]) {
      seg = i;
      break;
    }
  }
  Vec2 d = points_[seg] - points_[seg - 1];
  return std::atan2(d.y(), d.x());
}

namespace dynamics {

namespace {

bool finite(const Vec2& v) { return std::isfinite(v.x()) && std::isfinite(v.y()); }

std::atomic<int> clamp_warnings{0};

}  // namespace

Vec2 clamp_norm(const Vec2& v, double max_norm) {
  double n = v.norm();
  if (n <= max_norm || n == 0.0) return v;
  return v * (max_norm / n);
}

AgentState step(const AgentState& state, const Vec2& accel, double dt,
                const AgentParams& params) {
  if (!finite(state.position) || !finite(state.velocity) || !finite(accel) ||
      !std::isfinite(dt)) {
    throw std::invalid_argument("step: non-finite input");
  }
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
  if (!(params.drag > 0.0)) throw std::invalid_argument("step: drag must be positive");

  Vec2 a = accel;
  if (a.norm() > params.u_max * (1.0 + 1e-12)) {
    if (clamp_warnings.fetch_add(1) < 5) {
      spdlog::warn("step: |a|={:.4f} exceeds u_max={:.4f}, clamping", a.norm(), params.u_max);
    }
    a = clamp_norm(a, params.u_max);
  }

  const double c = params.drag;
  const double e = std::exp(-c * dt);
  const double one_minus = -std::expm1(-c * dt);
  AgentState out;
  out.velocity = state.velocity * e + (a / c) * one_minus;
  out.position = state.position + state.velocity * (one_minus / c) +
                 (a / c) * (dt - one_minus / c);
  return out;
}

double speed_bound(const AgentParams& params) {
  if (!(params.drag > 0.0)) throw std::invalid_argument("speed_bound: drag must be positive");
  return params.u_max / params.drag;
}

double time_to_reach(const AgentState& state, const Vec2& target,
                     const AgentParams& params) {
  double d = (target - state.position).norm();
  if (d == 0.0) return 0.0;
  double v = speed_bound(params);
  if (v <= 0.0) return kInf;
  return d / v;
}

double reach_distance(double t, double v_par, const AgentParams& params) {
  const double c = params.drag;
  const double vbar = speed_bound(params);
  return vbar * t - (vbar - v_par) * (-std::expm1(-c * t)) / c;
}

Vec2 attacker_position_at(const AgentState& attacker, double t,
                          const WorldGeometry& world, const AgentParams& a_params) {
  Vec2 to_center = world.protected_center - attacker.position;
  double dist = to_center.norm();
  double run = dist - world.protected_radius;
  if (run <= 0.0) return attacker.position;
  double s = std::min(speed_bound(a_params) * t, run);
  return attacker.position + to_center * (s / dist);
}

double interception_time(const AgentState& defender, const AgentState& attacker,
                         const WorldGeometry& world, const AgentParams& d_params,
                         const AgentParams& a_params, double horizon) {
  const double rho = d_params.interception_radius;
  const double run =
      (attacker.position - world.protected_center).norm() - world.protected_radius;
  if (run < 0.0) return kInf;
  const double va = speed_bound(a_params);
  const double t_attacker = va > 0.0 ? run / va : kInf;
  const double t_end = std::min(horizon, t_attacker);

  auto gap = [&](double t) {
    Vec2 target = attacker_position_at(attacker, t, world, a_params);
    Vec2 u = target - defender.position;
    double dist = u.norm();
    double v_par = dist > 0.0 ? defender.velocity.dot(u) / dist : defender.velocity.norm();
    return reach_distance(t, v_par, d_params) - (dist - rho);
  };

  if (gap(0.0) >= 0.0) return 0.0;
  if (!std::isfinite(t_end)) return kInf;

  constexpr double kScan = 0.05;
  constexpr double kTol = 1e-3;
  double lo = 0.0;
  double hi = -1.0;
  for (double t = kScan;; t += kScan) {
    double tt = std::min(t, t_end);
    if (gap(tt) >= 0.0) {
      hi = tt;
      break;
    }
    lo = tt;
    if (tt >= t_end) break;
  }
  if (hi < 0.0) return kInf;
  while (hi - lo > kTol) {
    double mid = 0.5 * (lo + hi);
    if (gap(mid) >= 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

bool winning_region(const AgentState& defender, const AgentState& attacker,
                    const WorldGeometry& world, const AgentParams& d_params,
                    const AgentParams& a_params, double horizon) {
  double t_int = interception_time(defender, attacker, world, d_params, a_params, horizon);
  if (!std::isfinite(t_int)) return false;
  double t_a = time_to_reach(attacker, world.nearest_protected_point(attacker.position), a_params);
  return t_int <= t_a;
}

PathParametrization time_optimal_traj(const Vec2& start, const WorldGeometry& world) {
  Vec2 d = start - world.protected_center;
  double n = d.norm();
  if (n <= world.protected_radius) {
    throw std::invalid_argument("time_optimal_traj: start lies inside the protected area");
  }
  return PathParametrization({start, world.protected_center + d * (world.protected_radius / n)});
}

}  // namespace dynamics
}  // namespace swarmdef
