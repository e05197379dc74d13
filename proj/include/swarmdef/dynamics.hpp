#pragma once

#include <limits>
#include <vector>

#include <Eigen/Core>

namespace swarmdef {

using Vec2 = Eigen::Vector2d;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct AgentState {
  Vec2 position = Vec2::Zero();
  Vec2 velocity = Vec2::Zero();
};

struct AgentParams {
  double u_max = 0.0;
  double drag = 0.0;
  double body_radius = 0.0;
  double interception_radius = 0.0;  // defenders only
  double sensing_radius = 0.0;

  // Throws std::invalid_argument on non-positive bounds.
  void validate() const;
};

// Values used throughout the evaluation scenarios.
AgentParams default_attacker_params();
AgentParams default_defender_params();

struct SafeArea {
  Vec2 center = Vec2::Zero();
  double radius = 0.0;
};

struct WorldGeometry {
  Vec2 protected_center = Vec2::Zero();
  double protected_radius = 45.0;
  std::vector<SafeArea> safe_areas;
  double sense_inner = 50.0;   // ϱ_d
  double sense_outer = 400.0;  // ϱ_d^game

  void validate() const;
  bool inside_protected(const Vec2& p) const;
  Vec2 nearest_protected_point(const Vec2& p) const;
};

// Arc-length parametrized polyline.
class PathParametrization {
 public:
  PathParametrization() = default;
  explicit PathParametrization(std::vector<Vec2> waypoints);

  double total_length() const { return length_; }
  const std::vector<Vec2>& waypoints() const { return points_; }
  // γ is clamped to [0, total_length].
  Vec2 position_at(double gamma) const;
  double tangent_angle_at(double gamma) const;

 private:
  std::vector<Vec2> points_;
  std::vector<double> cumulative_;
  double length_ = 0.0;
};

namespace dynamics {

// Exact solution of r' = v, v' = -C_D v + a over dt with a held constant.
// Accelerations above u_max are clamped (with a warning).
AgentState step(const AgentState& state, const Vec2& accel, double dt,
                const AgentParams& params);

double speed_bound(const AgentParams& params);

double time_to_reach(const AgentState& state, const Vec2& target,
                     const AgentParams& params);

// Distance a defender covers along a fixed direction within t when it starts
// with velocity component v_par along that direction and thrusts at u_max.
double reach_distance(double t, double v_par, const AgentParams& params);

inline constexpr double kDefaultHorizon = 120.0;

// Smallest t at which the defender's reach covers the attacker's straight run
// towards P, within ρ_d^int. Returns kInf if that never happens before the
// attacker reaches P or before the horizon.
double interception_time(const AgentState& defender, const AgentState& attacker,
                         const WorldGeometry& world, const AgentParams& d_params,
                         const AgentParams& a_params,
                         double horizon = kDefaultHorizon);

// Attacker position t seconds into its straight run to P.
Vec2 attacker_position_at(const AgentState& attacker, double t,
                          const WorldGeometry& world, const AgentParams& a_params);

bool winning_region(const AgentState& defender, const AgentState& attacker,
                    const WorldGeometry& world, const AgentParams& d_params,
                    const AgentParams& a_params,
                    double horizon = kDefaultHorizon);

PathParametrization time_optimal_traj(const Vec2& start, const WorldGeometry& world);

Vec2 clamp_norm(const Vec2& v, double max_norm);

}  // namespace dynamics
}  // namespace swarmdef
