#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "swarmdef/assignment.hpp"

namespace swarmdef::assignment {

double interception_cost(const AgentState& defender, const AgentState& attacker,
                         const EngagementModel& model) {
  if ((defender.position - attacker.position).norm() <= model.defender.interception_radius &&
      !model.world.inside_protected(attacker.position)) {
    return 0.0;
  }
  double t = dynamics::interception_time(defender, attacker, model.world, model.defender,
                                         model.attacker);
  if (!std::isfinite(t)) return bip::kLargeCost;
  double t_a = dynamics::time_to_reach(
      attacker, model.world.nearest_protected_point(attacker.position), model.attacker);
  return t <= t_a ? t : bip::kLargeCost;
}

Vec2 pursuit_position(const AgentState& defender, const AgentState& attacker, double t_int,
                      double t, const EngagementModel& model) {
  Vec2 aim = dynamics::attacker_position_at(attacker, t_int, model.world, model.attacker);
  Vec2 d = aim - defender.position;
  double dist = d.norm();
  if (dist == 0.0) return defender.position;
  Vec2 u = d / dist;
  double s = dynamics::reach_distance(std::min(t, t_int), defender.velocity.dot(u), model.defender);
  return defender.position + u * std::min(s, dist);
}

namespace {

double collision_given_times(const AgentState& d1, const AgentState& a1, double t1,
                             const AgentState& d2, const AgentState& a2, double t2,
                             const EngagementModel& model) {
  if (t1 >= bip::kLargeCost || t2 >= bip::kLargeCost) return 0.0;
  const double t_end = std::min(t1, t2);
  const double limit = 2.0 * model.defender.body_radius;
  for (int k = 1;; ++k) {
    double t = k * kCollisionSampleDt;
    if (t > t_end + 1e-12) break;
    Vec2 p1 = pursuit_position(d1, a1, t1, t, model);
    Vec2 p2 = pursuit_position(d2, a2, t2, t, model);
    if ((p1 - p2).norm() < limit) return 1.0 / t;
  }
  return 0.0;
}

}  // namespace

double collision_cost(const AgentState& d1, const AgentState& a1, const AgentState& d2,
                      const AgentState& a2, const EngagementModel& model) {
  return collision_given_times(d1, a1, interception_cost(d1, a1, model), d2, a2,
                               interception_cost(d2, a2, model), model);
}

EngagementCosts::EngagementCosts(std::vector<AgentState> defenders,
                                 std::vector<AgentState> attackers, EngagementModel model)
    : defenders_(std::move(defenders)), attackers_(std::move(attackers)), model_(std::move(model)) {
  int_cache_.assign(defenders_.size() * attackers_.size(), -1.0);
}

double EngagementCosts::interception(int d, int a) const {
  double& slot = int_cache_.at(static_cast<size_t>(d) * attackers_.size() + a);
  if (slot < 0.0) slot = interception_cost(defenders_.at(d), attackers_.at(a), model_);
  return slot;
}

double EngagementCosts::collision(int d1, int a1, int d2, int a2) const {
  std::array<int, 4> key{d1, a1, d2, a2};
  if (std::make_pair(d2, a2) < std::make_pair(d1, a1)) key = {d2, a2, d1, a1};
  auto it = col_cache_.find(key);
  if (it != col_cache_.end()) return it->second;
  double c = collision_given_times(defenders_.at(key[0]), attackers_.at(key[1]),
                                   interception(key[0], key[1]), defenders_.at(key[2]),
                                   attackers_.at(key[3]), interception(key[2], key[3]), model_);
  col_cache_.emplace(key, c);
  return c;
}

}  // namespace swarmdef::assignment
