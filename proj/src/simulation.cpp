#include "swarmdef/simulation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include <spdlog/spdlog.h>

namespace swarmdef {

const char* to_string(DefensePhase p) {
  switch (p) {
    case DefensePhase::Idle: return "idle";
    case DefensePhase::Gather: return "gather";
    case DefensePhase::Seek: return "seek";
    case DefensePhase::Enclose: return "enclose";
    case DefensePhase::Herd: return "herd";
    case DefensePhase::Intercept: return "intercept";
  }
  return "?";
}

std::vector<Event> SimTrace::events_of(const std::string& type) const {
  std::vector<Event> out;
  for (const auto& e : events) {
    if (e.type == type) out.push_back(e);
  }
  return out;
}

namespace {

bool finite(const Vec2& v) { return std::isfinite(v.x()) && std::isfinite(v.y()); }

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument("scenario: " + msg);
}

}  // namespace

void ScenarioConfig::validate() const {
  require(dt > 0.0 && dt <= 0.1, "dt must lie in (0, 0.1]");
  require(duration > 0.0 && std::isfinite(duration), "duration must be positive");
  require(trace_stride >= 1, "trace_stride must be at least 1");
  world.validate();
  attacker.validate();
  defender.validate();
  require(defender.u_max > attacker.u_max, "defenders must out-accelerate attackers");
  require(defender.interception_radius > 0.0, "defender interception radius must be positive");
  const double va = dynamics::speed_bound(attacker);
  const double vd = dynamics::speed_bound(defender);
  for (const auto& a : attackers) {
    require(finite(a.state.position) && finite(a.state.velocity), "non-finite attacker state");
    require(a.state.velocity.norm() <= va + 1e-9, "attacker initial speed above bound");
    require(a.group >= -1, "attacker group must be -1 or non-negative");
  }
  for (const auto& d : defenders) {
    require(finite(d.position) && finite(d.velocity), "non-finite defender state");
    require(d.velocity.norm() <= vd + 1e-9, "defender initial speed above bound");
  }
  const int na = static_cast<int>(attackers.size());
  for (const auto& s : scripts) {
    require(s.time.has_value() || s.trigger_distance.has_value(), "split script needs a trigger");
    auto check_members = [&](const std::vector<int>& members) {
      for (int m : members) {
        require(m >= 0 && m < na, "script member out of range");
        require(attackers[m].group == s.group, "script member outside its group");
      }
    };
    for (const auto& g : s.subgroups) {
      check_members(g.members);
      require(g.drift_speed >= 0.0 && g.drift_time >= 0.0, "negative drift");
    }
    for (const auto& b : s.breakaways) {
      check_members(b.members);
      require(b.delay >= 0.0 && b.dash_time >= 0.0, "negative breakaway timing");
    }
  }
  require(tune.w >= 0.0 && tune.w <= 1.0, "w must lie in [0, 1]");
  require(tune.min_clusters >= 3, "min_clusters must be at least 3");
  require(tune.string_length > 0.0 && tune.spacing > 0.0 && tune.standoff >= 0.0,
          "formation sizes must be positive");
  require(tune.eps1 > 0.0 && tune.eps2 > 0.0 && tune.eps_tol > 0.0, "tolerances must be positive");
  require(tune.herd_speed_factor > 0.0 && tune.herd_speed_factor <= 1.0,
          "herd speed factor must lie in (0, 1]");
  require(tune.cruise_speed > 0.0 && tune.cruise_speed <= va, "cruise speed must lie in (0, v_a]");
  require(tune.seek_speed > 0.0 && tune.enclose_speed > 0.0, "team speeds must be positive");
  require(tune.avoid_radius > 0.0 && tune.cbf_range > 0.0, "ranges must be positive");
  require(tune.cbf_k1 > 0.0 && tune.cbf_k2 > 0.0, "CBF gains must be positive");
  require(tune.split_check_period > 0.0, "split check period must be positive");
  if (attackers.size() > defenders.size()) {
    spdlog::warn("scenario {}: {} attackers against {} defenders", name, attackers.size(),
                 defenders.size());
  }
}

namespace sim {

namespace {

constexpr double kVelocityGain = 6.0;

Vec2 drive(const AgentState& self, const Vec2& v_des, const AgentParams& params) {
  return dynamics::clamp_norm(params.drag * v_des + kVelocityGain * (v_des - self.velocity),
                              params.u_max);
}

}  // namespace

Vec2 collision_avoid(const Vec2& accel_nominal, const AgentState& self,
                     const std::vector<Neighbor>& neighbors, const AgentParams& params,
                     const CbfGains& gains) {
  Vec2 u = accel_nominal;
  for (const auto& nb : neighbors) {
    const Vec2 dr = self.position - nb.position;
    const Vec2 dv = self.velocity - nb.velocity;
    const double g2 = dr.squaredNorm();
    if (g2 < 1e-12) continue;
    const double h = g2 - nb.radius * nb.radius;
    const double hdot = 2.0 * dr.dot(dv);
    // ḧ = 2|Δv|² − 2C Δr·Δv + 2Δr·(u − u_nb); each side of the pair takes half.
    const double f = 2.0 * dv.squaredNorm() - 2.0 * params.drag * dr.dot(dv) + gains.k1 * hdot +
                     gains.k2 * h;
    const double b = -0.25 * f;
    const double lhs = dr.dot(u);
    if (lhs < b) u += (b - lhs) / g2 * dr;
  }
  return dynamics::clamp_norm(u, params.u_max);
}

Vec2 track(const AgentState& self, const Vec2& target, const Vec2& target_velocity,
           const AgentParams& params, double gain) {
  const double vb = dynamics::speed_bound(params);
  const Vec2 e = target - self.position;
  const double d = e.norm();
  Vec2 v_des = target_velocity;
  if (d > 1e-12) {
    double mag = std::min({vb, gain * d, std::sqrt(params.u_max * d)});
    v_des += e / d * mag;
  }
  v_des = dynamics::clamp_norm(v_des, vb);
  // Critically damped about the slot: C_D + k_v = 4 k_p.
  const double kv = std::max(1.0, 4.0 * gain - params.drag);
  return dynamics::clamp_norm(params.drag * v_des + kv * (v_des - self.velocity), params.u_max);
}

Vec2 pursue(const AgentState& self, const AgentState& target, const AgentParams& params,
            const AgentParams& target_params) {
  (void)target_params;
  const double s = dynamics::speed_bound(params);
  const Vec2 rel = target.position - self.position;
  const Vec2& vt = target.velocity;
  // Smallest τ > 0 with |rel + vt τ| = s τ.
  const double qa = vt.squaredNorm() - s * s;
  const double qb = 2.0 * rel.dot(vt);
  const double qc = rel.squaredNorm();
  double tau = -1.0;
  if (std::abs(qa) < 1e-12) {
    if (qb < 0.0) tau = -qc / qb;
  } else {
    double disc = qb * qb - 4.0 * qa * qc;
    if (disc >= 0.0) {
      double sq = std::sqrt(disc);
      double t1 = (-qb - sq) / (2.0 * qa);
      double t2 = (-qb + sq) / (2.0 * qa);
      if (t1 > t2) std::swap(t1, t2);
      tau = t1 > 0.0 ? t1 : t2;
    }
  }
  Vec2 aim = tau > 0.0 ? Vec2(rel + vt * tau) : rel;
  if (aim.norm() < 1e-12) return Vec2::Zero();
  return drive(self, s * aim.normalized(), params);
}

Vec2 swarm_velocity(const Vec2& leader, const std::vector<Vec2>& defenders,
                    const WorldGeometry& world, const Tunables& tune, const AgentParams& attacker) {
  Vec2 to_p = world.protected_center - leader;
  Vec2 dir = to_p.norm() > 1e-12 ? Vec2(to_p.normalized()) : Vec2::Zero();
  const double half = 0.5 * tune.avoid_radius;
  double dmin = kInf;
  Vec2 push = Vec2::Zero();
  for (const auto& d : defenders) {
    Vec2 away = leader - d;
    double dist = away.norm();
    dmin = std::min(dmin, dist);
    if (dist < tune.avoid_radius && dist > 1e-9) {
      push += away / dist * (0.5 * tune.cruise_speed / std::max(dist, 2.0));
    }
  }
  double factor = std::clamp((dmin - half) / half, 0.0, 1.0);
  return dynamics::clamp_norm(dir * tune.cruise_speed * factor + push,
                              0.9 * dynamics::speed_bound(attacker));
}

namespace {

enum class Mode { Flock, Dash, RiskTaking, Contained };
enum class Status { Active, Intercepted, Safe, Breached };

struct Attacker {
  AgentState s;
  Status status = Status::Active;
  Mode mode = Mode::Flock;
  int group = -1;
  int flock = -1;
  Vec2 offset = Vec2::Zero();
  Vec2 dash_dir = Vec2::Zero();
  double dash_until = 0.0;
  int team = -1;
  int hunter = -1;
};

struct Flock {
  Vec2 pos = Vec2::Zero();
  Vec2 vel = Vec2::Zero();
  Vec2 drift = Vec2::Zero();
  double drift_until = -1.0;
};

struct Breakaway {
  int attacker = 0;
  double at = 0.0;
  double deg = 0.0;
  double dash_time = 0.0;
};

struct Defender {
  AgentState s;
  DefensePhase phase = DefensePhase::Idle;
  int team = -1;
  int target = -1;
  Vec2 hold = Vec2::Zero();
};

struct Team {
  int id = 0;
  std::vector<int> members;  // β order
  std::vector<int> cluster;  // attacker ids
  DefensePhase phase = DefensePhase::Gather;
  std::vector<Vec2> slots;
  std::vector<Vec2> slot_vel;
  Vec2 gather_center = Vec2::Zero();
  Vec2 line_c = Vec2::Zero();
  double radius = 0.0;
  double alpha0 = 0.0;
  double sgn = 1.0;
  double delta = 0.0;
  double delta_final = 0.0;
  Vec2 herd_c = Vec2::Zero();
  Vec2 herd_v = Vec2::Zero();
  Vec2 herd_target = Vec2::Zero();
  int safe_index = -1;
};

std::string aid(int i) { return "A" + std::to_string(i); }
std::string did(int j) { return "D" + std::to_string(j); }
std::string tid(int k) { return "T" + std::to_string(k); }

std::string join(const std::vector<int>& v, const std::string& prefix = "") {
  std::ostringstream os;
  for (size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << prefix << v[i];
  return os.str();
}

// Σ caps brought to `target` by trimming the largest or topping up the
// smallest entry, lowest index first on ties.
bool reconcile(std::vector<int>& caps, int target) {
  if (target < static_cast<int>(caps.size())) return false;
  int sum = std::accumulate(caps.begin(), caps.end(), 0);
  while (sum > target) {
    auto it = std::max_element(caps.begin(), caps.end());
    --*it;
    --sum;
  }
  while (sum < target) {
    auto it = std::min_element(caps.begin(), caps.end());
    ++*it;
    ++sum;
  }
  return true;
}

class Simulator {
 public:
  explicit Simulator(const ScenarioConfig& cfg) : cfg_(cfg) {
    model_.world = cfg.world;
    model_.attacker = cfg.attacker;
    model_.defender = cfg.defender;
  }

  SimTrace run() {
    try {
      init();
      record(0);
      const long steps = static_cast<long>(std::ceil(cfg_.duration / cfg_.dt - 1e-9));
      long step = 0;
      while (!all_resolved() && step < steps) {
        ++step;
        advance(static_cast<double>(step) * cfg_.dt);
        if (step % cfg_.trace_stride == 0) record(step);
      }
      trace_.completed = all_resolved();
    } catch (const std::exception& e) {
      trace_.error = e.what();
      spdlog::error("simulation aborted at t={:.2f}: {}", t_, e.what());
    }
    trace_.end_time = t_;
    return std::move(trace_);
  }

 private:
  const ScenarioConfig& cfg_;
  EngagementModel model_;
  double t_ = 0.0;
  std::vector<Attacker> att_;
  std::vector<Flock> flocks_;
  std::map<int, int> group_flock_;
  std::vector<Defender> def_;
  std::vector<Team> teams_;
  std::vector<char> script_fired_;
  std::vector<Breakaway> breakaways_;
  std::vector<int> pending_;
  bool can_cluster_ = false;
  ClusteringParams cparams_;
  double next_split_check_ = 0.0;
  SimTrace trace_;

  void event(const std::string& type, const std::string& subject, const std::string& object,
             const std::string& detail) {
    trace_.events.push_back({t_, type, subject, object, detail});
  }

  bool active(int i) const { return att_[i].status == Status::Active; }

  bool all_resolved() const {
    return std::none_of(att_.begin(), att_.end(),
                        [](const Attacker& a) { return a.status == Status::Active; });
  }

  std::vector<int> active_of(const std::vector<int>& ids) const {
    std::vector<int> out;
    for (int i : ids) {
      if (active(i)) out.push_back(i);
    }
    return out;
  }

  std::vector<Vec2> positions(const std::vector<int>& ids) const {
    std::vector<Vec2> out;
    for (int i : ids) out.push_back(att_[i].s.position);
    return out;
  }

  AgentState com_state(const std::vector<int>& ids) const {
    AgentState c;
    for (int i : ids) {
      c.position += att_[i].s.position;
      c.velocity += att_[i].s.velocity;
    }
    if (!ids.empty()) {
      c.position /= static_cast<double>(ids.size());
      c.velocity /= static_cast<double>(ids.size());
    }
    return c;
  }

  double enclose_radius(int n) const {
    const double net = n >= 3 ? 0.5 * cfg_.tune.string_length / std::tan(std::numbers::pi / n)
                              : 0.5 * cfg_.tune.string_length;
    return net + 2.0 * cfg_.defender.body_radius;
  }

  std::vector<AgentState> defender_states() const {
    std::vector<AgentState> out;
    for (const auto& d : def_) out.push_back(d.s);
    return out;
  }

  std::vector<AgentState> attacker_states() const {
    std::vector<AgentState> out;
    for (const auto& a : att_) out.push_back(a.s);
    return out;
  }

  void init() {
    cfg_.validate();
    for (const auto& spec : cfg_.attackers) {
      Attacker a;
      a.s = spec.state;
      a.group = spec.group;
      a.mode = spec.group < 0 ? Mode::RiskTaking : Mode::Flock;
      att_.push_back(a);
    }
    for (int i = 0; i < static_cast<int>(att_.size()); ++i) {
      if (att_[i].group < 0 || group_flock_.count(att_[i].group)) continue;
      std::vector<int> members;
      for (int m = 0; m < static_cast<int>(att_.size()); ++m) {
        if (att_[m].group == att_[i].group) members.push_back(m);
      }
      group_flock_[att_[i].group] = make_flock(members, Vec2::Zero(), -1.0);
    }
    for (const auto& d : cfg_.defenders) {
      Defender x;
      x.s = d;
      x.hold = d.position;
      def_.push_back(x);
    }
    script_fired_.assign(cfg_.scripts.size(), 0);
    if (att_.empty()) return;

    const int na = static_cast<int>(att_.size());
    const int nd = static_cast<int>(def_.size());
    can_cluster_ = na >= 2 && nd >= 3;
    SwarmPartition part;
    if (can_cluster_) {
      cparams_ = clustering::dbscan_params(na, nd, cfg_.tune.string_length);
      part = clustering::cluster(positions(all_ids()), cparams_);
    } else {
      part.unclustered = all_ids();
    }
    std::vector<int> sizes;
    for (const auto& c : part.clusters) sizes.push_back(static_cast<int>(c.size()));
    event("partition", "", "",
          "clusters=" + (sizes.empty() ? std::string("none") : join(sizes)) +
              " uc=" + std::to_string(part.unclustered.size()));

    std::vector<int> free_defenders(nd);
    std::iota(free_defenders.begin(), free_defenders.end(), 0);
    std::vector<int> uc = part.unclustered;
    if (static_cast<int>(uc.size()) > nd) {
      std::vector<double> eta(na);
      for (int i : uc) {
        eta[i] = dynamics::time_to_reach(
            att_[i].s, cfg_.world.nearest_protected_point(att_[i].s.position), cfg_.attacker);
      }
      std::stable_sort(uc.begin(), uc.end(), [&](int a, int b) { return eta[a] < eta[b]; });
      pending_.assign(uc.begin() + nd, uc.end());
      uc.resize(nd);
      std::sort(uc.begin(), uc.end());
      std::sort(pending_.begin(), pending_.end());
    }
    std::vector<int> used = assign_interceptors(free_defenders, uc, "assign");
    std::vector<int> rest;
    for (int j : free_defenders) {
      if (std::find(used.begin(), used.end(), j) == used.end()) rest.push_back(j);
    }

    if (part.clusters.empty()) return;
    std::vector<int> caps;
    for (int s : sizes) caps.push_back(cfg_.rd(s));
    if (!reconcile(caps, static_cast<int>(rest.size()))) {
      throw std::runtime_error("not enough defenders to cover every cluster at t=0");
    }
    std::vector<Vec2> rest_pos;
    for (int j : rest) rest_pos.push_back(def_[j].s.position);
    assignment::GatheringParams gp;
    gp.lead_time = cfg_.tune.lead_time;
    gp.eps_tol = cfg_.tune.eps_tol;
    gp.spacing = cfg_.tune.spacing;
    gp.standoff = cfg_.tune.standoff;
    gp.rd = cfg_.rd;
    gp.capacities = caps;
    assignment::GatheringPlan plan =
        assignment::gathering_formations(rest, rest_pos, part.centers, sizes, model_, gp);
    for (size_t k = 0; k < part.clusters.size(); ++k) {
      Team team;
      team.id = static_cast<int>(teams_.size());
      team.members = plan.teams[k];
      team.cluster = part.clusters[k];
      team.phase = DefensePhase::Gather;
      team.slots = plan.formations[k].slots;
      team.slot_vel.assign(team.slots.size(), Vec2::Zero());
      team.gather_center = plan.formations[k].center;
      for (int j : team.members) {
        def_[j].phase = DefensePhase::Gather;
        def_[j].team = team.id;
      }
      for (int i : team.cluster) att_[i].team = team.id;
      event("assign", tid(team.id), "cluster" + std::to_string(k),
            "defenders=" + join(team.members) + " attackers=" + join(team.cluster));
      teams_.push_back(std::move(team));
    }
  }

  std::vector<int> all_ids() const {
    std::vector<int> ids(att_.size());
    std::iota(ids.begin(), ids.end(), 0);
    return ids;
  }

  int make_flock(const std::vector<int>& members, const Vec2& drift, double drift_until) {
    Flock f;
    AgentState c = com_state(members);
    f.pos = c.position;
    f.vel = c.velocity;
    f.drift = drift;
    f.drift_until = drift_until;
    if (!flocks_.empty() && !members.empty() && att_[members.front()].flock >= 0) {
      f.vel = flocks_[att_[members.front()].flock].vel;
    }
    int id = static_cast<int>(flocks_.size());
    flocks_.push_back(f);
    for (int m : members) {
      att_[m].flock = id;
      att_[m].offset = att_[m].s.position - f.pos;
    }
    return id;
  }

  // CADAA between the given defenders and attackers; returns the defenders used.
  std::vector<int> assign_interceptors(const std::vector<int>& defenders,
                                       const std::vector<int>& attackers,
                                       const std::string& kind) {
    if (attackers.empty()) return {};
    assignment::EngagementCosts costs(defender_states(), attacker_states(), model_);
    assignment::CadaaResult r = assignment::cadaa(defenders, attackers, costs, cfg_.tune.w);
    std::vector<int> used;
    for (size_t i = 0; i < attackers.size(); ++i) {
      int j = defenders[r.interceptor[i]];
      start_intercept(j, attackers[i]);
      event(kind, did(j), aid(attackers[i]),
            "cost=" + std::to_string(costs.interception(j, attackers[i])));
      used.push_back(j);
    }
    return used;
  }

  void start_intercept(int j, int i) {
    def_[j].phase = DefensePhase::Intercept;
    def_[j].team = -1;
    def_[j].target = i;
    att_[i].hunter = j;
    att_[i].team = -1;
  }

  void release(int j) {
    def_[j].phase = DefensePhase::Idle;
    def_[j].team = -1;
    def_[j].target = -1;
    def_[j].hold = def_[j].s.position;
  }

  // ---- per-step ----

  void advance(double t_next) {
    const double dt = cfg_.dt;
    fire_scripts();
    update_flocks(dt);
    for (auto& team : teams_) update_slots(team, dt);

    std::vector<Vec2> acc_a(att_.size(), Vec2::Zero());
    for (size_t i = 0; i < att_.size(); ++i) {
      if (att_[i].status == Status::Active) acc_a[i] = attacker_accel(static_cast<int>(i));
    }
    std::vector<Vec2> acc_d(def_.size(), Vec2::Zero());
    for (size_t j = 0; j < def_.size(); ++j) acc_d[j] = defender_accel(static_cast<int>(j));
    if (cfg_.tune.collision_avoidance) {
      std::vector<Vec2> safe(def_.size());
      const CbfGains gains{cfg_.tune.cbf_k1, cfg_.tune.cbf_k2};
      const double r = 2.0 * cfg_.defender.body_radius + 0.5;
      for (size_t j = 0; j < def_.size(); ++j) {
        std::vector<Neighbor> nbs;
        for (size_t m = 0; m < def_.size(); ++m) {
          if (m == j) continue;
          if ((def_[m].s.position - def_[j].s.position).norm() > cfg_.tune.cbf_range) continue;
          nbs.push_back({def_[m].s.position, def_[m].s.velocity, r});
        }
        safe[j] = collision_avoid(acc_d[j], def_[j].s, nbs, cfg_.defender, gains);
      }
      acc_d = std::move(safe);
    }

    for (size_t i = 0; i < att_.size(); ++i) {
      if (att_[i].status == Status::Active) {
        att_[i].s = dynamics::step(att_[i].s, acc_a[i], dt, cfg_.attacker);
      }
    }
    for (size_t j = 0; j < def_.size(); ++j) {
      def_[j].s = dynamics::step(def_[j].s, acc_d[j], dt, cfg_.defender);
    }
    t_ = t_next;

    monitor();
    check_interceptions();
    check_breaches();
    for (size_t k = 0; k < teams_.size(); ++k) team_transitions(static_cast<int>(k));
    check_risk_taking();
    if (t_ + 1e-9 >= next_split_check_) {
      next_split_check_ = t_ + cfg_.tune.split_check_period;
      check_splits();
    }
    assign_pending();
  }

  void fire_scripts() {
    for (size_t s = 0; s < cfg_.scripts.size(); ++s) {
      if (script_fired_[s]) continue;
      const SplitScript& sc = cfg_.scripts[s];
      std::vector<int> group;
      for (int i = 0; i < static_cast<int>(att_.size()); ++i) {
        if (att_[i].group == sc.group && active(i) && att_[i].mode == Mode::Flock) {
          group.push_back(i);
        }
      }
      if (group.empty()) continue;
      Vec2 com = com_state(group).position;
      bool go = sc.time && t_ + 1e-9 >= *sc.time;
      if (!go && sc.trigger_distance) {
        for (const auto& d : def_) {
          if ((d.s.position - com).norm() <= *sc.trigger_distance) go = true;
        }
      }
      if (!go) continue;
      script_fired_[s] = 1;
      const Vec2 to_p = cfg_.world.protected_center - com;
      const double heading = std::atan2(to_p.y(), to_p.x());
      for (const auto& sub : sc.subgroups) {
        std::vector<int> members = active_of(sub.members);
        if (members.empty()) continue;
        Vec2 drift = sub.drift_speed * unit_vector(heading + sub.drift_deg * std::numbers::pi / 180.0);
        make_flock(members, drift, t_ + sub.drift_time);
      }
      for (const auto& b : sc.breakaways) {
        for (int m : b.members) breakaways_.push_back({m, t_ + b.delay, b.dash_deg, b.dash_time});
      }
      event("maneuver", "G" + std::to_string(sc.group), "", "script=" + std::to_string(s));
    }
    for (auto it = breakaways_.begin(); it != breakaways_.end();) {
      if (t_ + 1e-9 < it->at) {
        ++it;
        continue;
      }
      Attacker& a = att_[it->attacker];
      if (a.status == Status::Active && a.mode == Mode::Flock) {
        Vec2 to_p = cfg_.world.protected_center - a.s.position;
        double heading = std::atan2(to_p.y(), to_p.x());
        a.mode = Mode::Dash;
        a.flock = -1;
        a.dash_dir = unit_vector(heading + it->deg * std::numbers::pi / 180.0);
        a.dash_until = t_ + it->dash_time;
      }
      it = breakaways_.erase(it);
    }
  }

  std::vector<Vec2> active_defender_positions() const {
    std::vector<Vec2> out;
    for (const auto& d : def_) out.push_back(d.s.position);
    return out;
  }

  void update_flocks(double dt) {
    std::vector<char> used(flocks_.size(), 0);
    for (const auto& a : att_) {
      if (a.status == Status::Active && a.mode == Mode::Flock && a.flock >= 0) used[a.flock] = 1;
    }
    const std::vector<Vec2> dpos = active_defender_positions();
    for (size_t f = 0; f < flocks_.size(); ++f) {
      if (!used[f]) continue;
      Flock& fl = flocks_[f];
      fl.vel = swarm_velocity(fl.pos, dpos, cfg_.world, cfg_.tune, cfg_.attacker);
      if (t_ < fl.drift_until) fl.vel += fl.drift;
      fl.pos += fl.vel * dt;
    }
  }

  Vec2 attacker_accel(int i) {
    Attacker& a = att_[i];
    const double va = dynamics::speed_bound(cfg_.attacker);
    switch (a.mode) {
      case Mode::Flock: {
        const Flock& f = flocks_[a.flock];
        return track(a.s, f.pos + a.offset, f.vel, cfg_.attacker, 2.0);
      }
      case Mode::Dash:
        if (t_ < a.dash_until) return drive(a.s, va * a.dash_dir, cfg_.attacker);
        a.mode = Mode::RiskTaking;
        [[fallthrough]];
      case Mode::RiskTaking: {
        Vec2 to_p = cfg_.world.protected_center - a.s.position;
        if (to_p.norm() < 1e-12) return Vec2::Zero();
        return drive(a.s, va * to_p.normalized(), cfg_.attacker);
      }
      case Mode::Contained: {
        const Team& team = teams_[a.team];
        return track(a.s, team.herd_c + a.offset, team.herd_v, cfg_.attacker, 2.0);
      }
    }
    return Vec2::Zero();
  }

  Vec2 defender_accel(int j) {
    Defender& d = def_[j];
    switch (d.phase) {
      case DefensePhase::Idle:
        return track(d.s, d.hold, Vec2::Zero(), cfg_.defender);
      case DefensePhase::Intercept:
        return pursue(d.s, att_[d.target].s, cfg_.defender, cfg_.attacker);
      default: {
        const Team& team = teams_[d.team];
        auto it = std::find(team.members.begin(), team.members.end(), j);
        size_t l = static_cast<size_t>(it - team.members.begin());
        return track(d.s, team.slots[l], team.slot_vel[l], cfg_.defender);
      }
    }
  }

  std::vector<Vec2> ring_slots(const Team& team, const Vec2& center, double delta) const {
    const int n = static_cast<int>(team.members.size());
    std::vector<Vec2> out;
    for (int l = 0; l < n; ++l) {
      double o = 0.5 * (n - 1) - l;
      out.push_back(center + team.radius * unit_vector(team.alpha0 + team.sgn * o * delta));
    }
    return out;
  }

  void set_slots(Team& team, std::vector<Vec2> slots, double dt) {
    team.slot_vel.assign(slots.size(), Vec2::Zero());
    if (team.slots.size() == slots.size()) {
      for (size_t l = 0; l < slots.size(); ++l) team.slot_vel[l] = (slots[l] - team.slots[l]) / dt;
    }
    team.slots = std::move(slots);
  }

  void update_slots(Team& team, double dt) {
    const int n = static_cast<int>(team.members.size());
    switch (team.phase) {
      case DefensePhase::Seek: {
        std::vector<int> live = active_of(team.cluster);
        if (live.empty()) return;
        AgentState c = com_state(live);
        Vec2 to_p = cfg_.world.protected_center - c.position;
        Vec2 goal = c.position + to_p.normalized() * team.radius;
        Vec2 v = c.velocity + dynamics::clamp_norm(0.5 * (goal - team.line_c), cfg_.tune.seek_speed);
        team.line_c += v * dt;
        Vec2 face = c.position - team.line_c;
        double phi = std::atan2(face.y(), face.x());
        set_slots(team, formation::line_slots(team.line_c, phi, n, cfg_.tune.spacing), dt);
        break;
      }
      case DefensePhase::Enclose: {
        std::vector<int> live = active_of(team.cluster);
        if (live.empty()) return;
        Vec2 c = com_state(live).position;
        double rate = cfg_.tune.enclose_speed / (team.radius * std::max(1.0, 0.5 * (n - 1)));
        team.delta = std::min(team.delta_final, team.delta + rate * dt);
        set_slots(team, ring_slots(team, c, team.delta), dt);
        break;
      }
      case DefensePhase::Herd: {
        Vec2 gap = team.herd_target - team.herd_c;
        double step = cfg_.tune.herd_speed_factor * dynamics::speed_bound(cfg_.attacker) * dt;
        if (gap.norm() <= step) {
          team.herd_v = gap / dt;
          team.herd_c = team.herd_target;
        } else {
          team.herd_v = gap.normalized() * (step / dt);
          team.herd_c += team.herd_v * dt;
        }
        set_slots(team, ring_slots(team, team.herd_c, team.delta_final), dt);
        break;
      }
      default:
        break;
    }
  }

  // ---- post-step checks ----

  void monitor() {
    const double va = dynamics::speed_bound(cfg_.attacker);
    const double vd = dynamics::speed_bound(cfg_.defender);
    for (const auto& a : att_) {
      if (a.status == Status::Active) {
        trace_.max_speed_excess = std::max(trace_.max_speed_excess, a.s.velocity.norm() - va);
      }
    }
    for (size_t j = 0; j < def_.size(); ++j) {
      trace_.max_speed_excess = std::max(trace_.max_speed_excess, def_[j].s.velocity.norm() - vd);
      for (size_t m = j + 1; m < def_.size(); ++m) {
        trace_.min_defender_gap =
            std::min(trace_.min_defender_gap, (def_[j].s.position - def_[m].s.position).norm());
      }
    }
  }

  void check_interceptions() {
    for (size_t j = 0; j < def_.size(); ++j) {
      Defender& d = def_[j];
      if (d.phase != DefensePhase::Intercept) continue;
      Attacker& a = att_[d.target];
      if (a.status != Status::Active) {
        release(static_cast<int>(j));
        continue;
      }
      double dist = (d.s.position - a.s.position).norm();
      if (dist <= cfg_.defender.interception_radius) {
        a.status = Status::Intercepted;
        event("interception", did(static_cast<int>(j)), aid(d.target), "distance=" + std::to_string(dist));
        release(static_cast<int>(j));
      }
    }
  }

  void check_breaches() {
    for (size_t i = 0; i < att_.size(); ++i) {
      Attacker& a = att_[i];
      if (a.status != Status::Active || a.mode == Mode::Contained) continue;
      if (cfg_.world.inside_protected(a.s.position)) {
        a.status = Status::Breached;
        ++trace_.breaches;
        event("breach", aid(static_cast<int>(i)), "", "");
        pending_.erase(std::remove(pending_.begin(), pending_.end(), static_cast<int>(i)),
                       pending_.end());
      }
    }
  }

  bool settled(const Team& team, double tol_pos, double tol_vel) const {
    for (size_t l = 0; l < team.members.size(); ++l) {
      const AgentState& s = def_[team.members[l]].s;
      if ((s.position - team.slots[l]).norm() > tol_pos) return false;
      if ((s.velocity - team.slot_vel[l]).norm() > tol_vel) return false;
    }
    return true;
  }

  void disband(Team& team) {
    for (int j : team.members) {
      if (def_[j].team == team.id) release(j);
    }
    team.phase = DefensePhase::Idle;
  }

  void team_transitions(int k) {
    Team& team = teams_[k];
    if (team.phase == DefensePhase::Idle) return;
    std::vector<int> live = active_of(team.cluster);
    if (live.empty()) {
      event("disband", tid(team.id), "", "no attackers left");
      disband(team);
      return;
    }
    const Tunables& tu = cfg_.tune;
    switch (team.phase) {
      case DefensePhase::Gather:
        if (settled(team, tu.eps1, tu.eps2)) {
          event("gathered", tid(team.id), "", "");
          enter_seek(team, team.gather_center);
        }
        break;
      case DefensePhase::Seek: {
        AgentState c = com_state(live);
        Vec2 goal = c.position + (cfg_.world.protected_center - c.position).normalized() * team.radius;
        if ((goal - team.line_c).norm() < 0.5 && settled(team, 2.0 * tu.eps1, kInf)) {
          enter_enclose(team, c.position);
        }
        break;
      }
      case DefensePhase::Enclose:
        if (team.delta >= team.delta_final && settled(team, tu.eps1, tu.eps2)) {
          Vec2 c = com_state(live).position;
          event("enclosure", tid(team.id), "", "attackers=" + join(live));
          team.phase = DefensePhase::Herd;
          for (int j : team.members) def_[j].phase = DefensePhase::Herd;
          team.herd_c = c;
          team.herd_v = Vec2::Zero();
          team.herd_target = c;
          double best = kInf;
          for (size_t m = 0; m < cfg_.world.safe_areas.size(); ++m) {
            double dist = (cfg_.world.safe_areas[m].center - c).norm();
            if (dist < best) {
              best = dist;
              team.safe_index = static_cast<int>(m);
              team.herd_target = cfg_.world.safe_areas[m].center;
            }
          }
          const double room = std::max(0.0, team.radius - 2.0 * cfg_.defender.body_radius - 1.0);
          for (int i : live) {
            att_[i].mode = Mode::Contained;
            att_[i].flock = -1;
            att_[i].offset = dynamics::clamp_norm(att_[i].s.position - c, room);
          }
        }
        break;
      case DefensePhase::Herd:
        if (team.safe_index >= 0 && (team.herd_c - team.herd_target).norm() <= 0.5) {
          event("herd_arrival", tid(team.id), "S" + std::to_string(team.safe_index),
                "attackers=" + join(live));
          for (int i : live) att_[i].status = Status::Safe;
          disband(team);
        }
        break;
      default:
        break;
    }
  }

  void enter_seek(Team& team, const Vec2& line_center) {
    team.phase = DefensePhase::Seek;
    team.line_c = line_center;
    team.radius = enclose_radius(static_cast<int>(team.members.size()));
    for (int j : team.members) def_[j].phase = DefensePhase::Seek;
  }

  void enter_enclose(Team& team, const Vec2& com) {
    const int n = static_cast<int>(team.members.size());
    team.phase = DefensePhase::Enclose;
    Vec2 rel = team.line_c - com;
    team.alpha0 = std::atan2(rel.y(), rel.x());
    // The line's slot axis is unit(φ + π/2) with φ facing the swarm.
    Vec2 axis = unit_vector(std::atan2(-rel.y(), -rel.x()) + std::numbers::pi / 2.0);
    team.sgn = axis.dot(unit_vector(team.alpha0 + std::numbers::pi / 2.0)) >= 0.0 ? 1.0 : -1.0;
    team.delta = cfg_.tune.spacing / team.radius;
    team.delta_final = n >= 2 ? 2.0 * std::numbers::pi / n : 0.0;
    team.delta = std::min(team.delta, team.delta_final);
    for (int j : team.members) def_[j].phase = DefensePhase::Enclose;
  }

  void check_risk_taking() {
    for (size_t k = 0; k < teams_.size(); ++k) {
      Team& team = teams_[k];
      if (team.phase != DefensePhase::Gather && team.phase != DefensePhase::Seek) continue;
      std::vector<int> live = active_of(team.cluster);
      if (live.empty()) continue;
      if (!assignment::risk_taking_check(com_state(live), team.gather_center, cfg_.world)) continue;
      event("risk_switch", tid(team.id), "", "attackers=" + join(live));
      std::vector<int> members = team.members;
      disband(team);
      std::vector<int> targets = live;
      if (targets.size() > members.size()) {
        pending_.insert(pending_.end(), targets.begin() + members.size(), targets.end());
        targets.resize(members.size());
      }
      assign_interceptors(members, targets, "reassign");
    }
  }

  void check_splits() {
    if (!can_cluster_) return;
    const int n_total = static_cast<int>(att_.size());
    for (size_t k = 0; k < teams_.size(); ++k) {
      if (teams_[k].phase != DefensePhase::Gather && teams_[k].phase != DefensePhase::Seek) continue;
      std::vector<int> live = active_of(teams_[k].cluster);
      if (live.empty()) continue;
      std::vector<Vec2> pos = positions(live);
      double thr = clustering::split_threshold(static_cast<int>(live.size()), n_total,
                                               cfg_.tune.string_length, cfg_.rd);
      if (clustering::swarm_radius(pos) <= thr) continue;
      SwarmPartition part = clustering::cluster(pos, cparams_);
      if (part.clusters.size() < 2 && part.unclustered.empty()) continue;
      handle_split(static_cast<int>(k), live, part);
    }
  }

  void handle_split(int k, const std::vector<int>& live, const SwarmPartition& part) {
    // Copy: teams_ may grow below.
    const std::vector<int> members = teams_[k].members;
    const int parent = teams_[k].id;
    std::vector<std::vector<int>> clusters;
    for (const auto& c : part.clusters) {
      std::vector<int> ids;
      for (int local : c) ids.push_back(live[local]);
      clusters.push_back(ids);
    }
    std::vector<int> uc;
    for (int local : part.unclustered) uc.push_back(live[local]);

    SplitSnapshot snap;
    snap.cluster_centers = part.centers;
    for (const auto& c : clusters) snap.cluster_sizes.push_back(static_cast<int>(c.size()));
    for (int i : uc) snap.unclustered.push_back(att_[i].s);
    snap.unclustered_ids = uc;
    for (int j : members) snap.defenders.push_back(def_[j].s);
    snap.defender_ids = members;
    snap.n_attackers = static_cast<int>(live.size());
    snap.rd = cfg_.rd;
    snap.model = model_;
    std::vector<int> caps;
    for (int s : snap.cluster_sizes) caps.push_back(cfg_.rd(s));
    const std::vector<int> nominal = caps;
    const int room = static_cast<int>(members.size()) - static_cast<int>(uc.size());
    if (room < 0 || !reconcile(caps, room)) {
      throw std::runtime_error("split at " + tid(parent) + ": team too small for the new swarms");
    }
    if (caps != nominal) snap.capacities = caps;

    SplitAssignment sol =
        assignment::solve_split(snap, cfg_.split_solver, cfg_.tune.min_clusters, cfg_.tune.w);
    std::string bad = assignment::check_split_assignment(snap, sol.task);
    if (!bad.empty()) throw std::runtime_error("split assignment invalid: " + bad);

    ++trace_.split_events;
    event("split", tid(parent), "",
          "clusters=" + (snap.cluster_sizes.empty() ? std::string("none") : join(snap.cluster_sizes)) +
              " uc=" + std::to_string(uc.size()) + " solver=" + to_string(cfg_.split_solver) +
              " cost=" + std::to_string(sol.cost));
    teams_[k].phase = DefensePhase::Idle;
    for (int i : live) att_[i].team = -1;

    const int nac = static_cast<int>(clusters.size());
    for (int c = 0; c < nac; ++c) {
      Team team;
      team.id = static_cast<int>(teams_.size());
      for (size_t l = 0; l < members.size(); ++l) {
        if (sol.task[l] == c) team.members.push_back(members[l]);
      }
      team.cluster = clusters[c];
      Vec2 centroid = Vec2::Zero();
      for (int j : team.members) centroid += def_[j].s.position;
      centroid /= static_cast<double>(team.members.size());
      team.gather_center = centroid;
      orient(team, centroid);
      for (int j : team.members) {
        def_[j].team = team.id;
        def_[j].target = -1;
      }
      for (int i : team.cluster) att_[i].team = team.id;
      enter_seek(team, centroid);
      event("reassign", tid(team.id), tid(parent),
            "defenders=" + join(team.members) + " attackers=" + join(team.cluster));
      teams_.push_back(std::move(team));
    }
    for (size_t l = 0; l < members.size(); ++l) {
      if (sol.task[l] < nac) continue;
      int i = uc[sol.task[l] - nac];
      start_intercept(members[l], i);
      event("reassign", did(members[l]), aid(i), "intercept");
    }
  }

  // Reverses the β order if that puts each defender nearer its first line slot.
  void orient(Team& team, const Vec2& line_center) {
    std::vector<int> live = active_of(team.cluster);
    Vec2 face = com_state(live).position - line_center;
    double phi = std::atan2(face.y(), face.x());
    const int n = static_cast<int>(team.members.size());
    std::vector<Vec2> slots = formation::line_slots(line_center, phi, n, cfg_.tune.spacing);
    double keep = 0.0, flip = 0.0;
    for (int l = 0; l < n; ++l) {
      keep += (def_[team.members[l]].s.position - slots[l]).norm();
      flip += (def_[team.members[n - 1 - l]].s.position - slots[l]).norm();
    }
    if (flip < keep) std::reverse(team.members.begin(), team.members.end());
    team.slots = slots;
    team.slot_vel.assign(n, Vec2::Zero());
  }

  void assign_pending() {
    if (pending_.empty()) return;
    for (auto it = pending_.begin(); it != pending_.end();) {
      int i = *it;
      if (!active(i)) {
        it = pending_.erase(it);
        continue;
      }
      int best = -1;
      double best_cost = kInf;
      for (size_t j = 0; j < def_.size(); ++j) {
        if (def_[j].phase != DefensePhase::Idle) continue;
        double c = assignment::interception_cost(def_[j].s, att_[i].s, model_);
        if (c < best_cost) {
          best_cost = c;
          best = static_cast<int>(j);
        }
      }
      if (best < 0) return;
      start_intercept(best, i);
      event("reassign", did(best), aid(i), "pending");
      it = pending_.erase(it);
    }
  }

  const char* attacker_phase(const Attacker& a) const {
    switch (a.mode) {
      case Mode::Flock: return "flock";
      case Mode::Dash: return "dash";
      case Mode::RiskTaking: return "risk_taking";
      case Mode::Contained: return "contained";
    }
    return "?";
  }

  void record(long step) {
    const double t = static_cast<double>(step) * cfg_.dt;
    for (size_t i = 0; i < att_.size(); ++i) {
      const Attacker& a = att_[i];
      if (a.status != Status::Active) continue;
      trace_.records.push_back({t, static_cast<int>(i), AgentClass::Attacker, a.s.position,
                                a.s.velocity, attacker_phase(a), a.team});
    }
    for (size_t j = 0; j < def_.size(); ++j) {
      const Defender& d = def_[j];
      trace_.records.push_back({t, static_cast<int>(j), AgentClass::Defender, d.s.position,
                                d.s.velocity, to_string(d.phase), d.team});
    }
  }
};

}  // namespace

SimTrace run(const ScenarioConfig& config) {
  Simulator s(config);
  return s.run();
}

CrossingResult run_crossing(unsigned seed, bool collision_avoidance, double dt) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const AgentParams dp = default_defender_params();
  const AgentParams ap = default_attacker_params();
  const double pi = std::numbers::pi;

  const double theta1 = 2.0 * pi * unit(rng);
  const double cross = (pi / 3.0 + unit(rng) * pi / 2.0) * (unit(rng) < 0.5 ? -1.0 : 1.0);
  const Vec2 u1 = unit_vector(theta1);
  const Vec2 u2 = unit_vector(theta1 + cross);
  const Vec2 x(10.0 * unit(rng) - 5.0, 10.0 * unit(rng) - 5.0);
  const double l1 = 40.0 + 20.0 * unit(rng);
  const double l2 = l1 + 0.6 * unit(rng) - 0.3;

  std::array<AgentState, 2> d;
  d[0].position = x - l1 * u1;
  d[1].position = x - l2 * u2;
  std::array<AgentState, 2> a;
  a[0].position = x + 60.0 * u1;
  a[1].position = x + 60.0 * u2;
  std::array<bool, 2> caught{false, false};
  std::array<Vec2, 2> hold{Vec2::Zero(), Vec2::Zero()};

  const CbfGains gains;
  const double r = 2.0 * dp.body_radius + 0.5;
  CrossingResult out;
  out.min_distance = (d[0].position - d[1].position).norm();
  const long steps = static_cast<long>(std::ceil(20.0 / dt));
  for (long s = 0; s < steps && !(caught[0] && caught[1]); ++s) {
    std::array<Vec2, 2> acc;
    for (int k = 0; k < 2; ++k) {
      acc[k] = caught[k] ? track(d[k], hold[k], Vec2::Zero(), dp) : pursue(d[k], a[k], dp, ap);
    }
    if (collision_avoidance) {
      std::array<Vec2, 2> safe;
      for (int k = 0; k < 2; ++k) {
        const AgentState& o = d[1 - k];
        safe[k] = collision_avoid(acc[k], d[k], {Neighbor{o.position, o.velocity, r}}, dp, gains);
      }
      acc = safe;
    }
    for (int k = 0; k < 2; ++k) d[k] = dynamics::step(d[k], acc[k], dt, dp);
    out.min_distance = std::min(out.min_distance, (d[0].position - d[1].position).norm());
    for (int k = 0; k < 2; ++k) {
      if (!caught[k] && (d[k].position - a[k].position).norm() <= dp.interception_radius) {
        caught[k] = true;
        hold[k] = d[k].position;
      }
    }
  }
  out.both_captured = caught[0] && caught[1];
  return out;
}

}  // namespace sim
}  // namespace swarmdef
