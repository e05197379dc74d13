#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "swarmdef/assignment.hpp"
#include "swarmdef/clustering.hpp"
#include "swarmdef/dynamics.hpp"
#include "swarmdef/resource.hpp"

namespace swarmdef {

enum class AgentClass { Attacker, Defender };

enum class DefensePhase { Idle, Gather, Seek, Enclose, Herd, Intercept };

const char* to_string(DefensePhase p);

// A scripted change of behaviour for members of one attacker group. Angles
// are relative to the group's heading towards P, positive to the left.
struct SubgroupScript {
  std::vector<int> members;
  double drift_deg = 90.0;
  double drift_speed = 0.0;
  double drift_time = 0.0;
};

struct BreakawayScript {
  std::vector<int> members;
  double delay = 0.0;      // after the trigger
  double dash_deg = 90.0;  // transverse dash before heading for P
  double dash_time = 0.0;
};

struct SplitScript {
  int group = 0;
  std::optional<double> time;               // absolute trigger time
  std::optional<double> trigger_distance;   // nearest defender to group CoM
  std::vector<SubgroupScript> subgroups;
  std::vector<BreakawayScript> breakaways;
};

struct AttackerSpec {
  AgentState state;
  int group = -1;  // -1: individual risk-taking attacker
};

struct Tunables {
  double w = 0.5;
  double lead_time = 5.0;
  double eps_tol = 0.1;
  int min_clusters = 3;
  double string_length = 10.0;  // R̄_sb
  double spacing = 2.5;
  double standoff = 15.0;       // ρ_pa
  double eps1 = 1.0;
  double eps2 = 0.5;
  double herd_speed_factor = 0.5;
  double cruise_speed = 3.0;    // attacker swarm speed towards P
  double avoid_radius = 15.0;   // ϱ_ai: attackers react to defenders inside it
  double seek_speed = 5.0;
  double enclose_speed = 4.0;
  bool collision_avoidance = true;
  double cbf_k1 = 4.0;
  double cbf_k2 = 4.0;
  double cbf_range = 20.0;
  double split_check_period = 0.1;
};

struct ScenarioConfig {
  std::string name;
  unsigned seed = 0;
  double dt = 0.02;
  double duration = 600.0;
  WorldGeometry world;
  AgentParams attacker = default_attacker_params();
  AgentParams defender = default_defender_params();
  std::vector<AttackerSpec> attackers;
  std::vector<AgentState> defenders;
  std::vector<SplitScript> scripts;
  SplitSolver split_solver = SplitSolver::RsMiqcqp;
  ResourceAllocation rd;
  Tunables tune;
  int trace_stride = 1;

  // Throws std::invalid_argument on inconsistent values.
  void validate() const;
};

struct TraceRecord {
  double t = 0.0;
  int agent_id = 0;
  AgentClass cls = AgentClass::Attacker;
  Vec2 position = Vec2::Zero();
  Vec2 velocity = Vec2::Zero();
  std::string phase;
  int team = -1;
};

struct Event {
  double t = 0.0;
  std::string type;
  std::string subject;
  std::string object;
  std::string detail;
};

struct SimTrace {
  std::vector<TraceRecord> records;
  std::vector<Event> events;
  double end_time = 0.0;
  bool completed = false;     // every attacker resolved before the duration
  std::string error;          // set when a solver failure aborted the run
  double max_speed_excess = -kInf;  // max over steps of |v| − class speed bound
  double min_defender_gap = kInf;   // closest defender-defender approach
  int split_events = 0;
  int breaches = 0;

  std::vector<Event> events_of(const std::string& type) const;
};

struct Neighbor {
  Vec2 position = Vec2::Zero();
  Vec2 velocity = Vec2::Zero();
  double radius = 0.0;  // combined safe distance
};

struct CbfGains {
  double k1 = 4.0;
  double k2 = 4.0;
};

namespace sim {

// Exponential CBF filter: for each neighbour enforce
// ḧ + k1 ḣ + k2 h ≥ 0 with h = |Δr|² − r², by projecting onto the
// admissible half-plane. The result is clamped to u_max.
Vec2 collision_avoid(const Vec2& accel_nominal, const AgentState& self,
                     const std::vector<Neighbor>& neighbors, const AgentParams& params,
                     const CbfGains& gains);

// Bounded tracking of a moving point with velocity feed-forward.
Vec2 track(const AgentState& self, const Vec2& target, const Vec2& target_velocity,
           const AgentParams& params, double gain = 1.0);

// Lead pursuit towards an attacker at full thrust.
Vec2 pursue(const AgentState& self, const AgentState& target, const AgentParams& params,
            const AgentParams& target_params);

// Velocity of a risk-averse swarm's virtual leader: cruise towards P, slowing
// to a stop as defenders close in, plus a bounded push away from defenders
// inside the avoidance radius.
Vec2 swarm_velocity(const Vec2& leader, const std::vector<Vec2>& defenders,
                    const WorldGeometry& world, const Tunables& tune, const AgentParams& attacker);

SimTrace run(const ScenarioConfig& config);

struct CrossingResult {
  double min_distance = kInf;
  bool both_captured = false;
};

// Two defenders intercepting two attackers whose pursuit lines cross.
CrossingResult run_crossing(unsigned seed, bool collision_avoidance, double dt = 0.02);

}  // namespace sim

namespace scenario_io {

inline constexpr const char* kVersion = "v1";

ScenarioConfig load_config(const std::string& path);
ScenarioConfig parse_config(const std::string& json_text);
std::string dump_config(const ScenarioConfig& config);

void write_trace_csv(const SimTrace& trace, std::ostream& out);
void write_events_csv(const SimTrace& trace, std::ostream& out);

}  // namespace scenario_io
}  // namespace swarmdef
