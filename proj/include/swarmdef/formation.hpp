#pragma once

#include <vector>

#include "swarmdef/dynamics.hpp"
#include "swarmdef/resource.hpp"

namespace swarmdef {

inline Vec2 unit_vector(double angle) { return Vec2(std::cos(angle), std::sin(angle)); }

struct LineFormation {
  Vec2 center = Vec2::Zero();
  double heading = 0.0;  // φ, facing the swarm
  double spacing = 0.0;
  std::vector<Vec2> slots;
};

enum class NetKind { Open, Closed };

// Ordered defender ids; order[l] is β(l + 1).
struct StringNetTeam {
  std::vector<int> order;
  NetKind kind = NetKind::Open;
};

namespace formation {

std::vector<Vec2> line_slots(const Vec2& center, double phi, int count, double spacing);
LineFormation make_line(const Vec2& center, double phi, int count, double spacing);

// Double cone about r0, transverse to the r0 -> r_p direction, open half-angle ψ.
bool conical_envelope_contains(const Vec2& r0, double psi, const Vec2& r_p, const Vec2& point);

struct TerminalGroups {
  std::vector<int> left;
  std::vector<int> right;
  std::vector<int> central;
};

TerminalGroups terminal_groups(const StringNetTeam& team, int n_uc);

struct UnclusteredSplit {
  std::vector<int> left_attackers;
  std::vector<int> right_attackers;
  std::vector<int> left_defenders;
  std::vector<int> right_defenders;
};

// Attacker ids are looked up in attacker_pos, defender ids in defender_pos.
UnclusteredSplit split_unclustered_groups(const std::vector<int>& attackers,
                                          const std::vector<Vec2>& attacker_pos,
                                          const StringNetTeam& team,
                                          const std::vector<Vec2>& defender_pos);

struct ClusterGroupSplit {
  std::vector<int> left_clusters;  // indices into the input cluster list, sorted order
  std::vector<int> right_clusters;
  std::vector<int> left_defenders;
  std::vector<int> right_defenders;
};

ClusterGroupSplit split_clusters_equal(const std::vector<Vec2>& centers,
                                       const std::vector<int>& sizes,
                                       const StringNetTeam& team,
                                       const std::vector<Vec2>& defender_pos,
                                       const ResourceAllocation& rd = {});

}  // namespace formation
}  // namespace swarmdef
