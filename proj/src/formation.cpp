#include "swarmdef/formation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace swarmdef::formation {

std::vector<Vec2> line_slots(const Vec2& center, double phi, int count, double spacing) {
  if (count < 1) throw std::invalid_argument("line_slots: count must be positive");
  if (!(spacing > 0.0)) throw std::invalid_argument("line_slots: spacing must be positive");
  const Vec2 axis = unit_vector(phi + M_PI / 2.0);
  std::vector<Vec2> slots;
  slots.reserve(count);
  for (int l = 1; l <= count; ++l) {
    double offset = spacing * (count - 2 * l + 1) / 2.0;
    slots.push_back(center + offset * axis);
  }
  return slots;
}

LineFormation make_line(const Vec2& center, double phi, int count, double spacing) {
  return LineFormation{center, phi, spacing, line_slots(center, phi, count, spacing)};
}

bool conical_envelope_contains(const Vec2& r0, double psi, const Vec2& r_p, const Vec2& point) {
  Vec2 radial = r0 - r_p;
  double n = radial.norm();
  if (n == 0.0) throw std::invalid_argument("conical envelope: r0 coincides with r_p");
  radial /= n;
  const Vec2 transverse(-radial.y(), radial.x());
  const Vec2 d = point - r0;
  const double a_r = d.dot(radial);
  const double a_t = d.dot(transverse);
  return std::atan2(std::abs(a_r), std::abs(a_t)) < psi;
}

TerminalGroups terminal_groups(const StringNetTeam& team, int n_uc) {
  const int size = static_cast<int>(team.order.size());
  if (n_uc < 0) throw std::invalid_argument("terminal_groups: negative count");
  const int n_left = std::min(n_uc, size);
  const int n_right = std::min(n_uc, size - n_left);
  TerminalGroups g;
  g.left.assign(team.order.begin(), team.order.begin() + n_left);
  g.right.assign(team.order.end() - n_right, team.order.end());
  g.central.assign(team.order.begin() + n_left, team.order.end() - n_right);
  return g;
}

UnclusteredSplit split_unclustered_groups(const std::vector<int>& attackers,
                                          const std::vector<Vec2>& attacker_pos,
                                          const StringNetTeam& team,
                                          const std::vector<Vec2>& defender_pos) {
  if (team.order.size() < 2) throw std::invalid_argument("split_unclustered_groups: team too small");
  const Vec2 first = defender_pos.at(team.order.front());
  const Vec2 last = defender_pos.at(team.order.back());
  const Vec2 mid = 0.5 * (first + last);
  const Vec2 towards_left = first - last;

  UnclusteredSplit s;
  for (int a : attackers) {
    if ((attacker_pos.at(a) - mid).dot(towards_left) >= 0.0) {
      s.left_attackers.push_back(a);
    } else {
      s.right_attackers.push_back(a);
    }
  }
  const size_t nl = std::min(s.left_attackers.size(), team.order.size());
  const size_t nr = std::min(s.right_attackers.size(), team.order.size() - nl);
  s.left_defenders.assign(team.order.begin(), team.order.begin() + nl);
  s.right_defenders.assign(team.order.end() - nr, team.order.end());
  return s;
}

ClusterGroupSplit split_clusters_equal(const std::vector<Vec2>& centers,
                                       const std::vector<int>& sizes,
                                       const StringNetTeam& team,
                                       const std::vector<Vec2>& defender_pos,
                                       const ResourceAllocation& rd) {
  if (centers.size() < 2 || centers.size() != sizes.size()) {
    throw std::invalid_argument("split_clusters_equal: need at least two clusters with sizes");
  }
  if (team.order.size() < 2) throw std::invalid_argument("split_clusters_equal: team too small");
  const Vec2 first = defender_pos.at(team.order.front());
  const Vec2 last = defender_pos.at(team.order.back());
  const Vec2 mid = 0.5 * (first + last);
  const Vec2 ref = last - mid;

  const int k = static_cast<int>(centers.size());
  std::vector<double> angle(k);
  for (int i = 0; i < k; ++i) {
    Vec2 v = centers[i] - mid;
    angle[i] = std::atan2(ref.x() * v.y() - ref.y() * v.x(), ref.dot(v));
  }
  std::vector<int> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return angle[a] > angle[b]; });

  const int total = std::accumulate(sizes.begin(), sizes.end(), 0);
  const int half = (total + 1) / 2;
  ClusterGroupSplit out;
  int acc = 0;
  for (int i : idx) {
    if (acc < half) {
      out.left_clusters.push_back(i);
      acc += sizes[i];
    } else {
      out.right_clusters.push_back(i);
    }
  }
  // Keep both sides non-empty.
  if (out.right_clusters.empty()) {
    out.right_clusters.push_back(out.left_clusters.back());
    out.left_clusters.pop_back();
  }
  int n_left_def = 0;
  for (int i : out.left_clusters) n_left_def += rd(sizes[i]);
  n_left_def = std::min<int>(n_left_def, static_cast<int>(team.order.size()));
  out.left_defenders.assign(team.order.begin(), team.order.begin() + n_left_def);
  out.right_defenders.assign(team.order.begin() + n_left_def, team.order.end());
  return out;
}

}  // namespace swarmdef::formation
