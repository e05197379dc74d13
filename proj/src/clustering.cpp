#include "swarmdef/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace swarmdef::clustering {

ClusteringParams dbscan_params(int n_attackers, int n_defenders, double string_length) {
  if (n_defenders < 3) throw std::invalid_argument("dbscan_params: need at least 3 defenders");
  if (n_attackers < 2) throw std::invalid_argument("dbscan_params: need at least 2 attackers");
  if (!(string_length > 0.0)) throw std::invalid_argument("dbscan_params: string length must be positive");
  ClusteringParams p;
  p.min_pts = 3;
  p.string_length = string_length;
  p.max_net_radius = 0.5 * string_length / std::tan(std::numbers::pi / n_defenders);
  p.eps = p.max_net_radius * (p.min_pts - 1) / (n_attackers - 1);
  return p;
}

std::vector<int> dbscan_labels(const std::vector<Vec2>& points, double eps, int min_pts) {
  const int n = static_cast<int>(points.size());
  const double eps2 = eps * eps;
  std::vector<std::vector<int>> nbr(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if ((points[i] - points[j]).squaredNorm() <= eps2) nbr[i].push_back(j);
    }
  }
  std::vector<char> core(n);
  for (int i = 0; i < n; ++i) core[i] = static_cast<int>(nbr[i].size()) >= min_pts;

  std::vector<int> label(n, -1);
  int next = 0;
  std::vector<int> stack;
  for (int i = 0; i < n; ++i) {
    if (!core[i] || label[i] >= 0) continue;
    label[i] = next;
    stack.assign(1, i);
    while (!stack.empty()) {
      int p = stack.back();
      stack.pop_back();
      for (int q : nbr[p]) {
        if (core[q] && label[q] < 0) {
          label[q] = next;
          stack.push_back(q);
        }
      }
    }
    ++next;
  }
  for (int i = 0; i < n; ++i) {
    if (core[i]) continue;
    for (int q : nbr[i]) {  // ascending
      if (core[q]) {
        label[i] = label[q];
        break;
      }
    }
  }
  return label;
}

Vec2 center_of_mass(const std::vector<Vec2>& points) {
  Vec2 c = Vec2::Zero();
  if (points.empty()) return c;
  for (const auto& p : points) c += p;
  return c / static_cast<double>(points.size());
}

double swarm_radius(const std::vector<Vec2>& points) {
  if (points.empty()) throw std::invalid_argument("swarm_radius: empty cluster");
  Vec2 c = center_of_mass(points);
  double r = 0.0;
  for (const auto& p : points) r = std::max(r, (p - c).norm());
  return r;
}

SwarmPartition cluster(const std::vector<Vec2>& points, const ClusteringParams& params) {
  std::vector<int> label = dbscan_labels(points, params.eps, params.min_pts);
  int n_labels = 0;
  for (int l : label) n_labels = std::max(n_labels, l + 1);
  std::vector<std::vector<int>> groups(n_labels);
  SwarmPartition out;
  for (int i = 0; i < static_cast<int>(points.size()); ++i) {
    if (label[i] < 0) {
      out.unclustered.push_back(i);
    } else {
      groups[label[i]].push_back(i);
    }
  }
  for (auto& g : groups) {
    if (static_cast<int>(g.size()) < params.min_pts) {
      out.unclustered.insert(out.unclustered.end(), g.begin(), g.end());
      continue;
    }
    std::vector<Vec2> pts;
    for (int i : g) pts.push_back(points[i]);
    out.centers.push_back(center_of_mass(pts));
    out.radii.push_back(swarm_radius(pts));
    out.clusters.push_back(std::move(g));
  }
  std::sort(out.unclustered.begin(), out.unclustered.end());
  return out;
}

double split_threshold(int cluster_size, int n_attackers, double string_length,
                       const ResourceAllocation& rd) {
  if (cluster_size < 1 || n_attackers < 2) throw std::invalid_argument("split_threshold: bad sizes");
  double full = 0.5 * string_length / std::tan(std::numbers::pi / rd(n_attackers));
  return full * (cluster_size - 1) / (n_attackers - 1);
}

std::vector<int> detect_split(const SwarmPartition& partition,
                              const std::vector<double>& thresholds) {
  if (thresholds.size() != partition.radii.size()) {
    throw std::invalid_argument("detect_split: one threshold per cluster required");
  }
  std::vector<int> out;
  for (size_t k = 0; k < thresholds.size(); ++k) {
    if (partition.radii[k] > thresholds[k]) out.push_back(static_cast<int>(k));
  }
  return out;
}

}  // namespace swarmdef::clustering
