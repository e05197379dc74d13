#pragma once

#include <vector>

#include "swarmdef/dynamics.hpp"
#include "swarmdef/resource.hpp"

namespace swarmdef {

struct ClusteringParams {
  double eps = 0.0;
  int min_pts = 3;
  double max_net_radius = 0.0;  // ρ̄_ac
  double string_length = 0.0;   // R̄_sb
};

struct SwarmPartition {
  std::vector<std::vector<int>> clusters;  // ascending indices
  std::vector<int> unclustered;
  std::vector<Vec2> centers;
  std::vector<double> radii;
};

namespace clustering {

ClusteringParams dbscan_params(int n_attackers, int n_defenders, double string_length);

// DBSCAN labels: cluster id >= 0, or -1 for noise. Clusters are grown from
// core points in ascending index order; a border point takes the cluster of
// its lowest-index core neighbour.
std::vector<int> dbscan_labels(const std::vector<Vec2>& points, double eps, int min_pts);

SwarmPartition cluster(const std::vector<Vec2>& points, const ClusteringParams& params);

Vec2 center_of_mass(const std::vector<Vec2>& points);
double swarm_radius(const std::vector<Vec2>& points);

double split_threshold(int cluster_size, int n_attackers, double string_length,
                       const ResourceAllocation& rd = {});

std::vector<int> detect_split(const SwarmPartition& partition,
                              const std::vector<double>& thresholds);

}  // namespace clustering
}  // namespace swarmdef
