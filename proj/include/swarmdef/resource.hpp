#pragma once

#include <map>

namespace swarmdef {

// R_d: number of defenders assigned to a swarm of n attackers.
// Identity by default. A table overrides individual sizes; sizes between
// table entries keep the deficit of the nearest smaller entry.
class ResourceAllocation {
 public:
  ResourceAllocation() = default;
  // Throws std::invalid_argument unless the table is strictly increasing.
  explicit ResourceAllocation(std::map<int, int> table);

  int operator()(int n) const;
  bool is_identity() const { return table_.empty(); }
  const std::map<int, int>& table() const { return table_; }

 private:
  std::map<int, int> table_;
};

}  // namespace swarmdef
