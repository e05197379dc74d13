#include "swarmdef/resource.hpp"

#include <stdexcept>

#include <spdlog/spdlog.h>

namespace swarmdef {

ResourceAllocation::ResourceAllocation(std::map<int, int> table) : table_(std::move(table)) {
  int prev_n = 0;
  int prev_r = 0;
  for (const auto& [n, r] : table_) {
    if (n < 1 || r < 1) throw std::invalid_argument("R_d table: sizes and counts must be positive");
    if (prev_n > 0 && r <= prev_r) throw std::invalid_argument("R_d table must be strictly increasing");
    if (r < n) spdlog::warn("R_d({}) = {} assigns fewer defenders than attackers", n, r);
    prev_n = n;
    prev_r = r;
  }
}

int ResourceAllocation::operator()(int n) const {
  if (table_.empty()) return n;
  auto it = table_.upper_bound(n);
  if (it == table_.begin()) return n;
  --it;
  return it->second + (n - it->first);
}

}  // namespace swarmdef
