#pragma once

#include <cstdint>
#include <vector>

#include "kgaudit/graph.hpp"

namespace kgaudit {

struct PartitionAssignment {
  std::vector<std::uint32_t> community_of;  // entity id -> dense community id
  std::uint32_t community_count = 0;
};

// Q = sum_c [ w_in(c)/W - resolution * (d(c)/2W)^2 ] with W the total edge
// weight, w_in the intra-community weight and d(c) the community degree.
// Throws UndefinedModularityError when the view has no edges.
double modularity(const UndirectedView& view, const PartitionAssignment& assignment,
                  double resolution = 1.0);

// Two-phase Louvain on the weighted undirected view: single-node
// best-gain moves (sweep order shuffled by rng_seed, ties to the smallest
// community id) until no gain, then community aggregation, repeated until the
// modularity improvement drops below 1e-7.
PartitionAssignment louvain_partition(const UndirectedView& view,
                                      double resolution, std::uint64_t rng_seed);

}  // namespace kgaudit
