#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kgaudit/graph.hpp"
#include "kgaudit/io.hpp"
#include "kgaudit/louvain.hpp"
#include "kgaudit/ppr.hpp"

namespace kgaudit {

// Legacy capped 2-hop neighborhood sampling: train neighborhoods are
// extracted around random seed entities and removed from the graph, then the
// inference graph is sampled the same way from the remainder.
struct GrailConfig {
  std::uint32_t train_seed_entities = 10;
  std::uint32_t inf_seed_entities = 20;
  std::uint32_t max_train_hop_cap = 50;
  std::uint32_t max_inf_hop_cap = 50;
  std::uint64_t rng_seed = 0;
};

DatasetBundle grail_sample(const KnowledgeGraph& graph, const GrailConfig& cfg);

// Node split: a p-fraction of entities induces the train graph, the
// complement induces the inference graph, cross-partition triples drop.
struct IlpcConfig {
  double train_node_fraction = 0.5;
  std::uint64_t rng_seed = 0;
};

DatasetBundle ilpc_sample(const KnowledgeGraph& graph, const IlpcConfig& cfg);

struct PartitionConfig {
  double resolution = 1.0;
  std::uint32_t k = 2;  // train + (k - 1) inference graphs
  std::uint64_t min_edges = 50;
  Task task = Task::kE;
  double new_rel_threshold = 0.05;  // task E: max removable triple fraction
  double test_fraction = 0.10;
  double valid_fraction = 0.10;
  std::uint64_t rng_seed = 0;
};

struct CandidateInfo {
  std::uint32_t community = 0;
  std::uint64_t triples_total = 0;   // induced triples before the LCC cut
  std::uint64_t triples = 0;         // after LCC (and task-E relation removal)
  std::uint64_t entities = 0;
  double lcc_dropped_fraction = 0.0;
  double new_relation_fraction = 0.0;  // triple fraction vs the train candidate
  bool qualified = false;
  std::string disqualify_reason;  // "min_edges", "new_relation_threshold", ...
  double delta_spd_estimate = 0.0;
  double delta_spd_deviation = 0.0;  // |candidate - parent|, the primary score
  double ppr_hits10_estimate = 0.0;
  double ppr_hits10_deviation = 0.0;  // tiebreak
  std::string role = "unused";        // "train", "inference_<i>" or "unused"
};

struct SelectionReport {
  double parent_delta_spd = 0.0;
  double parent_ppr_hits10 = 0.0;
  std::uint64_t cross_partition_triples = 0;  // dropped at partition boundaries
  std::vector<CandidateInfo> candidates;
};

struct PartitionSelection {
  KnowledgeGraph train;
  std::vector<KnowledgeGraph> inference;
  SelectionReport report;
};

// Turns a partition assignment into train + (k-1) inference graphs. Each
// community induces a candidate (largest connected component only); the
// largest qualifying candidate becomes train and the k-1 candidates whose
// estimated delta-SPD sits closest to the parent's become inference graphs.
PartitionSelection select_partitions(const KnowledgeGraph& graph,
                                     const PartitionAssignment& assignment,
                                     const PartitionConfig& cfg);

// Degree-preserving random holdout: no held-out triple may leave either of
// its entities without a remaining incident triple. Shortfalls (targets made
// unreachable by the constraint) are recorded as bundle warnings.
DatasetBundle make_splits(const KnowledgeGraph& train,
                          const std::vector<KnowledgeGraph>& inference,
                          const PartitionConfig& cfg);

// Single-graph holdout used by make_splits and the selection estimator.
struct Holdout {
  std::vector<Triple> kept;
  std::vector<Triple> held;
  std::uint64_t shortfall = 0;
};
Holdout degree_preserving_holdout(const KnowledgeGraph& graph, double fraction,
                                  std::uint64_t rng_seed);

}  // namespace kgaudit
