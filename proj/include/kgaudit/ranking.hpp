#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "kgaudit/graph.hpp"
#include "kgaudit/io.hpp"
#include "kgaudit/ppr.hpp"

namespace kgaudit {

enum class Direction : std::uint8_t { kPredictTail = 0, kPredictHead = 1 };

struct Query {
  EntityId known;
  RelationId relation;
  Direction direction;
  EntityId answer;
};

// Known true answers per (entity, relation, direction), built from the union
// of a graph's triples and its held-out test triples (plus validation triples
// in the transductive protocol). The query's own answer is always a member.
class FilterIndex {
 public:
  FilterIndex(const KnowledgeGraph& graph, std::span<const Triple> test,
              std::span<const Triple> extra = {});

  std::span<const EntityId> answers(EntityId known, RelationId relation,
                                    Direction direction) const;

 private:
  void add(const Triple& t);
  std::unordered_map<std::uint64_t, std::vector<EntityId>> map_;
};

enum class Heuristic { kPpr, kTailDegree };

std::string heuristic_name(Heuristic h);
Heuristic parse_heuristic(const std::string& name);

// Sparse scores over an entity universe; entities without an entry score 0.
struct ScoreVector {
  std::uint32_t universe = 0;
  std::vector<std::pair<EntityId, double>> entries;  // sorted by id, nonzero

  double value(EntityId e) const;
};

ScoreVector score_candidates(const KnowledgeGraph& graph, const Query& query,
                             Heuristic heuristic, const PprConfig& cfg = {},
                             EdgeWeighting weighting = EdgeWeighting::kUnit);

struct RankOutcome {
  std::uint64_t greater = 0;       // candidates scoring strictly above the answer
  std::uint64_t equal_others = 0;  // candidates tied with the answer (answer excl.)

  double rank() const {
    return 1.0 + static_cast<double>(greater) +
           static_cast<double>(equal_others) / 2.0;
  }
  // Fraction of tie-break orderings placing the answer within the top k.
  double hits_credit(unsigned k) const {
    const double credit = (static_cast<double>(k) - static_cast<double>(greater)) /
                          (static_cast<double>(equal_others) + 1.0);
    if (credit <= 0.0) return 0.0;
    return credit < 1.0 ? credit : 1.0;
  }
};

// Candidates are all entities of the universe minus `filtered` (the answer is
// retained; entries of `filtered` equal to the answer are ignored). The rank
// is the expected rank under uniform random tie-breaking.
RankOutcome rank_outcome(const ScoreVector& scores, EntityId answer,
                         std::span<const EntityId> filtered);
double rank_with_ties(const ScoreVector& scores, EntityId answer,
                      std::span<const EntityId> filtered);

struct MetricBlock {
  double mrr = 0.0;
  double hits1 = 0.0;
  double hits3 = 0.0;
  double hits10 = 0.0;
  std::uint64_t query_count = 0;
};

struct RankingReport {
  std::string heuristic;
  std::vector<MetricBlock> per_graph;  // one block per inference graph
  MetricBlock aggregate;               // unweighted mean over inference graphs
  double alpha = 0.0;
  double epsilon = 0.0;
  std::string tie_policy = "mean-rank";
};

struct EvalOptions {
  EdgeWeighting weighting = EdgeWeighting::kUnit;
  int jobs = 0;  // <= 0: hardware concurrency
};

// Two queries per test triple (head and tail prediction) under the filtered
// protocol, each inference graph ranked against its own entity universe.
RankingReport evaluate_dataset(const DatasetBundle& bundle, Heuristic heuristic,
                               const PprConfig& cfg = {},
                               const EvalOptions& opts = {});

}  // namespace kgaudit
