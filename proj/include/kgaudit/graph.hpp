#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace kgaudit {

using EntityId = std::uint32_t;
using RelationId = std::uint32_t;

struct Triple {
  EntityId head;
  RelationId relation;
  EntityId tail;

  friend bool operator==(const Triple&, const Triple&) = default;
  friend auto operator<=>(const Triple&, const Triple&) = default;
};

struct TripleHash {
  std::size_t operator()(const Triple& t) const {
    std::uint64_t x = (static_cast<std::uint64_t>(t.head) << 32) | t.tail;
    x ^= static_cast<std::uint64_t>(t.relation) * 0x9E3779B97F4A7C15ull;
    x ^= x >> 33;
    x *= 0xFF51AFD7ED558CCDull;
    x ^= x >> 33;
    return static_cast<std::size_t>(x);
  }
};

struct LabeledTriple {
  std::string head;
  std::string relation;
  std::string tail;

  friend bool operator==(const LabeledTriple&, const LabeledTriple&) = default;
  friend auto operator<=>(const LabeledTriple&, const LabeledTriple&) = default;
};

// Bidirectional label <-> dense-id mapping. Ids are assigned in
// first-appearance order, so construction is deterministic given input order.
class Vocab {
 public:
  std::uint32_t intern(const std::string& label) {
    auto it = index_.find(label);
    if (it != index_.end()) return it->second;
    const auto id = static_cast<std::uint32_t>(labels_.size());
    labels_.push_back(label);
    index_.emplace(labels_.back(), id);
    return id;
  }

  std::optional<std::uint32_t> find(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  const std::string& label(std::uint32_t id) const { return labels_[id]; }
  std::uint32_t size() const { return static_cast<std::uint32_t>(labels_.size()); }
  const std::vector<std::string>& labels() const { return labels_; }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

// Interned directed multigraph of (head, relation, tail) triples with CSR
// adjacency from entity id to incident triple indices.
struct KnowledgeGraph {
  Vocab entities;
  Vocab relations;
  std::vector<Triple> triples;  // deduplicated, first-appearance order

  // CSR indices into `triples`, keyed by head (out) and tail (in).
  std::vector<std::uint64_t> out_offsets;
  std::vector<std::uint64_t> in_offsets;
  std::vector<std::uint32_t> out_index;
  std::vector<std::uint32_t> in_index;

  std::uint32_t num_entities() const { return entities.size(); }
  std::uint32_t num_relations() const { return relations.size(); }
  std::uint64_t num_triples() const { return triples.size(); }

  std::span<const std::uint32_t> out_triples(EntityId e) const {
    return {out_index.data() + out_offsets[e],
            out_index.data() + out_offsets[e + 1]};
  }
  std::span<const std::uint32_t> in_triples(EntityId e) const {
    return {in_index.data() + in_offsets[e], in_index.data() + in_offsets[e + 1]};
  }

  LabeledTriple labeled(const Triple& t) const {
    return {entities.label(t.head), relations.label(t.relation),
            entities.label(t.tail)};
  }
  std::vector<LabeledTriple> labeled_triples() const;
};

// Builds the graph, assigning entity/relation ids in first-appearance order
// and dropping exact duplicate triples. Throws EmptyGraphError on empty input.
KnowledgeGraph build_graph(std::span<const LabeledTriple> triples);

// Same, but seeds the vocabularies with imported entries (used for bundle
// graphs whose test split mentions relations absent from the graph itself).
KnowledgeGraph build_graph(std::span<const LabeledTriple> triples,
                           Vocab imported_entities, Vocab imported_relations);

// Re-labels a triple subset of `parent` into a standalone graph with fresh
// first-appearance vocabularies.
KnowledgeGraph subgraph_from_parent(const KnowledgeGraph& parent,
                                    std::span<const Triple> triples);

enum class EdgeWeighting {
  kMultiplicity,  // one edge per unordered pair, weight = #parallel triples
  kUnit,          // all edge weights forced to 1
};

// Relation-free weighted undirected adjacency. Self-loop triples contribute
// no edge; degree is the weighted degree.
struct UndirectedView {
  std::uint32_t n = 0;
  std::vector<std::uint64_t> offsets;    // n + 1
  std::vector<std::uint32_t> neighbors;
  std::vector<std::uint32_t> weights;    // parallel to neighbors, >= 1
  std::vector<std::uint64_t> degree;     // weighted degree per entity
  std::uint64_t total_edge_weight = 0;   // W; sum(degree) == 2W
  bool unit_weights = true;              // every edge weight is exactly 1
  std::uint64_t build_stamp = 0;         // unique per construction (cache key)

  std::span<const std::uint32_t> neighbors_of(EntityId u) const {
    return {neighbors.data() + offsets[u], neighbors.data() + offsets[u + 1]};
  }
  std::span<const std::uint32_t> weights_of(EntityId u) const {
    return {weights.data() + offsets[u], weights.data() + offsets[u + 1]};
  }
};

using TriplePredicate = std::function<bool(const Triple&)>;

// Projects the graph onto its undirected, relation-free view. `keep`, when
// set, selects the triple subset to project (e.g. "graph minus a holdout").
UndirectedView undirected_view(const KnowledgeGraph& graph,
                               EdgeWeighting weighting = EdgeWeighting::kMultiplicity,
                               const TriplePredicate& keep = {});

}  // namespace kgaudit
