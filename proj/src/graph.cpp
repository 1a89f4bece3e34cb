#include "kgaudit/graph.hpp"

#include <algorithm>
#include <atomic>
#include <unordered_set>
#include <utility>

#include "kgaudit/errors.hpp"

namespace kgaudit {

std::vector<LabeledTriple> KnowledgeGraph::labeled_triples() const {
  std::vector<LabeledTriple> out;
  out.reserve(triples.size());
  for (const Triple& t : triples) out.push_back(labeled(t));
  return out;
}

namespace {

void build_csr(KnowledgeGraph& g) {
  const std::uint32_t n = g.num_entities();
  const auto m = static_cast<std::uint32_t>(g.triples.size());
  g.out_offsets.assign(n + 1, 0);
  g.in_offsets.assign(n + 1, 0);
  for (const Triple& t : g.triples) {
    ++g.out_offsets[t.head + 1];
    ++g.in_offsets[t.tail + 1];
  }
  for (std::uint32_t i = 0; i < n; ++i) {
    g.out_offsets[i + 1] += g.out_offsets[i];
    g.in_offsets[i + 1] += g.in_offsets[i];
  }
  g.out_index.resize(m);
  g.in_index.resize(m);
  std::vector<std::uint64_t> out_pos(g.out_offsets.begin(), g.out_offsets.end() - 1);
  std::vector<std::uint64_t> in_pos(g.in_offsets.begin(), g.in_offsets.end() - 1);
  for (std::uint32_t i = 0; i < m; ++i) {
    const Triple& t = g.triples[i];
    g.out_index[out_pos[t.head]++] = i;
    g.in_index[in_pos[t.tail]++] = i;
  }
}

}  // namespace

KnowledgeGraph build_graph(std::span<const LabeledTriple> triples,
                           Vocab imported_entities, Vocab imported_relations) {
  if (triples.empty()) throw EmptyGraphError();
  KnowledgeGraph g;
  g.entities = std::move(imported_entities);
  g.relations = std::move(imported_relations);
  g.triples.reserve(triples.size());
  std::unordered_set<Triple, TripleHash> seen;
  seen.reserve(triples.size() * 2);
  for (const LabeledTriple& lt : triples) {
    const Triple t{g.entities.intern(lt.head), g.relations.intern(lt.relation),
                   g.entities.intern(lt.tail)};
    if (seen.insert(t).second) g.triples.push_back(t);
  }
  build_csr(g);
  return g;
}

KnowledgeGraph build_graph(std::span<const LabeledTriple> triples) {
  return build_graph(triples, Vocab{}, Vocab{});
}

KnowledgeGraph subgraph_from_parent(const KnowledgeGraph& parent,
                                    std::span<const Triple> triples) {
  std::vector<LabeledTriple> labeled;
  labeled.reserve(triples.size());
  for (const Triple& t : triples) labeled.push_back(parent.labeled(t));
  return build_graph(labeled);
}

UndirectedView undirected_view(const KnowledgeGraph& graph,
                               EdgeWeighting weighting,
                               const TriplePredicate& keep) {
  static std::atomic<std::uint64_t> next_stamp{1};
  const std::uint32_t n = graph.num_entities();
  UndirectedView view;
  view.n = n;
  view.build_stamp = next_stamp.fetch_add(1);

  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  pairs.reserve(graph.triples.size());
  for (const Triple& t : graph.triples) {
    if (t.head == t.tail) continue;  // self-loops carry no distance
    if (keep && !keep(t)) continue;
    pairs.emplace_back(std::min(t.head, t.tail), std::max(t.head, t.tail));
  }
  std::sort(pairs.begin(), pairs.end());

  // Collapse parallel triples into one weighted edge per unordered pair.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  std::vector<std::uint32_t> edge_weight;
  edges.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size();) {
    std::size_t j = i;
    while (j < pairs.size() && pairs[j] == pairs[i]) ++j;
    edges.push_back(pairs[i]);
    edge_weight.push_back(weighting == EdgeWeighting::kUnit
                              ? 1u
                              : static_cast<std::uint32_t>(j - i));
    i = j;
  }

  view.offsets.assign(n + 1, 0);
  for (const auto& [u, v] : edges) {
    ++view.offsets[u + 1];
    ++view.offsets[v + 1];
  }
  for (std::uint32_t i = 0; i < n; ++i) view.offsets[i + 1] += view.offsets[i];
  view.neighbors.resize(edges.size() * 2);
  view.weights.resize(edges.size() * 2);
  std::vector<std::uint64_t> pos(view.offsets.begin(), view.offsets.end() - 1);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto [u, v] = edges[e];
    const std::uint32_t w = edge_weight[e];
    view.neighbors[pos[u]] = v;
    view.weights[pos[u]++] = w;
    view.neighbors[pos[v]] = u;
    view.weights[pos[v]++] = w;
  }

  view.degree.assign(n, 0);
  for (std::uint32_t u = 0; u < n; ++u) {
    std::uint64_t d = 0;
    for (const std::uint32_t w : view.weights_of(u)) {
      d += w;
      if (w != 1) view.unit_weights = false;
    }
    view.degree[u] = d;
    view.total_edge_weight += d;
  }
  view.total_edge_weight /= 2;
  return view;
}

}  // namespace kgaudit
