#pragma once

// Shared fixtures and independent oracles for the test suites. The oracles
// here deliberately take different routes than the library (dense linear
// solves, Floyd-Warshall, node-pair modularity sums, sorted candidate lists)
// so they can catch implementation-path mistakes.

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "kgaudit/diagnostics.hpp"
#include "kgaudit/graph.hpp"
#include "kgaudit/io.hpp"
#include "kgaudit/rng.hpp"

namespace testutil {

using namespace kgaudit;

inline LabeledTriple lt(const std::string& h, const std::string& r,
                        const std::string& t) {
  return {h, r, t};
}

inline KnowledgeGraph graph_of(std::vector<LabeledTriple> triples) {
  return build_graph(triples);
}

// Random labeled triples over a bounded vocabulary (duplicates possible).
inline std::vector<LabeledTriple> random_triples(Rng& rng, int entities,
                                                 int relations, int count,
                                                 const std::string& prefix = "e") {
  std::vector<LabeledTriple> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    const auto h = prefix + std::to_string(rng.bounded(entities));
    const auto t = prefix + std::to_string(rng.bounded(entities));
    const auto r = "r" + std::to_string(rng.bounded(relations));
    out.push_back({h, r, t});
  }
  return out;
}

inline KnowledgeGraph random_graph(Rng& rng, int entities, int relations,
                                   int triples, const std::string& prefix = "e") {
  return build_graph(random_triples(rng, entities, relations, triples, prefix));
}

// Dense PPR oracle: direct linear solve of (I - (1-a) M^T) p = a e_s where
// M is the single-step walk matrix (dangling rows step back to the source).
inline std::vector<double> ppr_oracle(const UndirectedView& view, EntityId source,
                                      double alpha) {
  const int n = static_cast<int>(view.n);
  Eigen::MatrixXd walk = Eigen::MatrixXd::Zero(n, n);
  for (int u = 0; u < n; ++u) {
    if (view.degree[u] == 0) {
      walk(u, static_cast<int>(source)) = 1.0;
      continue;
    }
    const auto nbrs = view.neighbors_of(u);
    const auto wts = view.weights_of(u);
    for (std::size_t i = 0; i < nbrs.size(); ++i) {
      walk(u, static_cast<int>(nbrs[i])) =
          static_cast<double>(wts[i]) / static_cast<double>(view.degree[u]);
    }
  }
  Eigen::MatrixXd system =
      Eigen::MatrixXd::Identity(n, n) - (1.0 - alpha) * walk.transpose();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs(static_cast<int>(source)) = alpha;
  Eigen::VectorXd p = system.partialPivLu().solve(rhs);
  return {p.data(), p.data() + n};
}

// All-pairs hop distances by Floyd-Warshall (kUnreachable off-diagonal start).
inline std::vector<std::vector<std::uint32_t>> floyd_warshall(
    const UndirectedView& view) {
  const std::uint32_t n = view.n;
  const std::uint32_t inf = kUnreachable;
  std::vector<std::vector<std::uint32_t>> d(n, std::vector<std::uint32_t>(n, inf));
  for (std::uint32_t u = 0; u < n; ++u) {
    d[u][u] = 0;
    for (const auto v : view.neighbors_of(u)) d[u][v] = 1;
  }
  for (std::uint32_t k = 0; k < n; ++k) {
    for (std::uint32_t i = 0; i < n; ++i) {
      if (d[i][k] == inf) continue;
      for (std::uint32_t j = 0; j < n; ++j) {
        if (d[k][j] == inf) continue;
        d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
      }
    }
  }
  return d;
}

// Node-pair modularity sum: Q = (1/2W) * sum_{u,v in same community}
// (A_uv - gamma * d_u d_v / 2W); an independent route to the per-community
// formula used by the library.
inline double modularity_oracle(const UndirectedView& view,
                                const std::vector<std::uint32_t>& community,
                                double gamma) {
  const double two_w = 2.0 * static_cast<double>(view.total_edge_weight);
  std::vector<std::vector<double>> adj(view.n, std::vector<double>(view.n, 0.0));
  for (std::uint32_t u = 0; u < view.n; ++u) {
    const auto nbrs = view.neighbors_of(u);
    const auto wts = view.weights_of(u);
    for (std::size_t i = 0; i < nbrs.size(); ++i) {
      adj[u][nbrs[i]] = static_cast<double>(wts[i]);
    }
  }
  double q = 0.0;
  for (std::uint32_t u = 0; u < view.n; ++u) {
    for (std::uint32_t v = 0; v < view.n; ++v) {
      if (community[u] != community[v]) continue;
      q += adj[u][v] - gamma * static_cast<double>(view.degree[u]) *
                           static_cast<double>(view.degree[v]) / two_w;
    }
  }
  return q / two_w;
}

// Enumerates all set partitions of {0..n-1} as restricted growth strings.
template <typename Fn>
void for_each_partition(std::uint32_t n, Fn&& fn) {
  std::vector<std::uint32_t> rgs(n, 0);
  std::vector<std::uint32_t> maxima(n, 0);
  for (;;) {
    fn(rgs);
    std::int64_t i = static_cast<std::int64_t>(n) - 1;
    while (i > 0 && rgs[i] == maxima[i - 1] + 1) --i;
    if (i == 0) return;
    ++rgs[i];
    for (std::uint32_t j = i + 1; j < n; ++j) rgs[j] = 0;
    for (std::uint32_t j = i; j < n; ++j) {
      maxima[j] = std::max(maxima[j - 1], rgs[j]);
    }
  }
}

// Sorted-candidate-list ranking oracle: positions of the answer's tie block
// in the materialized, sorted candidate list.
struct NaiveRank {
  double rank = 0.0;
  double hits1 = 0.0;
  double hits3 = 0.0;
  double hits10 = 0.0;
};

inline NaiveRank naive_rank(const std::vector<double>& dense_scores,
                            EntityId answer, const std::set<EntityId>& filtered) {
  std::vector<std::pair<double, EntityId>> candidates;
  for (EntityId v = 0; v < dense_scores.size(); ++v) {
    if (v != answer && filtered.count(v)) continue;
    candidates.emplace_back(dense_scores[v], v);
  }
  std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  const double target = dense_scores[answer];
  std::size_t first = 0;
  while (candidates[first].first > target) ++first;
  std::size_t last = first;
  while (last + 1 < candidates.size() && candidates[last + 1].first == target) {
    ++last;
  }
  NaiveRank out;
  out.rank = (static_cast<double>(first + 1) + static_cast<double>(last + 1)) / 2.0;
  auto hits = [&](double k) {
    if (static_cast<double>(last + 1) <= k) return 1.0;
    if (static_cast<double>(first + 1) > k) return 0.0;
    return (k - static_cast<double>(first)) / static_cast<double>(last - first + 1);
  };
  out.hits1 = hits(1);
  out.hits3 = hits(3);
  out.hits10 = hits(10);
  return out;
}

// Random bundles that satisfy the strict invariants, for round-trip checks.
inline DatasetBundle random_bundle(Rng& rng) {
  DatasetBundle bundle;
  const int pick = static_cast<int>(rng.bounded(3));
  bundle.task = pick == 0 ? Task::kE : (pick == 1 ? Task::kEr : Task::kTransductive);
  bundle.name = "random";

  auto split_pool = [&](const std::string& prefix, int entities, int relations,
                        int count, KnowledgeGraph& graph,
                        std::vector<Triple>& held) {
    auto pool = random_triples(rng, entities, relations, count, prefix);
    std::sort(pool.begin(), pool.end());
    pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
    rng.shuffle(pool);
    const std::size_t graph_part = pool.size() - pool.size() / 5;
    std::vector<LabeledTriple> graph_triples(pool.begin(),
                                             pool.begin() + graph_part);
    graph = build_graph(graph_triples);
    for (std::size_t i = graph_part; i < pool.size(); ++i) {
      const auto h = graph.entities.find(pool[i].head);
      const auto t = graph.entities.find(pool[i].tail);
      if (!h || !t) continue;  // split entities must live in the graph
      held.push_back({*h, graph.relations.intern(pool[i].relation), *t});
    }
  };

  split_pool("t", 12, 4, 30 + static_cast<int>(rng.bounded(30)), bundle.train,
             bundle.valid);

  if (bundle.task == Task::kTransductive) {
    InferenceSplit split;
    split.graph = bundle.train;
    // Fresh combinations over the train vocabulary, disjoint from both the
    // graph triples and the validation split.
    std::set<Triple> used(bundle.train.triples.begin(), bundle.train.triples.end());
    for (const Triple& t : bundle.valid) used.insert(t);
    const std::uint32_t n = bundle.train.num_entities();
    const std::uint32_t r = bundle.train.num_relations();
    for (int attempts = 0; attempts < 60 && split.test.size() < 6; ++attempts) {
      const Triple t{static_cast<EntityId>(rng.bounded(n)),
                     static_cast<RelationId>(rng.bounded(r)),
                     static_cast<EntityId>(rng.bounded(n))};
      if (used.insert(t).second) split.test.push_back(t);
    }
    bundle.inference.push_back(std::move(split));
    return bundle;
  }

  const int graphs = 1 + static_cast<int>(rng.bounded(2));
  for (int gi = 0; gi < graphs; ++gi) {
    InferenceSplit split;
    std::vector<Triple> test;
    split_pool("g" + std::to_string(gi) + "_", 10, 4,
               25 + static_cast<int>(rng.bounded(20)), split.graph, test);
    if (bundle.task == Task::kE) {
      // Task E: rewrite relations into the train vocabulary.
      KnowledgeGraph rewritten;
      std::vector<LabeledTriple> relabeled;
      for (const Triple& t : split.graph.triples) {
        auto l = split.graph.labeled(t);
        l.relation = bundle.train.relations.label(
            t.relation % bundle.train.num_relations());
        relabeled.push_back(l);
      }
      std::sort(relabeled.begin(), relabeled.end());
      relabeled.erase(std::unique(relabeled.begin(), relabeled.end()),
                      relabeled.end());
      const KnowledgeGraph old = split.graph;
      split.graph = build_graph(relabeled);
      split.test.clear();
      for (const Triple& t : test) {
        const auto h = split.graph.entities.find(old.entities.label(t.head));
        const auto tl = split.graph.entities.find(old.entities.label(t.tail));
        if (!h || !tl) continue;
        const Triple mapped{
            *h,
            split.graph.relations.intern(bundle.train.relations.label(
                t.relation % bundle.train.num_relations())),
            *tl};
        if (std::find(split.graph.triples.begin(), split.graph.triples.end(),
                      mapped) == split.graph.triples.end() &&
            std::find(split.test.begin(), split.test.end(), mapped) ==
                split.test.end()) {
          split.test.push_back(mapped);
        }
      }
    } else {
      split.test = std::move(test);
    }
    bundle.inference.push_back(std::move(split));
  }
  return bundle;
}

}  // namespace testutil
