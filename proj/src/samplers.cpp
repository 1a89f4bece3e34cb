#include "kgaudit/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "kgaudit/diagnostics.hpp"
#include "kgaudit/errors.hpp"
#include "kgaudit/ranking.hpp"
#include "kgaudit/rng.hpp"

namespace kgaudit {

namespace {

// Capped 2-hop expansion around one seed. Seeds expand independently: the
// per-seed visited set, not the global union, defines the frontier, and at
// each hop at most `cap` new entities are admitted, sampled uniformly without
// replacement. `allowed` (optional bitmap) restricts which entities may enter.
void expand_seed(const UndirectedView& view, EntityId seed, std::uint32_t cap,
                 const std::vector<bool>* allowed, Rng& rng,
                 std::vector<bool>& admitted, std::vector<bool>& visited,
                 std::vector<EntityId>& touched) {
  touched.clear();
  auto visit = [&](EntityId v) {
    visited[v] = true;
    admitted[v] = true;
    touched.push_back(v);
  };
  visit(seed);
  std::vector<EntityId> current{seed};
  for (int hop = 0; hop < 2 && !current.empty(); ++hop) {
    std::vector<EntityId> frontier;
    for (const EntityId u : current) {
      for (const EntityId v : view.neighbors_of(u)) {
        if (visited[v]) continue;
        if (allowed && !(*allowed)[v]) continue;
        frontier.push_back(v);
      }
    }
    std::sort(frontier.begin(), frontier.end());
    frontier.erase(std::unique(frontier.begin(), frontier.end()), frontier.end());
    std::vector<EntityId> picked;
    if (frontier.size() <= cap) {
      picked = std::move(frontier);
    } else {
      const auto idx =
          rng.sample_indices(static_cast<std::uint32_t>(frontier.size()), cap);
      picked.reserve(cap);
      for (const auto i : idx) picked.push_back(frontier[i]);
      std::sort(picked.begin(), picked.end());
    }
    for (const EntityId v : picked) visit(v);
    current = std::move(picked);
  }
  for (const EntityId v : touched) visited[v] = false;  // reset scratch
}

std::vector<Triple> induced_triples(const KnowledgeGraph& graph,
                                    const std::vector<bool>& members,
                                    const std::vector<bool>* triple_allowed) {
  std::vector<Triple> out;
  for (std::size_t i = 0; i < graph.triples.size(); ++i) {
    if (triple_allowed && !(*triple_allowed)[i]) continue;
    const Triple& t = graph.triples[i];
    if (members[t.head] && members[t.tail]) out.push_back(t);
  }
  return out;
}

std::vector<bool> endpoint_bitmap(const KnowledgeGraph& graph,
                                  const std::vector<Triple>& triples) {
  std::vector<bool> out(graph.num_entities(), false);
  for (const Triple& t : triples) {
    out[t.head] = true;
    out[t.tail] = true;
  }
  return out;
}

std::unordered_set<RelationId> relation_set(const std::vector<Triple>& triples) {
  std::unordered_set<RelationId> out;
  for (const Triple& t : triples) out.insert(t.relation);
  return out;
}

}  // namespace

DatasetBundle grail_sample(const KnowledgeGraph& graph, const GrailConfig& cfg) {
  const std::uint32_t n = graph.num_entities();
  if (cfg.train_seed_entities == 0 || cfg.inf_seed_entities == 0) {
    throw ValidationError("seed entity counts must be >= 1");
  }

  const UndirectedView view = undirected_view(graph, EdgeWeighting::kUnit);
  Rng train_rng = substream(cfg.rng_seed, "grail/train");

  // Train: union of capped 2-hop neighborhoods around random seeds.
  std::vector<bool> train_admitted(n, false);
  std::vector<bool> visited(n, false);
  std::vector<EntityId> scratch;
  const auto train_seeds =
      train_rng.sample_indices(n, std::min(cfg.train_seed_entities, n));
  for (const EntityId seed : train_seeds) {
    expand_seed(view, seed, cfg.max_train_hop_cap, nullptr, train_rng,
                train_admitted, visited, scratch);
  }
  const std::vector<Triple> train_triples =
      induced_triples(graph, train_admitted, nullptr);
  if (train_triples.empty()) {
    throw SamplingFailedError("train neighborhood expansion produced no triples");
  }

  // Inference: identical expansion over the remainder (train edges removed);
  // entities of the train graph are excluded to keep the vocabularies disjoint.
  const std::vector<bool> train_vocab = endpoint_bitmap(graph, train_triples);
  std::unordered_set<Triple, TripleHash> train_set(train_triples.begin(),
                                                   train_triples.end());
  std::vector<bool> remainder(graph.triples.size(), false);
  for (std::size_t i = 0; i < graph.triples.size(); ++i) {
    const Triple& t = graph.triples[i];
    remainder[i] = !train_set.count(t) && !train_vocab[t.head] && !train_vocab[t.tail];
  }
  std::unordered_set<Triple, TripleHash> remainder_set;
  for (std::size_t i = 0; i < graph.triples.size(); ++i) {
    if (remainder[i]) remainder_set.insert(graph.triples[i]);
  }
  const UndirectedView rem_view = undirected_view(
      graph, EdgeWeighting::kUnit,
      [&](const Triple& t) { return remainder_set.count(t) > 0; });

  std::vector<EntityId> rem_entities;
  for (std::uint32_t v = 0; v < n; ++v) {
    if (rem_view.degree[v] > 0) rem_entities.push_back(v);
  }
  if (rem_entities.empty()) {
    throw SamplingFailedError("no entities left for the inference graph");
  }

  Rng inf_rng = substream(cfg.rng_seed, "grail/inference");
  std::vector<bool> inf_admitted(n, false);
  std::vector<bool> allowed(n, false);
  for (const EntityId v : rem_entities) allowed[v] = true;
  const auto seed_idx = inf_rng.sample_indices(
      static_cast<std::uint32_t>(rem_entities.size()),
      std::min<std::uint32_t>(cfg.inf_seed_entities,
                              static_cast<std::uint32_t>(rem_entities.size())));
  for (const auto i : seed_idx) {
    expand_seed(rem_view, rem_entities[i], cfg.max_inf_hop_cap, &allowed, inf_rng,
                inf_admitted, visited, scratch);
  }
  std::vector<Triple> inf_triples = induced_triples(graph, inf_admitted, &remainder);

  // Task E: relations unseen in train are dropped from inference.
  const auto train_rels = relation_set(train_triples);
  std::erase_if(inf_triples,
                [&](const Triple& t) { return !train_rels.count(t.relation); });
  if (inf_triples.empty()) {
    throw SamplingFailedError("inference neighborhood expansion produced no triples");
  }

  DatasetBundle bundle;
  bundle.task = Task::kE;
  bundle.train = subgraph_from_parent(graph, train_triples);
  InferenceSplit split;
  split.graph = subgraph_from_parent(graph, inf_triples);
  bundle.inference.push_back(std::move(split));
  GeneratorInfo gen;
  gen.procedure = "grail";
  gen.seed = cfg.rng_seed;
  gen.parameters = {{"train_seeds", cfg.train_seed_entities},
                    {"inf_seeds", cfg.inf_seed_entities},
                    {"cap_train", cfg.max_train_hop_cap},
                    {"cap_inf", cfg.max_inf_hop_cap}};
  bundle.generator = gen;
  return bundle;
}

DatasetBundle ilpc_sample(const KnowledgeGraph& graph, const IlpcConfig& cfg) {
  if (!(cfg.train_node_fraction > 0.0 && cfg.train_node_fraction < 1.0)) {
    throw ValidationError("train node fraction must lie in (0, 1)");
  }
  const std::uint32_t n = graph.num_entities();
  const auto train_count = static_cast<std::uint32_t>(
      std::lround(cfg.train_node_fraction * static_cast<double>(n)));
  if (train_count == 0 || train_count >= n) {
    throw SamplingFailedError("node split leaves one side empty");
  }

  Rng rng = substream(cfg.rng_seed, "ilpc");
  std::vector<bool> in_train(n, false);
  for (const EntityId v : rng.sample_indices(n, train_count)) in_train[v] = true;

  std::vector<Triple> train_triples, inf_triples;
  for (const Triple& t : graph.triples) {
    if (in_train[t.head] && in_train[t.tail]) {
      train_triples.push_back(t);
    } else if (!in_train[t.head] && !in_train[t.tail]) {
      inf_triples.push_back(t);
    }
    // cross-partition triples are discarded
  }
  const auto train_rels = relation_set(train_triples);
  std::erase_if(inf_triples,
                [&](const Triple& t) { return !train_rels.count(t.relation); });
  if (train_triples.empty() || inf_triples.empty()) {
    throw SamplingFailedError("induced node split produced an empty graph");
  }

  DatasetBundle bundle;
  bundle.task = Task::kE;
  bundle.train = subgraph_from_parent(graph, train_triples);
  InferenceSplit split;
  split.graph = subgraph_from_parent(graph, inf_triples);
  bundle.inference.push_back(std::move(split));
  GeneratorInfo gen;
  gen.procedure = "ilpc";
  gen.seed = cfg.rng_seed;
  gen.parameters = {{"train_node_fraction", cfg.train_node_fraction}};
  bundle.generator = gen;
  return bundle;
}

Holdout degree_preserving_holdout(const KnowledgeGraph& graph, double fraction,
                                  std::uint64_t rng_seed) {
  const auto m = graph.triples.size();
  const auto target =
      static_cast<std::uint64_t>(std::lround(fraction * static_cast<double>(m)));

  std::vector<std::uint32_t> incident(graph.num_entities(), 0);
  for (const Triple& t : graph.triples) {
    ++incident[t.head];
    if (t.tail != t.head) ++incident[t.tail];
  }

  std::vector<std::uint32_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(rng_seed);
  rng.shuffle(order);

  std::vector<bool> held(m, false);
  std::uint64_t held_count = 0;
  for (const std::uint32_t i : order) {
    if (held_count == target) break;
    const Triple& t = graph.triples[i];
    const bool ok = t.head == t.tail ? incident[t.head] >= 2
                                     : incident[t.head] >= 2 && incident[t.tail] >= 2;
    if (!ok) continue;
    held[i] = true;
    ++held_count;
    --incident[t.head];
    if (t.tail != t.head) --incident[t.tail];
  }

  Holdout out;
  out.shortfall = target - held_count;
  out.kept.reserve(m - held_count);
  out.held.reserve(held_count);
  for (std::size_t i = 0; i < m; ++i) {
    (held[i] ? out.held : out.kept).push_back(graph.triples[i]);
  }
  return out;
}

namespace {

// Re-interns the held-out triples over the post-holdout graph. Entities are
// guaranteed present (degree preservation); relations seen only in the
// holdout become imported vocabulary entries.
std::vector<Triple> remap_split(const KnowledgeGraph& parent,
                                const std::vector<Triple>& held,
                                KnowledgeGraph& rebuilt) {
  std::vector<Triple> out;
  out.reserve(held.size());
  for (const Triple& t : held) {
    const auto h = rebuilt.entities.find(parent.entities.label(t.head));
    const auto tl = rebuilt.entities.find(parent.entities.label(t.tail));
    const auto r = rebuilt.relations.intern(parent.relations.label(t.relation));
    out.push_back({*h, r, *tl});
  }
  return out;
}

}  // namespace

DatasetBundle make_splits(const KnowledgeGraph& train,
                          const std::vector<KnowledgeGraph>& inference,
                          const PartitionConfig& cfg) {
  if (train.triples.empty()) throw SplitFailedError("train graph is empty");
  for (const auto& g : inference) {
    if (g.triples.empty()) throw SplitFailedError("inference graph is empty");
  }

  DatasetBundle bundle;
  bundle.task = cfg.task;

  const Holdout train_holdout = degree_preserving_holdout(
      train, cfg.valid_fraction, substream_seed(cfg.rng_seed, "split/valid"));
  if (train_holdout.kept.empty()) {
    throw SplitFailedError("validation holdout exhausted the train graph");
  }
  bundle.train = subgraph_from_parent(train, train_holdout.kept);
  bundle.valid = remap_split(train, train_holdout.held, bundle.train);
  if (train_holdout.shortfall > 0) {
    bundle.warnings.push_back("holdout_shortfall train: " +
                              std::to_string(train_holdout.shortfall) +
                              " validation triples short of target");
  }

  for (std::size_t i = 0; i < inference.size(); ++i) {
    const Holdout h = degree_preserving_holdout(
        inference[i], cfg.test_fraction,
        substream_seed(cfg.rng_seed, "split/test", i));
    if (h.kept.empty()) {
      throw SplitFailedError("test holdout exhausted inference graph " +
                             std::to_string(i + 1));
    }
    InferenceSplit split;
    split.graph = subgraph_from_parent(inference[i], h.kept);
    split.test = remap_split(inference[i], h.held, split.graph);
    bundle.inference.push_back(std::move(split));
    if (h.shortfall > 0) {
      bundle.warnings.push_back("holdout_shortfall inference_" +
                                std::to_string(i + 1) + ": " +
                                std::to_string(h.shortfall) +
                                " test triples short of target");
    }
  }
  return bundle;
}

namespace {

constexpr std::uint64_t kMaxProbeTriples = 2000;

struct Estimate {
  double delta_spd = 0.0;
  double ppr_hits10 = 0.0;
  bool ok = false;
  std::string reason;
};

// Estimates (delta SPD, PPR Hits@10) of a graph by temporarily holding out a
// test fraction of its edges. Probe queries are capped to keep the estimator
// tractable on million-edge parents.
Estimate estimate_graph(const KnowledgeGraph& graph, const PartitionConfig& cfg,
                        std::uint64_t rng_seed) {
  Estimate est;
  Holdout h = degree_preserving_holdout(graph, cfg.test_fraction, rng_seed);
  if (h.held.empty() || h.kept.empty()) {
    est.reason = "degenerate";
    return est;
  }
  if (h.held.size() > kMaxProbeTriples) h.held.resize(kMaxProbeTriples);

  DatasetBundle probe;
  probe.task = Task::kEr;  // no relation trimming while estimating
  probe.train = subgraph_from_parent(graph, h.kept);
  InferenceSplit split;
  split.graph = probe.train;
  split.test = remap_split(graph, h.held, split.graph);
  probe.inference.push_back(std::move(split));

  try {
    const SpdReport spd = spd_report(probe, {});
    const RankingReport rr = evaluate_dataset(probe, Heuristic::kPpr);
    est.delta_spd = spd.delta_spd;
    est.ppr_hits10 = rr.aggregate.hits10;
    est.ok = true;
  } catch (const Error& e) {
    est.reason = "degenerate";
  }
  return est;
}

}  // namespace

PartitionSelection select_partitions(const KnowledgeGraph& graph,
                                     const PartitionAssignment& assignment,
                                     const PartitionConfig& cfg) {
  if (cfg.k < 2) throw ValidationError("partition selection needs k >= 2");

  PartitionSelection sel;
  const std::uint32_t comms = assignment.community_count;

  // Induce one candidate triple set per community; count boundary triples.
  std::vector<std::vector<Triple>> induced(comms);
  for (const Triple& t : graph.triples) {
    const auto ch = assignment.community_of[t.head];
    const auto ct = assignment.community_of[t.tail];
    if (ch == ct) {
      induced[ch].push_back(t);
    } else {
      ++sel.report.cross_partition_triples;
    }
  }

  // Reduce each candidate to its largest connected component (by triples).
  struct Candidate {
    std::uint32_t community;
    std::vector<Triple> triples;
    std::uint64_t total = 0;
    std::uint64_t entities = 0;
  };
  std::vector<Candidate> candidates;
  for (std::uint32_t c = 0; c < comms; ++c) {
    if (induced[c].empty()) continue;
    Candidate cand;
    cand.community = c;
    cand.total = induced[c].size();

    std::unordered_map<EntityId, EntityId> root;  // union-find over endpoints
    std::function<EntityId(EntityId)> find = [&](EntityId x) {
      while (root[x] != x) {
        root[x] = root[root[x]];
        x = root[x];
      }
      return x;
    };
    for (const Triple& t : induced[c]) {
      if (!root.count(t.head)) root[t.head] = t.head;
      if (!root.count(t.tail)) root[t.tail] = t.tail;
      const EntityId a = find(t.head), b = find(t.tail);
      if (a != b) root[std::max(a, b)] = std::min(a, b);
    }
    std::unordered_map<EntityId, std::uint64_t> comp_triples, comp_entities;
    for (auto& [v, _] : root) ++comp_entities[find(v)];
    for (const Triple& t : induced[c]) ++comp_triples[find(t.head)];
    EntityId best_root = 0;
    std::uint64_t best_triples = 0;
    for (const auto& [r, cnt] : comp_triples) {
      if (cnt > best_triples ||
          (cnt == best_triples && (best_triples == 0 || r < best_root))) {
        best_root = r;
        best_triples = cnt;
      }
    }
    for (const Triple& t : induced[c]) {
      if (find(t.head) == best_root) cand.triples.push_back(t);
    }
    cand.entities = comp_entities[best_root];
    candidates.push_back(std::move(cand));
  }

  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) {
              if (a.triples.size() != b.triples.size()) {
                return a.triples.size() > b.triples.size();
              }
              return a.community < b.community;
            });

  sel.report.candidates.reserve(candidates.size());
  std::vector<std::size_t> eligible;  // indices into `candidates`
  std::size_t train_idx = candidates.size();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    CandidateInfo info;
    info.community = candidates[i].community;
    info.triples_total = candidates[i].total;
    info.triples = candidates[i].triples.size();
    info.entities = candidates[i].entities;
    info.lcc_dropped_fraction =
        1.0 -
        static_cast<double>(info.triples) / static_cast<double>(info.triples_total);
    if (info.triples < cfg.min_edges) {
      info.disqualify_reason = "min_edges";
    } else if (train_idx == candidates.size()) {
      train_idx = i;  // largest qualifying candidate becomes train
      info.qualified = true;
      info.role = "train";
    } else {
      info.qualified = true;
    }
    sel.report.candidates.push_back(std::move(info));
  }
  if (train_idx == candidates.size()) {
    std::string sizes;
    for (const auto& c : candidates) {
      sizes += (sizes.empty() ? "" : ", ") + std::to_string(c.triples.size());
    }
    throw InsufficientPartitionsError(
        "no candidate partition reaches min_edges; candidate sizes: [" + sizes + "]");
  }

  // Task E: trim relations unseen in train; candidates losing more than the
  // threshold fraction are disqualified.
  const auto train_rels = relation_set(candidates[train_idx].triples);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    CandidateInfo& info = sel.report.candidates[i];
    if (!info.qualified || i == train_idx) continue;
    std::uint64_t unseen = 0;
    for (const Triple& t : candidates[i].triples) {
      if (!train_rels.count(t.relation)) ++unseen;
    }
    info.new_relation_fraction =
        static_cast<double>(unseen) / static_cast<double>(candidates[i].triples.size());
    if (cfg.task == Task::kE) {
      if (info.new_relation_fraction > cfg.new_rel_threshold) {
        info.qualified = false;
        info.disqualify_reason = "new_relation_threshold";
        continue;
      }
      std::erase_if(candidates[i].triples, [&](const Triple& t) {
        return !train_rels.count(t.relation);
      });
      info.triples = candidates[i].triples.size();
      if (info.triples == 0) {
        info.qualified = false;
        info.disqualify_reason = "min_edges";
        continue;
      }
    }
    eligible.push_back(i);
  }

  // Fail fast before the estimators run: the threshold pass alone may already
  // leave fewer than k candidates.
  if (eligible.size() < cfg.k - 1) {
    std::string sizes;
    for (const auto& c : candidates) {
      sizes += (sizes.empty() ? "" : ", ") + std::to_string(c.triples.size());
    }
    throw InsufficientPartitionsError(
        std::to_string(eligible.size() + 1) + " qualifying partitions, need " +
        std::to_string(cfg.k) + "; candidate sizes: [" + sizes + "]");
  }

  // Similarity scores: |delta-SPD - parent's| primary, PPR deviation tiebreak.
  const Estimate parent_est = estimate_graph(
      graph, cfg, substream_seed(cfg.rng_seed, "select/parent"));
  if (!parent_est.ok) {
    throw DegenerateReportError("parent graph delta-SPD estimate is degenerate");
  }
  sel.report.parent_delta_spd = parent_est.delta_spd;
  sel.report.parent_ppr_hits10 = parent_est.ppr_hits10;

  for (auto it = eligible.begin(); it != eligible.end();) {
    const std::size_t i = *it;
    CandidateInfo& info = sel.report.candidates[i];
    const KnowledgeGraph cand_graph =
        subgraph_from_parent(graph, candidates[i].triples);
    const Estimate est = estimate_graph(
        cand_graph, cfg,
        substream_seed(cfg.rng_seed, "select/candidate", info.community));
    if (!est.ok) {
      info.qualified = false;
      info.disqualify_reason = est.reason;
      it = eligible.erase(it);
      continue;
    }
    info.delta_spd_estimate = est.delta_spd;
    info.delta_spd_deviation = std::abs(est.delta_spd - parent_est.delta_spd);
    info.ppr_hits10_estimate = est.ppr_hits10;
    info.ppr_hits10_deviation = std::abs(est.ppr_hits10 - parent_est.ppr_hits10);
    ++it;
  }

  // Score the train candidate too, for the report.
  {
    CandidateInfo& info = sel.report.candidates[train_idx];
    const Estimate est = estimate_graph(
        subgraph_from_parent(graph, candidates[train_idx].triples), cfg,
        substream_seed(cfg.rng_seed, "select/candidate", info.community));
    if (est.ok) {
      info.delta_spd_estimate = est.delta_spd;
      info.delta_spd_deviation = std::abs(est.delta_spd - parent_est.delta_spd);
      info.ppr_hits10_estimate = est.ppr_hits10;
      info.ppr_hits10_deviation = std::abs(est.ppr_hits10 - parent_est.ppr_hits10);
    }
  }

  if (eligible.size() < cfg.k - 1) {
    std::string sizes;
    for (const auto& c : candidates) {
      sizes += (sizes.empty() ? "" : ", ") + std::to_string(c.triples.size());
    }
    throw InsufficientPartitionsError(
        std::to_string(eligible.size() + 1) + " qualifying partitions, need " +
        std::to_string(cfg.k) + "; candidate sizes: [" + sizes + "]");
  }

  std::sort(eligible.begin(), eligible.end(), [&](std::size_t a, std::size_t b) {
    const CandidateInfo& ia = sel.report.candidates[a];
    const CandidateInfo& ib = sel.report.candidates[b];
    if (ia.delta_spd_deviation != ib.delta_spd_deviation) {
      return ia.delta_spd_deviation < ib.delta_spd_deviation;
    }
    if (ia.ppr_hits10_deviation != ib.ppr_hits10_deviation) {
      return ia.ppr_hits10_deviation < ib.ppr_hits10_deviation;
    }
    return ia.community < ib.community;
  });

  sel.train = subgraph_from_parent(graph, candidates[train_idx].triples);
  for (std::uint32_t j = 0; j + 1 < cfg.k; ++j) {
    const std::size_t i = eligible[j];
    sel.report.candidates[i].role = "inference_" + std::to_string(j + 1);
    sel.inference.push_back(subgraph_from_parent(graph, candidates[i].triples));
  }
  return sel;
}

}  // namespace kgaudit
