#include "kgaudit/ranking.hpp"

#include <algorithm>
#include <cctype>

#include "kgaudit/errors.hpp"
#include "kgaudit/parallel.hpp"

namespace kgaudit {

namespace {

std::uint64_t filter_key(EntityId known, RelationId relation, Direction dir) {
  return (static_cast<std::uint64_t>(known) << 32) |
         (static_cast<std::uint64_t>(relation) << 1) |
         static_cast<std::uint64_t>(dir);
}

}  // namespace

FilterIndex::FilterIndex(const KnowledgeGraph& graph, std::span<const Triple> test,
                         std::span<const Triple> extra) {
  map_.reserve((graph.triples.size() + test.size() + extra.size()) * 2);
  for (const Triple& t : graph.triples) add(t);
  for (const Triple& t : test) add(t);
  for (const Triple& t : extra) add(t);
  for (auto& [_, answers] : map_) {
    std::sort(answers.begin(), answers.end());
    answers.erase(std::unique(answers.begin(), answers.end()), answers.end());
  }
}

void FilterIndex::add(const Triple& t) {
  map_[filter_key(t.head, t.relation, Direction::kPredictTail)].push_back(t.tail);
  map_[filter_key(t.tail, t.relation, Direction::kPredictHead)].push_back(t.head);
}

std::span<const EntityId> FilterIndex::answers(EntityId known, RelationId relation,
                                               Direction direction) const {
  auto it = map_.find(filter_key(known, relation, direction));
  if (it == map_.end()) return {};
  return {it->second.data(), it->second.size()};
}

std::string heuristic_name(Heuristic h) {
  return h == Heuristic::kPpr ? "ppr" : "degree";
}

Heuristic parse_heuristic(const std::string& name) {
  std::string s;
  for (char c : name) s.push_back(static_cast<char>(std::tolower(c)));
  if (s == "ppr") return Heuristic::kPpr;
  if (s == "degree" || s == "tail_degree" || s == "tail-degree") {
    return Heuristic::kTailDegree;
  }
  throw ValidationError("unknown heuristic '" + name + "' (expected ppr|degree)");
}

double ScoreVector::value(EntityId e) const {
  auto it = std::lower_bound(
      entries.begin(), entries.end(), e,
      [](const std::pair<EntityId, double>& a, EntityId b) { return a.first < b; });
  if (it != entries.end() && it->first == e) return it->second;
  return 0.0;
}

namespace {

ScoreVector ppr_scores(const UndirectedView& view, EntityId source,
                       const PprConfig& cfg) {
  ScoreVector sv;
  sv.universe = view.n;
  sv.entries = approx_ppr(view, source, cfg).entries;
  return sv;
}

ScoreVector degree_scores(const UndirectedView& view) {
  ScoreVector sv;
  sv.universe = view.n;
  for (std::uint32_t v = 0; v < view.n; ++v) {
    if (view.degree[v] > 0) {
      sv.entries.emplace_back(v, static_cast<double>(view.degree[v]));
    }
  }
  return sv;
}

}  // namespace

ScoreVector score_candidates(const KnowledgeGraph& graph, const Query& query,
                             Heuristic heuristic, const PprConfig& cfg,
                             EdgeWeighting weighting) {
  const UndirectedView view = undirected_view(graph, weighting);
  if (heuristic == Heuristic::kPpr) return ppr_scores(view, query.known, cfg);
  return degree_scores(view);
}

RankOutcome rank_outcome(const ScoreVector& scores, EntityId answer,
                         std::span<const EntityId> filtered) {
  if (answer >= scores.universe) {
    throw InvalidQueryError("answer entity " + std::to_string(answer) +
                            " outside the universe of " +
                            std::to_string(scores.universe) + " entities");
  }
  const double target = scores.value(answer);
  std::uint64_t greater = 0, equal = 0;
  bool answer_has_entry = false;
  for (const auto& [v, s] : scores.entries) {
    if (v == answer) {
      answer_has_entry = true;
      continue;
    }
    if (s > target) {
      ++greater;
    } else if (s == target) {
      ++equal;
    }
  }
  const std::uint64_t zeros =
      scores.universe - scores.entries.size() - (answer_has_entry ? 0 : 1);
  if (target == 0.0) {
    equal += zeros;
  }
  // Remove filtered candidates from the counts (the answer stays in).
  for (const EntityId f : filtered) {
    if (f == answer || f >= scores.universe) continue;
    const double s = scores.value(f);
    if (s > target) {
      --greater;
    } else if (s == target) {
      --equal;
    }
  }
  return {greater, equal};
}

double rank_with_ties(const ScoreVector& scores, EntityId answer,
                      std::span<const EntityId> filtered) {
  return rank_outcome(scores, answer, filtered).rank();
}

namespace {

MetricBlock reduce_metrics(const std::vector<RankOutcome>& outcomes) {
  MetricBlock m;
  m.query_count = outcomes.size();
  if (outcomes.empty()) return m;
  double mrr = 0, h1 = 0, h3 = 0, h10 = 0;
  for (const RankOutcome& o : outcomes) {
    mrr += 1.0 / o.rank();
    h1 += o.hits_credit(1);
    h3 += o.hits_credit(3);
    h10 += o.hits_credit(10);
  }
  const auto n = static_cast<double>(outcomes.size());
  m.mrr = mrr / n;
  m.hits1 = h1 / n;
  m.hits3 = h3 / n;
  m.hits10 = h10 / n;
  return m;
}

}  // namespace

RankingReport evaluate_dataset(const DatasetBundle& bundle, Heuristic heuristic,
                               const PprConfig& cfg, const EvalOptions& opts) {
  RankingReport report;
  report.heuristic = heuristic_name(heuristic);
  report.alpha = cfg.alpha;
  report.epsilon = cfg.epsilon;

  for (const InferenceSplit& split : bundle.inference) {
    if (split.test.empty()) {
      report.per_graph.push_back({});
      continue;
    }
    const UndirectedView view = undirected_view(split.graph, opts.weighting);
    const std::span<const Triple> extra =
        bundle.task == Task::kTransductive
            ? std::span<const Triple>(bundle.valid)
            : std::span<const Triple>();
    const FilterIndex filter(split.graph, split.test, extra);

    std::vector<Query> queries;
    queries.reserve(split.test.size() * 2);
    for (const Triple& t : split.test) {
      queries.push_back({t.head, t.relation, Direction::kPredictTail, t.tail});
      queries.push_back({t.tail, t.relation, Direction::kPredictHead, t.head});
    }
    // Group queries sharing a source so each PPR vector is computed once.
    std::vector<std::uint32_t> order(queries.size());
    for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::uint32_t a, std::uint32_t b) {
                       return queries[a].known < queries[b].known;
                     });
    std::vector<std::pair<std::uint32_t, std::uint32_t>> groups;  // [begin, end)
    for (std::uint32_t i = 0; i < order.size();) {
      std::uint32_t j = i;
      while (j < order.size() &&
             queries[order[j]].known == queries[order[i]].known) {
        ++j;
      }
      groups.emplace_back(i, j);
      i = j;
    }

    ScoreVector shared;  // degree heuristic: identical for both directions
    if (heuristic == Heuristic::kTailDegree) shared = degree_scores(view);

    std::vector<RankOutcome> outcomes(queries.size());
    parallel_for(groups.size(), opts.jobs, [&](std::size_t gi) {
      const auto [begin, end] = groups[gi];
      const EntityId source = queries[order[begin]].known;
      ScoreVector local;
      if (heuristic == Heuristic::kPpr) local = ppr_scores(view, source, cfg);
      const ScoreVector& scores = heuristic == Heuristic::kPpr ? local : shared;
      for (std::uint32_t qi = begin; qi < end; ++qi) {
        const Query& q = queries[order[qi]];
        auto filtered = filter.answers(q.known, q.relation, q.direction);
        outcomes[order[qi]] = rank_outcome(scores, q.answer, filtered);
      }
    });

    report.per_graph.push_back(reduce_metrics(outcomes));
  }

  MetricBlock agg;
  std::uint32_t counted = 0;
  for (const MetricBlock& m : report.per_graph) {
    if (m.query_count == 0) continue;
    agg.mrr += m.mrr;
    agg.hits1 += m.hits1;
    agg.hits3 += m.hits3;
    agg.hits10 += m.hits10;
    agg.query_count += m.query_count;
    ++counted;
  }
  if (counted == 0) throw EmptyEvaluationError();
  agg.mrr /= counted;
  agg.hits1 /= counted;
  agg.hits3 /= counted;
  agg.hits10 /= counted;
  report.aggregate = agg;
  return report;
}

}  // namespace kgaudit
