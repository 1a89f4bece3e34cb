#include "kgaudit/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "kgaudit/errors.hpp"
#include "kgaudit/parallel.hpp"

namespace kgaudit {

std::vector<std::uint32_t> bfs_distances(const UndirectedView& view,
                                         EntityId source) {
  std::vector<std::uint32_t> dist(view.n, kUnreachable);
  dist[source] = 0;
  std::vector<EntityId> frontier{source}, next;
  std::uint32_t level = 0;
  while (!frontier.empty()) {
    ++level;
    next.clear();
    for (const EntityId u : frontier) {
      for (const EntityId v : view.neighbors_of(u)) {
        if (dist[v] == kUnreachable) {
          dist[v] = level;
          next.push_back(v);
        }
      }
    }
    frontier.swap(next);
  }
  return dist;
}

namespace {

struct QueryGroups {
  std::vector<Query> queries;
  std::vector<std::uint32_t> order;                          // queries sorted by source
  std::vector<std::pair<std::uint32_t, std::uint32_t>> groups;  // [begin, end) in order
};

QueryGroups group_queries(const InferenceSplit& split) {
  QueryGroups qg;
  qg.queries.reserve(split.test.size() * 2);
  for (const Triple& t : split.test) {
    qg.queries.push_back({t.head, t.relation, Direction::kPredictTail, t.tail});
    qg.queries.push_back({t.tail, t.relation, Direction::kPredictHead, t.head});
  }
  qg.order.resize(qg.queries.size());
  for (std::uint32_t i = 0; i < qg.order.size(); ++i) qg.order[i] = i;
  std::stable_sort(qg.order.begin(), qg.order.end(),
                   [&](std::uint32_t a, std::uint32_t b) {
                     return qg.queries[a].known < qg.queries[b].known;
                   });
  for (std::uint32_t i = 0; i < qg.order.size();) {
    std::uint32_t j = i;
    while (j < qg.order.size() &&
           qg.queries[qg.order[j]].known == qg.queries[qg.order[i]].known) {
      ++j;
    }
    qg.groups.emplace_back(i, j);
    i = j;
  }
  return qg;
}

struct SpdPartial {
  std::uint64_t pos_sum = 0, pos_cnt = 0, pos_unreach = 0, pos_total = 0;
  std::uint64_t neg_sum = 0, neg_cnt = 0, neg_unreach = 0, neg_total = 0;
  double macro_sum = 0.0;  // per-query negative means (macro mode)
  std::uint64_t macro_cnt = 0;
};

}  // namespace

SpdReport spd_report(const DatasetBundle& bundle, const SpdOptions& opts) {
  SpdReport report;
  std::uint32_t valid_graphs = 0;

  for (const InferenceSplit& split : bundle.inference) {
    SpdGraphBlock block;
    if (split.test.empty()) {
      report.per_graph.push_back(block);
      continue;
    }
    const UndirectedView view = undirected_view(split.graph, EdgeWeighting::kUnit);
    const std::span<const Triple> extra =
        bundle.task == Task::kTransductive
            ? std::span<const Triple>(bundle.valid)
            : std::span<const Triple>();
    const FilterIndex filter(split.graph, split.test, extra);
    const QueryGroups qg = group_queries(split);
    const std::uint32_t n = view.n;

    std::vector<SpdPartial> partials(qg.groups.size());
    parallel_for(qg.groups.size(), opts.jobs, [&](std::size_t gi) {
      const auto [begin, end] = qg.groups[gi];
      const EntityId source = qg.queries[qg.order[begin]].known;
      const auto dist = bfs_distances(view, source);

      // Totals over every candidate but the source itself; per-query negative
      // sets are recovered by subtracting the filtered entities and answer.
      std::uint64_t sum_fin = 0, cnt_fin = 0;
      for (std::uint32_t v = 0; v < n; ++v) {
        if (v == source || dist[v] == kUnreachable) continue;
        sum_fin += dist[v];
        ++cnt_fin;
      }
      const std::uint64_t unreach_all = static_cast<std::uint64_t>(n) - 1 - cnt_fin;

      SpdPartial& part = partials[gi];
      for (std::uint32_t qi = begin; qi < end; ++qi) {
        const Query& q = qg.queries[qg.order[qi]];
        const std::uint32_t d_ans = dist[q.answer];

        ++part.pos_total;
        if (d_ans != kUnreachable) {
          part.pos_sum += d_ans;
          ++part.pos_cnt;
        } else {
          ++part.pos_unreach;
          if (opts.cap) {
            part.pos_sum += *opts.cap;
            ++part.pos_cnt;
          }
        }

        std::uint64_t neg_sum = sum_fin, neg_cnt = cnt_fin, neg_unreach = unreach_all;
        auto remove_candidate = [&](EntityId v) {
          if (v == source) return;  // never counted
          if (dist[v] != kUnreachable) {
            neg_sum -= dist[v];
            --neg_cnt;
          } else {
            --neg_unreach;
          }
        };
        for (const EntityId f : filter.answers(q.known, q.relation, q.direction)) {
          if (f == q.answer) continue;  // handled below, exactly once
          remove_candidate(f);
        }
        remove_candidate(q.answer);

        part.neg_total += neg_cnt + neg_unreach;
        if (opts.cap) {
          neg_sum += neg_unreach * static_cast<std::uint64_t>(*opts.cap);
          neg_cnt += neg_unreach;
          part.neg_unreach += neg_unreach;
          neg_unreach = 0;
        } else {
          part.neg_unreach += neg_unreach;
        }
        part.neg_sum += neg_sum;
        part.neg_cnt += neg_cnt;
        if (opts.macro_per_query && neg_cnt > 0) {
          part.macro_sum += static_cast<double>(neg_sum) / static_cast<double>(neg_cnt);
          ++part.macro_cnt;
        }
      }
    });

    SpdPartial total;
    for (const SpdPartial& p : partials) {
      total.pos_sum += p.pos_sum;
      total.pos_cnt += p.pos_cnt;
      total.pos_unreach += p.pos_unreach;
      total.pos_total += p.pos_total;
      total.neg_sum += p.neg_sum;
      total.neg_cnt += p.neg_cnt;
      total.neg_unreach += p.neg_unreach;
      total.neg_total += p.neg_total;
      total.macro_sum += p.macro_sum;
      total.macro_cnt += p.macro_cnt;
    }

    block.positive_pairs = total.pos_cnt;
    block.negative_pairs = total.neg_cnt;
    if (total.pos_total > 0) {
      block.unreachable_positive_fraction =
          static_cast<double>(total.pos_unreach) / static_cast<double>(total.pos_total);
    }
    if (total.neg_total > 0) {
      block.unreachable_negative_fraction =
          static_cast<double>(total.neg_unreach) / static_cast<double>(total.neg_total);
    }
    if (total.pos_cnt > 0 && total.neg_cnt > 0) {
      block.mean_spd_positive =
          static_cast<double>(total.pos_sum) / static_cast<double>(total.pos_cnt);
      block.mean_spd_negative =
          opts.macro_per_query
              ? total.macro_sum / static_cast<double>(total.macro_cnt)
              : static_cast<double>(total.neg_sum) / static_cast<double>(total.neg_cnt);
      block.delta_spd = block.mean_spd_negative - block.mean_spd_positive;
      ++valid_graphs;
    }
    report.per_graph.push_back(block);
  }

  if (valid_graphs == 0) {
    throw DegenerateReportError(
        "no inference graph has a reachable positive pair to average");
  }
  for (const SpdGraphBlock& b : report.per_graph) {
    if (b.positive_pairs == 0 || b.negative_pairs == 0) continue;
    report.mean_spd_positive += b.mean_spd_positive;
    report.mean_spd_negative += b.mean_spd_negative;
    report.unreachable_positive_fraction += b.unreachable_positive_fraction;
    report.unreachable_negative_fraction += b.unreachable_negative_fraction;
  }
  report.mean_spd_positive /= valid_graphs;
  report.mean_spd_negative /= valid_graphs;
  report.unreachable_positive_fraction /= valid_graphs;
  report.unreachable_negative_fraction /= valid_graphs;
  report.delta_spd = report.mean_spd_negative - report.mean_spd_positive;
  return report;
}

std::vector<double> default_spd_bounds() { return {1.0, 2.0, 3.0, 4.0}; }

namespace {

int bucket_of(double d, std::span<const double> bounds,
              const std::optional<double>& top_limit) {
  if (d < bounds.front()) return -1;
  if (top_limit && d >= *top_limit) return -1;
  const auto it = std::upper_bound(bounds.begin(), bounds.end(), d);
  return static_cast<int>(it - bounds.begin()) - 1;
}

}  // namespace

BucketTable ppr_by_spd_bucket(const DatasetBundle& bundle, const PprConfig& cfg,
                              std::span<const double> bounds,
                              const SpdOptions& opts,
                              std::optional<double> top_limit) {
  if (bounds.empty() || !std::is_sorted(bounds.begin(), bounds.end())) {
    throw ValidationError("bucket boundaries must be a non-empty sorted list");
  }
  const std::size_t nb = bounds.size();
  std::vector<std::uint64_t> pos_cnt(nb, 0), neg_cnt(nb, 0);
  std::vector<double> pos_sum(nb, 0.0), neg_sum(nb, 0.0);

  for (const InferenceSplit& split : bundle.inference) {
    if (split.test.empty()) continue;
    const UndirectedView view = undirected_view(split.graph, opts.weighting);
    const std::span<const Triple> extra =
        bundle.task == Task::kTransductive
            ? std::span<const Triple>(bundle.valid)
            : std::span<const Triple>();
    const FilterIndex filter(split.graph, split.test, extra);
    const QueryGroups qg = group_queries(split);
    const std::uint32_t n = view.n;

    struct Partial {
      std::vector<std::uint64_t> pos_cnt, neg_cnt;
      std::vector<double> pos_sum, neg_sum;
    };
    std::vector<Partial> partials(qg.groups.size());

    parallel_for(qg.groups.size(), opts.jobs, [&](std::size_t gi) {
      const auto [begin, end] = qg.groups[gi];
      const EntityId source = qg.queries[qg.order[begin]].known;
      const auto dist = bfs_distances(view, source);
      const PprVector ppr = approx_ppr(view, source, cfg);

      auto bucket_of_entity = [&](EntityId v) -> int {
        const std::uint32_t d = dist[v];
        if (d == kUnreachable) {
          return top_limit ? -1 : static_cast<int>(nb) - 1;
        }
        return bucket_of(static_cast<double>(d), bounds, top_limit);
      };

      Partial& part = partials[gi];
      part.pos_cnt.assign(nb, 0);
      part.neg_cnt.assign(nb, 0);
      part.pos_sum.assign(nb, 0.0);
      part.neg_sum.assign(nb, 0.0);

      std::vector<std::uint64_t> cnt_all(nb, 0);
      std::vector<double> sum_all(nb, 0.0);
      for (std::uint32_t v = 0; v < n; ++v) {
        if (v == source) continue;
        const int b = bucket_of_entity(v);
        if (b < 0) continue;
        ++cnt_all[b];
      }
      for (const auto& [v, score] : ppr.entries) {
        if (v == source) continue;
        const int b = bucket_of_entity(v);
        if (b < 0) continue;
        sum_all[b] += score;
      }

      std::vector<std::uint64_t> q_cnt(nb);
      std::vector<double> q_sum(nb);
      for (std::uint32_t qi = begin; qi < end; ++qi) {
        const Query& q = qg.queries[qg.order[qi]];
        q_cnt = cnt_all;
        q_sum = sum_all;
        auto remove_candidate = [&](EntityId v) {
          if (v == source) return;
          const int b = bucket_of_entity(v);
          if (b < 0) return;
          --q_cnt[b];
          q_sum[b] -= ppr.value(v);
        };
        for (const EntityId f : filter.answers(q.known, q.relation, q.direction)) {
          if (f == q.answer) continue;
          remove_candidate(f);
        }
        remove_candidate(q.answer);

        if (q.answer != source) {
          const int b = bucket_of_entity(q.answer);
          if (b >= 0) {
            ++part.pos_cnt[b];
            part.pos_sum[b] += ppr.value(q.answer);
          }
        }
        for (std::size_t b = 0; b < nb; ++b) {
          part.neg_cnt[b] += q_cnt[b];
          part.neg_sum[b] += q_sum[b];
        }
      }
    });

    for (const auto& part : partials) {
      for (std::size_t b = 0; b < nb; ++b) {
        pos_cnt[b] += part.pos_cnt[b];
        neg_cnt[b] += part.neg_cnt[b];
        pos_sum[b] += part.pos_sum[b];
        neg_sum[b] += part.neg_sum[b];
      }
    }
  }

  BucketTable table;
  for (std::size_t b = 0; b < nb; ++b) {
    SpdBucket bucket;
    bucket.lo = bounds[b];
    bucket.hi = b + 1 < nb ? bounds[b + 1]
                           : (top_limit ? *top_limit
                                        : std::numeric_limits<double>::infinity());
    bucket.positive_pairs = pos_cnt[b];
    bucket.negative_pairs = neg_cnt[b];
    bucket.empty = pos_cnt[b] == 0 || neg_cnt[b] == 0;
    if (pos_cnt[b] > 0) {
      bucket.mean_positive_ppr = pos_sum[b] / static_cast<double>(pos_cnt[b]);
    }
    if (neg_cnt[b] > 0) {
      bucket.mean_negative_ppr = neg_sum[b] / static_cast<double>(neg_cnt[b]);
    }
    if (!bucket.empty && bucket.mean_negative_ppr > 0.0) {
      bucket.percent_increase =
          (bucket.mean_positive_ppr - bucket.mean_negative_ppr) /
          bucket.mean_negative_ppr * 100.0;
    }
    table.buckets.push_back(bucket);
  }
  return table;
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) {
    throw UndefinedCorrelationError("length mismatch");
  }
  if (xs.size() < 2) {
    throw UndefinedCorrelationError("need at least two points");
  }
  const auto n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw UndefinedCorrelationError("zero variance");
  }
  return sxy / std::sqrt(sxx * syy);
}

AuditReport audit_dataset(const DatasetBundle& bundle, const PprConfig& cfg,
                          const SpdOptions& opts, const DatasetBundle* parent) {
  AuditReport report;
  report.dataset_name = bundle.name;

  const EvalOptions eval_opts{opts.weighting, opts.jobs};
  const RankingReport rr = evaluate_dataset(bundle, Heuristic::kPpr, cfg, eval_opts);
  for (const MetricBlock& m : rr.per_graph) {
    report.ppr_hits10_per_graph.push_back(m.hits10);
  }
  report.ppr_hits10_mean = rr.aggregate.hits10;
  report.spd = spd_report(bundle, opts);
  report.new_relation_fraction = new_relation_fractions(bundle);

  if (parent) {
    const RankingReport pr =
        evaluate_dataset(*parent, Heuristic::kPpr, cfg, eval_opts);
    ParentComparison cmp;
    cmp.parent_ppr_hits10 = pr.aggregate.hits10;
    cmp.percent_increase =
        (report.ppr_hits10_mean - cmp.parent_ppr_hits10) / cmp.parent_ppr_hits10 * 100.0;
    report.parent = cmp;
  }
  return report;
}

}  // namespace kgaudit
