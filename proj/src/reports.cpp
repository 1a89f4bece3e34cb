#include "kgaudit/reports.hpp"

#include <cmath>

namespace kgaudit {

namespace {

// JSON has no Inf/NaN; reports encode them as null.
nlohmann::json finite(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

nlohmann::json to_json(const MetricBlock& m) {
  return {{"mrr", m.mrr},
          {"hits1", m.hits1},
          {"hits3", m.hits3},
          {"hits10", m.hits10},
          {"query_count", m.query_count}};
}

nlohmann::json to_json(const RankingReport& r) {
  nlohmann::json per_graph = nlohmann::json::array();
  for (const auto& m : r.per_graph) per_graph.push_back(to_json(m));
  return {{"heuristic", r.heuristic},
          {"per_graph", per_graph},
          {"aggregate", to_json(r.aggregate)},
          {"config", {{"alpha", r.alpha}, {"epsilon", r.epsilon},
                      {"tie_policy", r.tie_policy}}}};
}

nlohmann::json to_json(const SpdGraphBlock& b) {
  return {{"mean_spd_positive", b.mean_spd_positive},
          {"mean_spd_negative", b.mean_spd_negative},
          {"delta_spd", b.delta_spd},
          {"unreachable_positive_fraction", b.unreachable_positive_fraction},
          {"unreachable_negative_fraction", b.unreachable_negative_fraction},
          {"positive_pairs", b.positive_pairs},
          {"negative_pairs", b.negative_pairs}};
}

nlohmann::json to_json(const SpdReport& r) {
  nlohmann::json per_graph = nlohmann::json::array();
  for (const auto& b : r.per_graph) per_graph.push_back(to_json(b));
  return {{"mean_spd_positive", r.mean_spd_positive},
          {"mean_spd_negative", r.mean_spd_negative},
          {"delta_spd", r.delta_spd},
          {"unreachable_positive_fraction", r.unreachable_positive_fraction},
          {"unreachable_negative_fraction", r.unreachable_negative_fraction},
          {"per_graph", per_graph}};
}

nlohmann::json to_json(const BucketTable& t) {
  nlohmann::json buckets = nlohmann::json::array();
  for (const auto& b : t.buckets) {
    buckets.push_back({{"lo", b.lo},
                       {"hi", finite(b.hi)},
                       {"positive_pairs", b.positive_pairs},
                       {"negative_pairs", b.negative_pairs},
                       {"mean_positive_ppr", b.mean_positive_ppr},
                       {"mean_negative_ppr", b.mean_negative_ppr},
                       {"percent_increase", b.percent_increase},
                       {"empty", b.empty}});
  }
  return {{"buckets", buckets}};
}

nlohmann::json to_json(const AuditReport& r) {
  nlohmann::json out{{"dataset", r.dataset_name},
                     {"ppr_hits10_per_graph", r.ppr_hits10_per_graph},
                     {"ppr_hits10_mean", r.ppr_hits10_mean},
                     {"spd", to_json(r.spd)},
                     {"new_relation_fraction", r.new_relation_fraction}};
  if (r.parent) {
    out["parent_comparison"] = {
        {"parent_ppr_hits10", r.parent->parent_ppr_hits10},
        {"percent_increase", r.parent->percent_increase}};
  }
  return out;
}

nlohmann::json to_json(const SelectionReport& r) {
  nlohmann::json candidates = nlohmann::json::array();
  for (const auto& c : r.candidates) {
    candidates.push_back({{"community", c.community},
                          {"triples_total", c.triples_total},
                          {"triples", c.triples},
                          {"entities", c.entities},
                          {"lcc_dropped_fraction", c.lcc_dropped_fraction},
                          {"new_relation_fraction", c.new_relation_fraction},
                          {"qualified", c.qualified},
                          {"disqualify_reason", c.disqualify_reason},
                          {"delta_spd_estimate", c.delta_spd_estimate},
                          {"delta_spd_deviation", c.delta_spd_deviation},
                          {"ppr_hits10_estimate", c.ppr_hits10_estimate},
                          {"ppr_hits10_deviation", c.ppr_hits10_deviation},
                          {"role", c.role}});
  }
  return {{"parent_delta_spd", r.parent_delta_spd},
          {"parent_ppr_hits10", r.parent_ppr_hits10},
          {"cross_partition_triples", r.cross_partition_triples},
          {"candidates", candidates}};
}

}  // namespace kgaudit
