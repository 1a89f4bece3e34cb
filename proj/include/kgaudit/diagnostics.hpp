#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kgaudit/graph.hpp"
#include "kgaudit/io.hpp"
#include "kgaudit/ppr.hpp"
#include "kgaudit/ranking.hpp"

namespace kgaudit {

inline constexpr std::uint32_t kUnreachable = 0xFFFFFFFFu;

// Unweighted hop distances from `source`; kUnreachable where no path exists.
std::vector<std::uint32_t> bfs_distances(const UndirectedView& view,
                                         EntityId source);

struct SpdGraphBlock {
  double mean_spd_positive = 0.0;
  double mean_spd_negative = 0.0;
  double delta_spd = 0.0;
  double unreachable_positive_fraction = 0.0;
  double unreachable_negative_fraction = 0.0;
  std::uint64_t positive_pairs = 0;  // finite pairs entering the means
  std::uint64_t negative_pairs = 0;
};

// Shortest-path-distance statistics over test queries. Positive pair =
// (known, answer); negatives = every unfiltered candidate except the answer
// and the known entity itself. Distances are taken on the inference graph the
// model observes (test triples are held out by construction).
struct SpdReport {
  double mean_spd_positive = 0.0;   // unweighted mean over inference graphs
  double mean_spd_negative = 0.0;
  double delta_spd = 0.0;           // mean_spd_negative - mean_spd_positive
  double unreachable_positive_fraction = 0.0;
  double unreachable_negative_fraction = 0.0;
  std::vector<SpdGraphBlock> per_graph;
};

struct SpdOptions {
  bool macro_per_query = false;        // negatives averaged per query first
  std::optional<std::uint32_t> cap;    // unreachable pairs enter means at cap
  EdgeWeighting weighting = EdgeWeighting::kUnit;  // PPR side of bucket tables
  int jobs = 0;
};

SpdReport spd_report(const DatasetBundle& bundle, const SpdOptions& opts = {});

struct SpdBucket {
  double lo = 0.0;
  double hi = 0.0;  // +inf for the unbounded top bucket
  std::uint64_t positive_pairs = 0;
  std::uint64_t negative_pairs = 0;
  double mean_positive_ppr = 0.0;
  double mean_negative_ppr = 0.0;
  double percent_increase = 0.0;  // (pos - neg) / neg * 100
  bool empty = true;              // no pairs on one side
};

struct BucketTable {
  std::vector<SpdBucket> buckets;
};

// Mean positive vs negative PPR broken down by SPD bucket. `bounds` lists the
// bucket lower boundaries (default {1,2,3,4} -> [1,2),[2,3),[3,4),[4,inf));
// the top bucket is unbounded and absorbs unreachable pairs unless
// `top_limit` closes it, in which case unreachable pairs are excluded.
BucketTable ppr_by_spd_bucket(const DatasetBundle& bundle, const PprConfig& cfg,
                              std::span<const double> bounds,
                              const SpdOptions& opts = {},
                              std::optional<double> top_limit = std::nullopt);

std::vector<double> default_spd_bounds();

// Product-moment correlation. Throws UndefinedCorrelationError on length
// mismatch, fewer than two points, or zero variance.
double pearson(std::span<const double> xs, std::span<const double> ys);

struct ParentComparison {
  double parent_ppr_hits10 = 0.0;
  double percent_increase = 0.0;  // (mean - parent) / parent * 100
};

struct AuditReport {
  std::string dataset_name;
  std::vector<double> ppr_hits10_per_graph;
  double ppr_hits10_mean = 0.0;
  SpdReport spd;
  std::vector<double> new_relation_fraction;  // per inference graph
  std::optional<ParentComparison> parent;
};

// Composes the PPR ranking evaluation, the SPD report and the new-relation
// fractions; compares against the parent dataset's PPR baseline when given.
AuditReport audit_dataset(const DatasetBundle& bundle, const PprConfig& cfg = {},
                          const SpdOptions& opts = {},
                          const DatasetBundle* parent = nullptr);

}  // namespace kgaudit
