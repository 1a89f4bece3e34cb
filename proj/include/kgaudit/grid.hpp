#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "kgaudit/ppr.hpp"
#include "kgaudit/samplers.hpp"

namespace kgaudit {

// One-at-a-time axes around a base configuration (the base value may appear
// on an axis; duplicates are kept, one row per listed value).
struct GridSpec {
  GrailConfig base;
  std::vector<std::uint32_t> train_seed_axis;
  std::vector<std::uint32_t> inf_seed_axis;
  std::vector<std::uint32_t> cap_train_axis;
  std::vector<std::uint32_t> cap_inf_axis;
  std::uint32_t seeds_per_config = 3;

  std::vector<GrailConfig> configurations() const;
};

GridSpec parse_grid_spec(const nlohmann::json& spec);

struct GridRow {
  GrailConfig config;
  std::uint32_t successes = 0;
  std::uint32_t failures = 0;
  // Means over the successful seeds (NaN when every seed failed).
  double train_edges = 0.0;
  double test_edges = 0.0;
  double delta_spd = 0.0;
  double ppr_hits10 = 0.0;
};

struct GridReport {
  std::vector<GridRow> rows;
};

// For each configuration x seed: grail sampling, a 10% test holdout on the
// inference graph, then PPR Hits@10 and delta-SPD on the resulting bundle.
// Failed samples are counted and excluded from the row means.
GridReport run_grid(const KnowledgeGraph& graph, const GridSpec& spec,
                    const PprConfig& cfg, std::uint64_t base_seed, int jobs = 0);

// CSV columns: train_ents,inf_ents,cap_train,cap_inf,train_edges,test_edges,
// delta_spd,ppr_hits10 — byte-stable for identical inputs.
std::string grid_csv(const GridReport& report);

}  // namespace kgaudit
