#include "kgaudit/grid.hpp"

#include <cmath>
#include <cstdio>

#include "kgaudit/diagnostics.hpp"
#include "kgaudit/errors.hpp"
#include "kgaudit/parallel.hpp"
#include "kgaudit/ranking.hpp"
#include "kgaudit/rng.hpp"

namespace kgaudit {

std::vector<GrailConfig> GridSpec::configurations() const {
  std::vector<GrailConfig> out;
  for (const auto v : train_seed_axis) {
    GrailConfig c = base;
    c.train_seed_entities = v;
    out.push_back(c);
  }
  for (const auto v : inf_seed_axis) {
    GrailConfig c = base;
    c.inf_seed_entities = v;
    out.push_back(c);
  }
  for (const auto v : cap_train_axis) {
    GrailConfig c = base;
    c.max_train_hop_cap = v;
    out.push_back(c);
  }
  for (const auto v : cap_inf_axis) {
    GrailConfig c = base;
    c.max_inf_hop_cap = v;
    out.push_back(c);
  }
  return out;
}

GridSpec parse_grid_spec(const nlohmann::json& spec) {
  GridSpec out;
  if (spec.contains("base")) {
    const auto& b = spec["base"];
    out.base.train_seed_entities = b.value("train_seeds", out.base.train_seed_entities);
    out.base.inf_seed_entities = b.value("inf_seeds", out.base.inf_seed_entities);
    out.base.max_train_hop_cap = b.value("cap_train", out.base.max_train_hop_cap);
    out.base.max_inf_hop_cap = b.value("cap_inf", out.base.max_inf_hop_cap);
  }
  if (spec.contains("axes")) {
    const auto& a = spec["axes"];
    auto axis = [&](const char* key) {
      return a.contains(key) ? a[key].get<std::vector<std::uint32_t>>()
                             : std::vector<std::uint32_t>{};
    };
    out.train_seed_axis = axis("train_seeds");
    out.inf_seed_axis = axis("inf_seeds");
    out.cap_train_axis = axis("cap_train");
    out.cap_inf_axis = axis("cap_inf");
  }
  out.seeds_per_config = spec.value("seeds_per_config", out.seeds_per_config);
  for (const auto& axis : {out.train_seed_axis, out.inf_seed_axis,
                           out.cap_train_axis, out.cap_inf_axis}) {
    for (const auto v : axis) {
      if (v == 0) throw ValidationError("grid axis values must be positive");
    }
  }
  if (out.seeds_per_config == 0) {
    throw ValidationError("seeds_per_config must be >= 1");
  }
  return out;
}

namespace {

struct CellResult {
  bool ok = false;
  double train_edges = 0.0;
  double test_edges = 0.0;
  double delta_spd = 0.0;
  double ppr_hits10 = 0.0;
};

CellResult run_cell(const KnowledgeGraph& graph, GrailConfig cfg,
                    const PprConfig& ppr_cfg) {
  CellResult res;
  try {
    const DatasetBundle sampled = grail_sample(graph, cfg);
    PartitionConfig split_cfg;
    split_cfg.test_fraction = 0.10;
    split_cfg.valid_fraction = 0.0;
    split_cfg.task = Task::kE;
    split_cfg.rng_seed = substream_seed(cfg.rng_seed, "grid/holdout");
    std::vector<KnowledgeGraph> inference;
    inference.push_back(sampled.inference[0].graph);
    const DatasetBundle bundle = make_splits(sampled.train, inference, split_cfg);

    EvalOptions eval_opts;
    eval_opts.jobs = 1;  // parallelism lives at the cell level
    SpdOptions spd_opts;
    spd_opts.jobs = 1;
    const RankingReport rr =
        evaluate_dataset(bundle, Heuristic::kPpr, ppr_cfg, eval_opts);
    const SpdReport spd = spd_report(bundle, spd_opts);

    res.train_edges = static_cast<double>(sampled.train.num_triples());
    res.test_edges = static_cast<double>(bundle.inference[0].test.size());
    res.delta_spd = spd.delta_spd;
    res.ppr_hits10 = rr.aggregate.hits10;
    res.ok = true;
  } catch (const Error&) {
    res.ok = false;  // failed cells are recorded, the run continues
  }
  return res;
}

}  // namespace

GridReport run_grid(const KnowledgeGraph& graph, const GridSpec& spec,
                    const PprConfig& cfg, std::uint64_t base_seed, int jobs) {
  const auto configs = spec.configurations();
  const std::size_t cells = configs.size() * spec.seeds_per_config;
  std::vector<CellResult> results(cells);

  parallel_for(cells, jobs, [&](std::size_t cell) {
    const std::size_t ci = cell / spec.seeds_per_config;
    const std::size_t si = cell % spec.seeds_per_config;
    GrailConfig cell_cfg = configs[ci];
    cell_cfg.rng_seed = substream_seed(base_seed, "grid", (ci << 20) | si);
    results[cell] = run_cell(graph, cell_cfg, cfg);
  });

  GridReport report;
  for (std::size_t ci = 0; ci < configs.size(); ++ci) {
    GridRow row;
    row.config = configs[ci];
    for (std::uint32_t si = 0; si < spec.seeds_per_config; ++si) {
      const CellResult& r = results[ci * spec.seeds_per_config + si];
      if (!r.ok) {
        ++row.failures;
        continue;
      }
      ++row.successes;
      row.train_edges += r.train_edges;
      row.test_edges += r.test_edges;
      row.delta_spd += r.delta_spd;
      row.ppr_hits10 += r.ppr_hits10;
    }
    if (row.successes > 0) {
      row.train_edges /= row.successes;
      row.test_edges /= row.successes;
      row.delta_spd /= row.successes;
      row.ppr_hits10 /= row.successes;
    } else {
      row.train_edges = row.test_edges = row.delta_spd = row.ppr_hits10 =
          std::numeric_limits<double>::quiet_NaN();
    }
    report.rows.push_back(row);
  }
  return report;
}

std::string grid_csv(const GridReport& report) {
  std::string out =
      "train_ents,inf_ents,cap_train,cap_inf,train_edges,test_edges,"
      "delta_spd,ppr_hits10\n";
  char buf[256];
  for (const GridRow& row : report.rows) {
    std::snprintf(buf, sizeof(buf), "%u,%u,%u,%u,%.2f,%.2f,%.4f,%.4f\n",
                  row.config.train_seed_entities, row.config.inf_seed_entities,
                  row.config.max_train_hop_cap, row.config.max_inf_hop_cap,
                  row.train_edges, row.test_edges, row.delta_spd, row.ppr_hits10);
    out += buf;
  }
  return out;
}

}  // namespace kgaudit
