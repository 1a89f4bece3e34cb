// kgaudit: audit knowledge-graph completion datasets for the proximity
// shortcut (PPR / shortest-path diagnostics) and construct inductive splits
// (neighborhood, node-split and partition-based samplers).

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kgaudit/diagnostics.hpp"
#include "kgaudit/errors.hpp"
#include "kgaudit/grid.hpp"
#include "kgaudit/io.hpp"
#include "kgaudit/louvain.hpp"
#include "kgaudit/ranking.hpp"
#include "kgaudit/reports.hpp"
#include "kgaudit/rng.hpp"
#include "kgaudit/samplers.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw kgaudit::IoError("cannot write " + path);
  out << text;
  if (!out) throw kgaudit::IoError("write failed for " + path);
}

void emit_report(const json& report, const std::string& out_path) {
  const std::string text = report.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_text(out_path, text);
  }
}

std::vector<double> parse_bounds(const std::string& csv) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= csv.size()) {
    const std::size_t comma = csv.find(',', start);
    const std::string tok = csv.substr(start, comma - start);
    try {
      out.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw kgaudit::ValidationError("bad bucket boundary '" + tok + "'");
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

kgaudit::EdgeWeighting parse_weighting(const std::string& s) {
  if (s == "unit") return kgaudit::EdgeWeighting::kUnit;
  if (s == "mult" || s == "multiplicity") return kgaudit::EdgeWeighting::kMultiplicity;
  throw kgaudit::ValidationError("unknown edge weighting '" + s +
                                 "' (expected unit|mult)");
}

kgaudit::KnowledgeGraph load_graph_file(const std::string& path) {
  const auto triples = kgaudit::read_triple_file(path);
  return kgaudit::build_graph(triples);
}

// Computes per-graph delta-SPD for the stats sidecar of freshly sampled
// bundles; degenerate graphs simply stay absent from the map.
void fill_delta_spd(kgaudit::DatasetBundle& bundle, int jobs) {
  try {
    kgaudit::SpdOptions opts;
    opts.jobs = jobs;
    const auto spd = kgaudit::spd_report(bundle, opts);
    for (std::size_t i = 0; i < spd.per_graph.size(); ++i) {
      const auto& block = spd.per_graph[i];
      if (block.positive_pairs == 0) continue;
      bundle.delta_spd["inference_" + std::to_string(i + 1)] = block.delta_spd;
    }
  } catch (const kgaudit::DegenerateReportError&) {
  }
}

struct CommonOpts {
  std::string dataset;
  std::string out;
  std::string task;
  std::string weighting = "unit";
  bool permissive = false;
  double alpha = 0.15;
  double eps = 1e-7;
  int jobs = 0;
};

kgaudit::DatasetBundle load_bundle(const CommonOpts& o) {
  kgaudit::LoadOptions lo;
  if (!o.task.empty()) lo.task = kgaudit::parse_task(o.task);
  lo.permissive = o.permissive;
  auto bundle = kgaudit::load_dataset(o.dataset, lo);
  for (const auto& w : bundle.warnings) {
    std::cerr << "warning: " << bundle.name << ": " << w << "\n";
  }
  return bundle;
}

int run(int argc, char** argv) {
  CLI::App app{"knowledge-graph dataset auditing and construction toolkit"};
  app.require_subcommand(1);

  // ---- audit ----
  CommonOpts audit_opts;
  std::string audit_parent, audit_csv;
  int spd_cap = 0;
  auto* audit = app.add_subcommand("audit", "PPR + delta-SPD shortcut report");
  audit->add_option("--dataset", audit_opts.dataset)->required();
  audit->add_option("--parent", audit_parent);
  audit->add_option("--task", audit_opts.task);
  audit->add_option("--alpha", audit_opts.alpha);
  audit->add_option("--eps", audit_opts.eps);
  audit->add_option("--spd-cap", spd_cap);
  audit->add_option("--out", audit_opts.out);
  audit->add_option("--csv", audit_csv);
  audit->add_option("--jobs", audit_opts.jobs);
  audit->add_option("--edge-weights", audit_opts.weighting);
  audit->add_flag("--permissive", audit_opts.permissive);

  // ---- eval ----
  CommonOpts eval_opts;
  std::string eval_heuristic;
  auto* eval = app.add_subcommand("eval", "filtered-ranking MRR / Hits@K");
  eval->add_option("--dataset", eval_opts.dataset)->required();
  eval->add_option("--heuristic", eval_heuristic)->required();
  eval->add_option("--alpha", eval_opts.alpha);
  eval->add_option("--eps", eval_opts.eps);
  eval->add_option("--out", eval_opts.out);
  eval->add_option("--task", eval_opts.task);
  eval->add_option("--jobs", eval_opts.jobs);
  eval->add_option("--edge-weights", eval_opts.weighting);
  eval->add_flag("--permissive", eval_opts.permissive);

  // ---- spd ----
  CommonOpts spd_opts_cli;
  std::string spd_buckets;
  bool spd_macro = false;
  int spd_cap2 = 0;
  auto* spd = app.add_subcommand("spd", "shortest-path-distance diagnostics");
  spd->add_option("--dataset", spd_opts_cli.dataset)->required();
  spd->add_flag("--macro", spd_macro);
  spd->add_option("--buckets", spd_buckets);
  spd->add_option("--spd-cap", spd_cap2);
  spd->add_option("--out", spd_opts_cli.out);
  spd->add_option("--task", spd_opts_cli.task);
  spd->add_option("--alpha", spd_opts_cli.alpha);
  spd->add_option("--eps", spd_opts_cli.eps);
  spd->add_option("--jobs", spd_opts_cli.jobs);
  spd->add_option("--edge-weights", spd_opts_cli.weighting);
  spd->add_flag("--permissive", spd_opts_cli.permissive);

  // ---- sample-grail ----
  std::string sg_graph, sg_out;
  kgaudit::GrailConfig sg_cfg;
  std::uint64_t sg_seed = 0;
  int sg_jobs = 0;
  auto* sgrail = app.add_subcommand("sample-grail",
                                    "capped 2-hop neighborhood sampling");
  sgrail->add_option("--graph", sg_graph)->required();
  sgrail->add_option("--train-seeds", sg_cfg.train_seed_entities)->required();
  sgrail->add_option("--inf-seeds", sg_cfg.inf_seed_entities)->required();
  sgrail->add_option("--cap-train", sg_cfg.max_train_hop_cap)->required();
  sgrail->add_option("--cap-inf", sg_cfg.max_inf_hop_cap)->required();
  sgrail->add_option("--seed", sg_seed)->required();
  sgrail->add_option("--out", sg_out)->required();
  sgrail->add_option("--jobs", sg_jobs);

  // ---- sample-ilpc ----
  std::string si_graph, si_out;
  double si_p = 0.5;
  std::uint64_t si_seed = 0;
  int si_jobs = 0;
  auto* silpc = app.add_subcommand("sample-ilpc", "node-split sampling");
  silpc->add_option("--graph", si_graph)->required();
  silpc->add_option("--p", si_p)->required();
  silpc->add_option("--seed", si_seed)->required();
  silpc->add_option("--out", si_out)->required();
  silpc->add_option("--jobs", si_jobs);

  // ---- sample-partition ----
  std::string sp_graph, sp_out, sp_task;
  kgaudit::PartitionConfig sp_cfg;
  std::uint64_t sp_seed = 0;
  int sp_jobs = 0;
  auto* spart = app.add_subcommand("sample-partition",
                                   "community-partition sampling");
  spart->add_option("--graph", sp_graph)->required();
  spart->add_option("--task", sp_task)->required();
  spart->add_option("--k", sp_cfg.k)->required();
  spart->add_option("--resolution", sp_cfg.resolution);
  spart->add_option("--min-edges", sp_cfg.min_edges);
  spart->add_option("--new-rel-threshold", sp_cfg.new_rel_threshold);
  spart->add_option("--test-frac", sp_cfg.test_fraction);
  spart->add_option("--valid-frac", sp_cfg.valid_fraction);
  spart->add_option("--seed", sp_seed)->required();
  spart->add_option("--out", sp_out)->required();
  spart->add_option("--jobs", sp_jobs);

  // ---- grid ----
  std::string gr_graph, gr_spec, gr_out;
  std::uint32_t gr_seeds_per_config = 3;
  std::uint64_t gr_seed = 0;
  int gr_jobs = 0;
  double gr_alpha = 0.15, gr_eps = 1e-7;
  auto* grid = app.add_subcommand("grid", "one-at-a-time sampling grid");
  grid->add_option("--graph", gr_graph)->required();
  grid->add_option("--spec", gr_spec)->required();
  grid->add_option("--seeds-per-config", gr_seeds_per_config);
  grid->add_option("--seed", gr_seed)->required();
  grid->add_option("--out", gr_out)->required();
  grid->add_option("--jobs", gr_jobs);
  grid->add_option("--alpha", gr_alpha);
  grid->add_option("--eps", gr_eps);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // bad flags are validation errors
  }

  if (audit->parsed()) {
    const auto bundle = load_bundle(audit_opts);
    std::optional<kgaudit::DatasetBundle> parent;
    if (!audit_parent.empty()) {
      CommonOpts po;
      po.dataset = audit_parent;
      po.permissive = audit_opts.permissive;
      parent = load_bundle(po);
    }
    kgaudit::PprConfig cfg;
    cfg.alpha = audit_opts.alpha;
    cfg.epsilon = audit_opts.eps;
    kgaudit::SpdOptions so;
    so.jobs = audit_opts.jobs;
    so.weighting = parse_weighting(audit_opts.weighting);
    if (spd_cap > 0) so.cap = static_cast<std::uint32_t>(spd_cap);
    const auto report =
        kgaudit::audit_dataset(bundle, cfg, so, parent ? &*parent : nullptr);
    json out = kgaudit::to_json(report);
    out["config"] = {{"alpha", cfg.alpha}, {"epsilon", cfg.epsilon}};
    emit_report(out, audit_opts.out);
    if (!audit_csv.empty()) {
      const bool fresh = !fs::exists(audit_csv);
      std::ofstream csv(audit_csv, std::ios::binary | std::ios::app);
      if (!csv) throw kgaudit::IoError("cannot write " + audit_csv);
      if (fresh) csv << "dataset,delta_spd,ppr_hits10\n";
      char buf[160];
      std::snprintf(buf, sizeof(buf), "%s,%.6f,%.6f\n",
                    report.dataset_name.c_str(), report.spd.delta_spd,
                    report.ppr_hits10_mean);
      csv << buf;
    }
    return 0;
  }

  if (eval->parsed()) {
    const auto bundle = load_bundle(eval_opts);
    kgaudit::PprConfig cfg;
    cfg.alpha = eval_opts.alpha;
    cfg.epsilon = eval_opts.eps;
    kgaudit::EvalOptions eo;
    eo.jobs = eval_opts.jobs;
    eo.weighting = parse_weighting(eval_opts.weighting);
    const auto report = kgaudit::evaluate_dataset(
        bundle, kgaudit::parse_heuristic(eval_heuristic), cfg, eo);
    json out = kgaudit::to_json(report);
    out["dataset"] = bundle.name;
    emit_report(out, eval_opts.out);
    return 0;
  }

  if (spd->parsed()) {
    const auto bundle = load_bundle(spd_opts_cli);
    kgaudit::SpdOptions so;
    so.macro_per_query = spd_macro;
    so.jobs = spd_opts_cli.jobs;
    so.weighting = parse_weighting(spd_opts_cli.weighting);
    if (spd_cap2 > 0) so.cap = static_cast<std::uint32_t>(spd_cap2);
    json out{{"dataset", bundle.name},
             {"spd", kgaudit::to_json(kgaudit::spd_report(bundle, so))}};
    if (!spd_buckets.empty()) {
      kgaudit::PprConfig cfg;
      cfg.alpha = spd_opts_cli.alpha;
      cfg.epsilon = spd_opts_cli.eps;
      const auto bounds = parse_bounds(spd_buckets);
      out["buckets"] =
          kgaudit::to_json(kgaudit::ppr_by_spd_bucket(bundle, cfg, bounds, so));
    }
    emit_report(out, spd_opts_cli.out);
    return 0;
  }

  if (sgrail->parsed()) {
    const auto graph = load_graph_file(sg_graph);
    sg_cfg.rng_seed = kgaudit::substream_seed(sg_seed, "sampling");
    auto sampled = kgaudit::grail_sample(graph, sg_cfg);
    kgaudit::PartitionConfig split_cfg;
    split_cfg.task = kgaudit::Task::kE;
    split_cfg.rng_seed = kgaudit::substream_seed(sg_seed, "holdout");
    std::vector<kgaudit::KnowledgeGraph> inference;
    for (auto& s : sampled.inference) inference.push_back(std::move(s.graph));
    auto bundle = kgaudit::make_splits(sampled.train, inference, split_cfg);
    bundle.name = fs::path(sg_out).filename().string();
    bundle.generator = sampled.generator;
    bundle.generator->parameters["test_fraction"] = split_cfg.test_fraction;
    bundle.generator->parameters["valid_fraction"] = split_cfg.valid_fraction;
    bundle.generator->seed = sg_seed;
    fill_delta_spd(bundle, sg_jobs);
    kgaudit::emit_dataset(bundle, sg_out);
    return 0;
  }

  if (silpc->parsed()) {
    const auto graph = load_graph_file(si_graph);
    kgaudit::IlpcConfig cfg;
    cfg.train_node_fraction = si_p;
    cfg.rng_seed = kgaudit::substream_seed(si_seed, "sampling");
    auto sampled = kgaudit::ilpc_sample(graph, cfg);
    kgaudit::PartitionConfig split_cfg;
    split_cfg.task = kgaudit::Task::kE;
    split_cfg.rng_seed = kgaudit::substream_seed(si_seed, "holdout");
    std::vector<kgaudit::KnowledgeGraph> inference;
    for (auto& s : sampled.inference) inference.push_back(std::move(s.graph));
    auto bundle = kgaudit::make_splits(sampled.train, inference, split_cfg);
    bundle.name = fs::path(si_out).filename().string();
    bundle.generator = sampled.generator;
    bundle.generator->parameters["test_fraction"] = split_cfg.test_fraction;
    bundle.generator->parameters["valid_fraction"] = split_cfg.valid_fraction;
    bundle.generator->seed = si_seed;
    fill_delta_spd(bundle, si_jobs);
    kgaudit::emit_dataset(bundle, si_out);
    return 0;
  }

  if (spart->parsed()) {
    const auto graph = load_graph_file(sp_graph);
    sp_cfg.task = kgaudit::parse_task(sp_task);
    if (sp_cfg.task == kgaudit::Task::kTransductive) {
      throw kgaudit::ValidationError("sample-partition expects --task e|er");
    }
    sp_cfg.rng_seed = sp_seed;
    const auto view = kgaudit::undirected_view(graph);
    const auto assignment = kgaudit::louvain_partition(
        view, sp_cfg.resolution, kgaudit::substream_seed(sp_seed, "louvain"));
    auto selection = kgaudit::select_partitions(graph, assignment, sp_cfg);
    kgaudit::PartitionConfig split_cfg = sp_cfg;
    split_cfg.rng_seed = kgaudit::substream_seed(sp_seed, "holdout");
    auto bundle =
        kgaudit::make_splits(selection.train, selection.inference, split_cfg);
    bundle.task = sp_cfg.task;
    bundle.name = fs::path(sp_out).filename().string();
    kgaudit::GeneratorInfo gen;
    gen.procedure = "partition";
    gen.seed = sp_seed;
    gen.parameters = {{"resolution", sp_cfg.resolution},
                      {"k", sp_cfg.k},
                      {"min_edges", sp_cfg.min_edges},
                      {"new_rel_threshold", sp_cfg.new_rel_threshold},
                      {"test_fraction", sp_cfg.test_fraction},
                      {"valid_fraction", sp_cfg.valid_fraction},
                      {"communities", assignment.community_count},
                      {"selection", kgaudit::to_json(selection.report)}};
    bundle.generator = gen;
    fill_delta_spd(bundle, sp_jobs);
    kgaudit::emit_dataset(bundle, sp_out);
    return 0;
  }

  if (grid->parsed()) {
    const auto graph = load_graph_file(gr_graph);
    std::ifstream spec_in(gr_spec);
    if (!spec_in) throw kgaudit::IoError("cannot open " + gr_spec);
    json spec_json;
    try {
      spec_in >> spec_json;
    } catch (const json::exception& e) {
      throw kgaudit::ValidationError("bad grid spec: " + std::string(e.what()));
    }
    auto spec = kgaudit::parse_grid_spec(spec_json);
    if (grid->count("--seeds-per-config") > 0) {
      spec.seeds_per_config = gr_seeds_per_config;
    }
    kgaudit::PprConfig cfg;
    cfg.alpha = gr_alpha;
    cfg.epsilon = gr_eps;
    const auto report = kgaudit::run_grid(graph, spec, cfg, gr_seed, gr_jobs);
    for (const auto& row : report.rows) {
      if (row.failures > 0) {
        std::cerr << "warning: config (" << row.config.train_seed_entities << ","
                  << row.config.inf_seed_entities << ","
                  << row.config.max_train_hop_cap << ","
                  << row.config.max_inf_hop_cap << "): " << row.failures
                  << " failed seed(s)\n";
      }
    }
    write_text(gr_out, kgaudit::grid_csv(report));
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const kgaudit::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
