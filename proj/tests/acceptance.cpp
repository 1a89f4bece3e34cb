// Acceptance suite. Runs every criterion at its pinned tolerance and prints
// one PASS/FAIL line each. Criteria that audit public benchmark datasets look
// for them under --data (or KGAUDIT_DATA_DIR); when a dataset has not been
// fetched the criterion reports SKIP with a pointer to the fetch recipe
// instead of failing. The oracle and determinism criteria always run.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "kgaudit/diagnostics.hpp"
#include "kgaudit/errors.hpp"
#include "kgaudit/grid.hpp"
#include "kgaudit/io.hpp"
#include "kgaudit/louvain.hpp"
#include "kgaudit/ranking.hpp"
#include "kgaudit/rng.hpp"
#include "kgaudit/samplers.hpp"
#include "testutil.hpp"

namespace fs = std::filesystem;
using namespace kgaudit;
using Clock = std::chrono::steady_clock;

namespace {

int g_jobs = 0;

struct Outcome {
  std::string id;
  enum Status { kPass, kFail, kSkip } status;
  std::string detail;
};

std::vector<Outcome> g_outcomes;

void report(const std::string& id, Outcome::Status status,
            const std::string& detail) {
  const char* tag = status == Outcome::kPass   ? "PASS"
                    : status == Outcome::kFail ? "FAIL"
                                               : "SKIP";
  std::cout << "[" << tag << "] criterion " << id << ": " << detail << std::endl;
  g_outcomes.push_back({id, status, detail});
}

void check(const std::string& id, bool ok, const std::string& detail) {
  report(id, ok ? Outcome::kPass : Outcome::kFail, detail);
}

void skip(const std::string& id, const std::string& what) {
  report(id, Outcome::kSkip,
         what + " not available (fetch it first; see scripts/fetch_data.sh)");
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v, int prec = 2) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", prec, v);
  return buf;
}

// ---------------------------------------------------------------------------
// dataset access

fs::path g_data_dir;

std::map<std::string, DatasetBundle> g_bundle_cache;

const DatasetBundle* get_bundle(const std::string& name) {
  auto it = g_bundle_cache.find(name);
  if (it != g_bundle_cache.end()) return &it->second;
  const fs::path dir = g_data_dir / name;
  if (!fs::exists(dir / "train.txt")) return nullptr;
  try {
    LoadOptions opts;
    opts.permissive = true;  // third-party files; audit them as-is
    auto bundle = load_dataset(dir, opts);
    const auto stats = dataset_stats(bundle);
    std::cout << "  loaded " << name << ":";
    for (const auto& g : stats["graphs"]) {
      std::cout << " " << g["name"].get<std::string>() << "("
                << g["entities"].get<std::uint64_t>() << " ents, "
                << g["triples"].get<std::uint64_t>() << " triples, "
                << g["split_size"].get<std::uint64_t>() << " held out)";
    }
    std::cout << "\n";
    return &g_bundle_cache.emplace(name, std::move(bundle)).first->second;
  } catch (const Error& e) {
    std::cout << "  note: failed to load " << dir << ": " << e.what() << "\n";
    return nullptr;
  }
}

std::optional<KnowledgeGraph> load_parent_graph(const std::string& name) {
  const auto* bundle = get_bundle(name);
  if (!bundle) return std::nullopt;
  // Whole transductive KG: train + valid + test triples.
  std::vector<LabeledTriple> all = bundle->train.labeled_triples();
  for (const Triple& t : bundle->valid) {
    all.push_back(bundle->train.labeled(t));
  }
  for (const Triple& t : bundle->inference[0].test) {
    all.push_back(bundle->inference[0].graph.labeled(t));
  }
  return build_graph(all);
}

// ---------------------------------------------------------------------------
// ranking / spd helpers

double hits10_percent(const DatasetBundle& bundle, Heuristic heuristic) {
  EvalOptions opts;
  opts.jobs = g_jobs;
  return evaluate_dataset(bundle, heuristic, {}, opts).aggregate.hits10 * 100.0;
}

void hits_criterion(const std::string& id, const std::string& dataset,
                    Heuristic heuristic, double target, double tol,
                    double budget_s) {
  const auto* bundle = get_bundle(dataset);
  if (!bundle) {
    skip(id, dataset);
    return;
  }
  const auto start = Clock::now();
  const double got = hits10_percent(*bundle, heuristic);
  const double elapsed = seconds_since(start);
  const bool ok = std::abs(got - target) <= tol && elapsed <= budget_s;
  check(id, ok,
        dataset + " " + heuristic_name(heuristic) + " Hits@10 = " + fmt(got, 1) +
            " (target " + fmt(target, 1) + " +- " + fmt(tol, 1) + "; " +
            fmt(elapsed, 0) + "s of " + fmt(budget_s, 0) + "s budget)");
}

void delta_spd_criterion(const std::string& id, const std::string& dataset,
                         double target, double tol) {
  const auto* bundle = get_bundle(dataset);
  if (!bundle) {
    skip(id, dataset);
    return;
  }
  SpdOptions opts;
  opts.jobs = g_jobs;
  const double got = spd_report(*bundle, opts).delta_spd;
  check(id, std::abs(got - target) <= tol,
        dataset + " delta-SPD = " + fmt(got, 3) + " (target " + fmt(target, 2) +
            " +- " + fmt(tol, 2) + ")");
}

// ---------------------------------------------------------------------------
// criteria 1..5

void criterion_1() {
  hits_criterion("1a", "wn18rr", Heuristic::kPpr, 46.2, 2.0, 900);
  hits_criterion("1b", "fb15k-237", Heuristic::kPpr, 2.7, 1.0, 900);
  hits_criterion("1c", "codex-m", Heuristic::kPpr, 9.0, 1.5, 900);
}

void criterion_2() {
  hits_criterion("2a", "wn18rr_v1", Heuristic::kPpr, 77.1, 2.0, 900);
  hits_criterion("2b", "fb15k-237_v4", Heuristic::kPpr, 38.4, 2.0, 900);
  hits_criterion("2c", "ilpc-small", Heuristic::kPpr, 19.8, 2.0, 900);
}

void criterion_3() {
  hits_criterion("3a", "fb15k-237", Heuristic::kTailDegree, 6.0, 1.5, 900);
  hits_criterion("3b", "wn18rr_v4", Heuristic::kTailDegree, 2.2, 1.0, 900);
}

void criterion_4() {
  delta_spd_criterion("4a", "fb15k-237", 0.46, 0.10);
  delta_spd_criterion("4b", "wn18rr", 4.1, 0.4);
  delta_spd_criterion("4c", "codex-m", 0.20, 0.10);
}

void criterion_5() {
  for (const auto& [id, dataset, min_top] :
       {std::tuple<std::string, std::string, double>{"5a", "wn18rr_v4", 1000.0},
        {"5b", "fb15k-237_v4", -1e9}}) {
    const auto* bundle = get_bundle(dataset);
    if (!bundle) {
      skip(id, dataset);
      continue;
    }
    SpdOptions opts;
    opts.jobs = g_jobs;
    const auto bounds = default_spd_bounds();
    const auto table = ppr_by_spd_bucket(*bundle, {}, bounds, opts);
    bool all_positive = true;
    std::string desc;
    for (const auto& b : table.buckets) {
      if (!b.empty && b.percent_increase <= 0.0) all_positive = false;
      desc += (desc.empty() ? "" : ", ") + fmt(b.percent_increase, 0) + "%";
    }
    const double top = table.buckets.back().percent_increase;
    const bool ok = all_positive && top > min_top;
    check(id, ok,
          dataset + " bucket %-increase [" + desc + "]" +
              (min_top > 0 ? ", top bucket must exceed +" + fmt(min_top, 0) + "%"
                           : ""));
  }
}

// ---------------------------------------------------------------------------
// criterion 6: FB15k-237 grid trends

void criterion_6() {
  const auto graph = load_parent_graph("fb15k-237");
  if (!graph) {
    skip("6", "fb15k-237");
    return;
  }
  const auto start = Clock::now();
  GridSpec spec;
  spec.base = {10, 20, 50, 50, 0};
  spec.train_seed_axis = {10, 20, 40};
  spec.inf_seed_axis = {10, 20, 40, 80, 160};
  spec.cap_train_axis = {10, 15, 25, 50, 100};
  spec.cap_inf_axis = {10, 25, 50, 100};
  spec.seeds_per_config = 3;
  const auto report = run_grid(*graph, spec, {}, 1, g_jobs);
  const double elapsed = seconds_since(start);

  bool all_above = true;
  std::vector<double> deltas, hits;
  for (const auto& row : report.rows) {
    if (row.successes == 0) {
      all_above = false;
      continue;
    }
    if (!(row.delta_spd > 0.46)) all_above = false;
    deltas.push_back(row.delta_spd);
    hits.push_back(row.ppr_hits10);
  }
  check("6a", all_above && deltas.size() == report.rows.size(),
        "every configuration mean delta-SPD > 0.46 (parent), min = " +
            fmt(deltas.empty() ? 0 : *std::min_element(deltas.begin(), deltas.end()), 3));

  double corr = 0.0;
  bool corr_ok = false;
  try {
    corr = pearson(deltas, hits);
    corr_ok = corr > 0.0;
  } catch (const Error&) {
  }
  check("6b", corr_ok,
        "Pearson(delta-SPD, PPR Hits@10) = " + fmt(corr, 3) + " (must be > 0)");

  // The base configuration appears on several axes; the first row with the
  // exact (10,20,50,50) values carries the criterion.
  const GridRow* base_row = nullptr;
  for (const auto& row : report.rows) {
    if (row.config.train_seed_entities == 10 && row.config.inf_seed_entities == 20 &&
        row.config.max_train_hop_cap == 50 && row.config.max_inf_hop_cap == 50) {
      base_row = &row;
      break;
    }
  }
  const bool c_ok = base_row && base_row->successes == 3 &&
                    base_row->ppr_hits10 >= 0.20 && base_row->ppr_hits10 <= 0.42 &&
                    base_row->train_edges >= 60000 && base_row->train_edges <= 120000;
  check("6c", c_ok,
        std::string("config (10,20,50,50): PPR Hits@10 = ") +
            (base_row ? fmt(base_row->ppr_hits10, 3) : "n/a") + " (in [0.20,0.42]), " +
            "train edges = " + (base_row ? fmt(base_row->train_edges, 0) : "n/a") +
            " (in [60k,120k]); " + fmt(elapsed / 60.0, 1) + " min of 120 min budget");
  if (elapsed > 7200) {
    check("6-time", false, "grid exceeded the 2 h budget");
  }
}

// ---------------------------------------------------------------------------
// criterion 7: shortcut mitigation on WN18RR

struct BundleStats {
  double hits10 = 0.0;
  double delta_spd = 0.0;
};

BundleStats measure(const DatasetBundle& bundle) {
  BundleStats out;
  EvalOptions eopts;
  eopts.jobs = g_jobs;
  out.hits10 = evaluate_dataset(bundle, Heuristic::kPpr, {}, eopts).aggregate.hits10;
  SpdOptions sopts;
  sopts.jobs = g_jobs;
  out.delta_spd = spd_report(bundle, sopts).delta_spd;
  return out;
}

void criterion_7() {
  const auto graph = load_parent_graph("wn18rr");
  if (!graph) {
    skip("7", "wn18rr");
    return;
  }
  const double parent_delta = 4.1;

  double part_hits = 0, part_dev = 0, grail_hits = 0, grail_dev = 0;
  int part_n = 0, grail_n = 0;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    try {
      PartitionConfig cfg;
      cfg.k = 3;
      cfg.task = Task::kE;
      cfg.min_edges = 1000;
      cfg.rng_seed = substream_seed(seed, "accept/partition");
      const auto view = undirected_view(*graph);
      const auto assignment =
          louvain_partition(view, 1.0, substream_seed(cfg.rng_seed, "louvain"));
      const auto sel = select_partitions(*graph, assignment, cfg);
      auto bundle = make_splits(sel.train, sel.inference, cfg);
      bundle.task = cfg.task;
      const auto stats = measure(bundle);
      part_hits += stats.hits10;
      part_dev += std::abs(stats.delta_spd - parent_delta);
      ++part_n;
    } catch (const Error& e) {
      std::cout << "  note: partition seed " << seed << " failed: " << e.what()
                << "\n";
    }
    try {
      GrailConfig gcfg;
      gcfg.rng_seed = substream_seed(seed, "accept/grail");
      const auto sampled = grail_sample(*graph, gcfg);
      PartitionConfig scfg;
      scfg.task = Task::kE;
      scfg.rng_seed = substream_seed(seed, "accept/grail-holdout");
      auto bundle = make_splits(sampled.train, {sampled.inference[0].graph}, scfg);
      const auto stats = measure(bundle);
      grail_hits += stats.hits10;
      grail_dev += std::abs(stats.delta_spd - parent_delta);
      ++grail_n;
    } catch (const Error& e) {
      std::cout << "  note: grail seed " << seed << " failed: " << e.what() << "\n";
    }
  }
  if (part_n == 0 || grail_n == 0) {
    check("7", false, "sampling failed on every seed");
    return;
  }
  part_hits /= part_n;
  part_dev /= part_n;
  grail_hits /= grail_n;
  grail_dev /= grail_n;

  check("7a", part_hits < grail_hits,
        "partition mean PPR Hits@10 " + fmt(part_hits * 100, 1) +
            " < grail mean " + fmt(grail_hits * 100, 1));
  check("7b", part_dev < grail_dev,
        "partition mean |delta-SPD - 4.1| = " + fmt(part_dev, 2) +
            " < grail mean " + fmt(grail_dev, 2));
  check("7c", part_hits * 100 >= 35.0 && part_hits * 100 <= 60.0,
        "partition mean PPR Hits@10 = " + fmt(part_hits * 100, 1) +
            " (target vicinity [35, 60])");
}

// ---------------------------------------------------------------------------
// criterion 8: oracle suites (no external data)

void criterion_8() {
  const auto start = Clock::now();

  {  // push-vs-exact error bound on >= 50 random graphs
    Rng rng(42);
    bool ok = true;
    int graphs = 0;
    for (int round = 0; round < 50; ++round) {
      const int n = 10 + static_cast<int>(rng.bounded(191));
      const int density = 1 + static_cast<int>(rng.bounded(5));
      const auto g = testutil::random_graph(rng, n, 3, n * density);
      const auto view = undirected_view(
          g, round % 2 == 0 ? EdgeWeighting::kUnit : EdgeWeighting::kMultiplicity);
      const auto source = static_cast<EntityId>(rng.bounded(view.n));
      PprConfig cfg;
      cfg.epsilon = 1e-4;
      const auto approx = approx_ppr(view, source, cfg);
      const auto exact = exact_ppr(view, source, cfg);
      for (std::uint32_t v = 0; v < view.n; ++v) {
        const double gap = exact.value(v) - approx.value(v);
        if (gap < -1e-10 ||
            gap > cfg.epsilon * static_cast<double>(view.degree[v]) + 1e-10) {
          ok = false;
        }
      }
      ++graphs;
    }
    check("8a", ok && graphs >= 50,
          "push approximation within eps*degree of exact on " +
              std::to_string(graphs) + " random graphs");
  }

  {  // exact normalization
    Rng rng(43);
    bool ok = true;
    for (int round = 0; round < 50; ++round) {
      const auto g = testutil::random_graph(rng, 30, 3, 80);
      const auto view = undirected_view(g);
      const auto p = exact_ppr(view, static_cast<EntityId>(rng.bounded(view.n)));
      if (std::abs(p.sum() - 1.0) > 1e-9) ok = false;
    }
    check("8b", ok, "exact PPR sums to 1 within 1e-9 on 50 random graphs");
  }

  {  // Louvain equals brute force on the fixtures; all-in-one modularity == 0
    auto two_triangles = build_graph(std::vector<LabeledTriple>{
        {"a", "r", "b"}, {"b", "r", "c"}, {"c", "r", "a"},
        {"x", "r", "y"}, {"y", "r", "z"}, {"z", "r", "x"}});
    std::vector<LabeledTriple> barbell_triples;
    const std::vector<std::string> left{"a", "b", "c", "d"}, right{"e", "f", "g", "h"};
    for (const auto& side : {left, right}) {
      for (std::size_t i = 0; i < side.size(); ++i) {
        for (std::size_t j = i + 1; j < side.size(); ++j) {
          barbell_triples.push_back({side[i], "r", side[j]});
        }
      }
    }
    barbell_triples.push_back({"d", "r", "e"});
    auto barbell = build_graph(barbell_triples);

    bool ok = true;
    for (const auto* g : {&two_triangles, &barbell}) {
      const auto view = undirected_view(*g);
      double best_q = -1.0;
      testutil::for_each_partition(view.n, [&](const std::vector<std::uint32_t>& rgs) {
        best_q = std::max(best_q, testutil::modularity_oracle(view, rgs, 1.0));
      });
      const auto assignment = louvain_partition(view, 1.0, 3);
      if (std::abs(modularity(view, assignment, 1.0) - best_q) > 1e-12) ok = false;

      PartitionAssignment all_in_one;
      all_in_one.community_of.assign(view.n, 0);
      all_in_one.community_count = 1;
      if (modularity(view, all_in_one, 1.0) != 0.0) ok = false;
    }
    check("8c", ok,
          "Louvain equals the brute-force max-modularity partition on the "
          "two-triangle and barbell fixtures; all-in-one modularity is exactly 0");
  }

  {  // ranking equals the naive sorted-list implementation
    Rng rng(44);
    bool ok = true;
    int rounds = 0;
    while (rounds < 10) {
      const auto bundle = testutil::random_bundle(rng);
      bool has_tests = false;
      std::uint32_t max_entities = 0;
      for (const auto& s : bundle.inference) {
        has_tests |= !s.test.empty();
        max_entities = std::max(max_entities, s.graph.num_entities());
      }
      if (!has_tests || max_entities > 20) continue;
      ++rounds;
      for (const Heuristic h : {Heuristic::kPpr, Heuristic::kTailDegree}) {
        const auto report = evaluate_dataset(bundle, h);
        for (std::size_t gi = 0; gi < bundle.inference.size(); ++gi) {
          const auto& split = bundle.inference[gi];
          if (split.test.empty()) continue;
          const FilterIndex filter(split.graph, split.test);
          double mrr = 0, h10 = 0;
          std::uint64_t count = 0;
          for (const Triple& t : split.test) {
            for (const Query& q :
                 {Query{t.head, t.relation, Direction::kPredictTail, t.tail},
                  Query{t.tail, t.relation, Direction::kPredictHead, t.head}}) {
              const auto sv = score_candidates(split.graph, q, h);
              std::vector<double> dense(sv.universe, 0.0);
              for (const auto& [e, s] : sv.entries) dense[e] = s;
              std::set<EntityId> filtered;
              for (const EntityId f :
                   filter.answers(q.known, q.relation, q.direction)) {
                if (f != q.answer) filtered.insert(f);
              }
              const auto naive = testutil::naive_rank(dense, q.answer, filtered);
              mrr += 1.0 / naive.rank;
              h10 += naive.hits10;
              ++count;
            }
          }
          if (std::abs(report.per_graph[gi].mrr - mrr / count) > 1e-12) ok = false;
          if (std::abs(report.per_graph[gi].hits10 - h10 / count) > 1e-12) {
            ok = false;
          }
        }
      }
    }
    check("8d", ok,
          "ranking metrics equal the naive sorted-candidate-list implementation "
          "on bundles with <= 20 entities");
  }

  {  // emit/load round trip on 100 random bundles
    Rng rng(45);
    const fs::path dir = fs::temp_directory_path() / "kgaudit_accept_roundtrip";
    fs::remove_all(dir);
    bool ok = true;
    for (int round = 0; round < 100; ++round) {
      const auto bundle = testutil::random_bundle(rng);
      const auto path = dir / ("b" + std::to_string(round));
      emit_dataset(bundle, path);
      if (!bundles_equal(bundle, load_dataset(path))) ok = false;
    }
    fs::remove_all(dir);
    check("8e", ok, "emit/load round-trip identity on 100 random bundles");
  }

  const double elapsed = seconds_since(start);
  check("8-time", elapsed < 300,
        "oracle suites completed in " + fmt(elapsed, 1) + "s (< 300s)");
}

// ---------------------------------------------------------------------------
// criterion 9: byte-identical reruns of every subcommand

std::string g_cli;

int run_cli(const std::string& args) {
  const std::string cmd = g_cli + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  if (status < 0) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

bool same_bytes(const fs::path& a, const fs::path& b) {
  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  if (!fa || !fb) return false;
  std::ostringstream sa, sb;
  sa << fa.rdbuf();
  sb << fb.rdbuf();
  return sa.str() == sb.str();
}

bool same_tree(const fs::path& a, const fs::path& b) {
  std::vector<fs::path> files_a, files_b;
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (e.is_regular_file()) files_a.push_back(fs::relative(e.path(), a));
  }
  for (const auto& e : fs::recursive_directory_iterator(b)) {
    if (e.is_regular_file()) files_b.push_back(fs::relative(e.path(), b));
  }
  std::sort(files_a.begin(), files_a.end());
  std::sort(files_b.begin(), files_b.end());
  if (files_a != files_b) return false;
  for (const auto& rel : files_a) {
    if (!same_bytes(a / rel, b / rel)) return false;
  }
  return true;
}

void criterion_9() {
  if (g_cli.empty()) {
    skip("9", "CLI binary path (--cli)");
    return;
  }
  const fs::path dir = fs::temp_directory_path() / "kgaudit_accept_cli";
  fs::remove_all(dir);
  fs::create_directories(dir);

  // Deterministic synthetic parent graph with clear community structure.
  {
    Rng rng(2718);
    std::ofstream parent(dir / "parent.tsv", std::ios::binary);
    for (int block = 0; block < 4; ++block) {
      const std::string prefix = "b" + std::to_string(block) + "_";
      for (int i = 0; i < 420; ++i) {
        const auto a = prefix + std::to_string(rng.bounded(45));
        const auto b = prefix + std::to_string(rng.bounded(45));
        if (a == b) continue;
        parent << a << "\tr" << rng.bounded(4) << "\t" << b << "\n";
      }
    }
    for (int i = 0; i < 30; ++i) {
      parent << "b" << rng.bounded(4) << "_" << rng.bounded(45) << "\tr0\tb"
             << rng.bounded(4) << "_" << rng.bounded(45) << "\n";
    }
  }
  const std::string parent = (dir / "parent.tsv").string();

  bool all_ok = true;
  auto expect = [&](const std::string& what, bool ok) {
    if (!ok) {
      all_ok = false;
      std::cout << "  note: determinism mismatch or failure for " << what << "\n";
    }
  };

  // Same leaf name under two parent directories, so the emitted dataset name
  // (taken from the output basename) matches across the runs.
  auto sample_twice = [&](const std::string& name, const std::string& args) {
    const auto o1 = (dir / "run1" / name).string();
    const auto o2 = (dir / "run2" / name).string();
    const bool ok = run_cli(args + " --out " + o1) == 0 &&
                    run_cli(args + " --out " + o2) == 0 && same_tree(o1, o2);
    expect(name, ok);
    return o1;
  };

  const auto grail_ds = sample_twice(
      "grail", "sample-grail --graph " + parent +
                   " --train-seeds 4 --inf-seeds 4 --cap-train 12 --cap-inf 12"
                   " --seed 11");
  sample_twice("ilpc", "sample-ilpc --graph " + parent + " --p 0.45 --seed 12");
  sample_twice("partition", "sample-partition --graph " + parent +
                                " --task e --k 3 --min-edges 40 "
                                "--new-rel-threshold 0.3 --seed 13");

  auto report_twice = [&](const std::string& name, const std::string& args) {
    const auto r1 = (dir / (name + "_1.json")).string();
    const auto r2 = (dir / (name + "_2.json")).string();
    const bool ok = run_cli(args + " --out " + r1) == 0 &&
                    run_cli(args + " --out " + r2) == 0 && same_bytes(r1, r2);
    expect(name, ok);
  };
  report_twice("audit", "audit --dataset " + grail_ds);
  report_twice("eval", "eval --dataset " + grail_ds + " --heuristic ppr");
  report_twice("eval_degree", "eval --dataset " + grail_ds + " --heuristic degree");
  report_twice("spd", "spd --dataset " + grail_ds + " --buckets 1,2,3,4");

  {  // worker count must not leak into report bytes
    const auto r1 = (dir / "jobs_1.json").string();
    const auto r2 = (dir / "jobs_2.json").string();
    const std::string base = "eval --dataset " + grail_ds + " --heuristic ppr";
    expect("eval_jobs", run_cli(base + " --jobs 1 --out " + r1) == 0 &&
                            run_cli(base + " --jobs 2 --out " + r2) == 0 &&
                            same_bytes(r1, r2));
  }

  {  // grid: byte-identical CSV, including under different --jobs
    std::ofstream spec(dir / "grid.json", std::ios::binary);
    spec << R"({"base": {"train_seeds": 3, "inf_seeds": 3, "cap_train": 10,)"
         << R"( "cap_inf": 10}, "axes": {"train_seeds": [3, 4]},)"
         << R"( "seeds_per_config": 2})" << "\n";
    spec.close();
    const auto g1 = (dir / "grid_1.csv").string();
    const auto g2 = (dir / "grid_2.csv").string();
    const std::string base = "grid --graph " + parent + " --spec " +
                             (dir / "grid.json").string() + " --seed 21";
    const bool ok = run_cli(base + " --jobs 2 --out " + g1) == 0 &&
                    run_cli(base + " --jobs 1 --out " + g2) == 0 &&
                    same_bytes(g1, g2);
    expect("grid", ok);
  }

  check("9", all_ok,
        "every subcommand rerun with identical flags and --seed produced "
        "byte-identical output");

  {  // exit-code families: 2 validation, 3 sampling, 4 I/O
    const bool io_code =
        run_cli("eval --dataset " + (dir / "no_such_dataset").string() +
                " --heuristic ppr") == 4;
    const bool validation_code =
        run_cli("audit --dataset " + grail_ds + " --task bogus") == 2 &&
        run_cli("eval --dataset " + grail_ds + " --heuristic nope") == 2 &&
        run_cli("eval --no-such-flag") == 2;
    const bool sampling_code =
        run_cli("sample-partition --graph " + parent +
                " --task e --k 99 --seed 1 --out " +
                (dir / "never_emitted").string()) == 3;
    check("9-exit", io_code && validation_code && sampling_code,
          "exit codes: 4 for I/O errors, 2 for validation errors, 3 for "
          "sampling failures");
  }
  if (all_ok) fs::remove_all(dir);
}

}  // namespace

int main(int argc, char** argv) {
  fs::path data = "data";
  if (const char* env = std::getenv("KGAUDIT_DATA_DIR")) data = env;
  if (const char* env = std::getenv("KGAUDIT_CLI")) g_cli = env;
  std::set<std::string> only;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    auto next = [&]() -> std::string {
      if (i + 1 >= argc) {
        std::cerr << "missing value for " << arg << "\n";
        std::exit(2);
      }
      return argv[++i];
    };
    if (arg == "--data") {
      data = next();
    } else if (arg == "--cli") {
      g_cli = next();
    } else if (arg == "--jobs") {
      g_jobs = std::stoi(next());
    } else if (arg == "--only") {
      std::stringstream ss(next());
      std::string tok;
      while (std::getline(ss, tok, ',')) only.insert(tok);
    } else {
      std::cerr << "usage: acceptance [--data DIR] [--cli PATH] [--jobs N] "
                   "[--only 1,2,...]\n";
      return 2;
    }
  }
  g_data_dir = data;
  std::cout << "dataset directory: " << fs::absolute(g_data_dir) << "\n";

  auto want = [&](const std::string& id) { return only.empty() || only.count(id); };
  if (want("1")) criterion_1();
  if (want("2")) criterion_2();
  if (want("3")) criterion_3();
  if (want("4")) criterion_4();
  if (want("5")) criterion_5();
  if (want("6")) criterion_6();
  if (want("7")) criterion_7();
  if (want("8")) criterion_8();
  if (want("9")) criterion_9();

  int passed = 0, failed = 0, skipped = 0;
  for (const auto& o : g_outcomes) {
    passed += o.status == Outcome::kPass;
    failed += o.status == Outcome::kFail;
    skipped += o.status == Outcome::kSkip;
  }
  std::cout << "acceptance: " << passed << " passed, " << failed << " failed, "
            << skipped << " skipped (datasets not fetched)\n";
  return failed == 0 ? 0 : 1;
}
