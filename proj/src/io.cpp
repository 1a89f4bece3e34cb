#include "kgaudit/io.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "kgaudit/errors.hpp"

namespace fs = std::filesystem;

namespace kgaudit {

std::string task_name(Task t) {
  switch (t) {
    case Task::kE: return "E";
    case Task::kEr: return "ER";
    case Task::kTransductive: return "TRANSDUCTIVE";
  }
  return "E";
}

Task parse_task(const std::string& name) {
  std::string s;
  for (char c : name) s.push_back(static_cast<char>(std::tolower(c)));
  if (s == "e") return Task::kE;
  if (s == "er" || s == "e,r" || s == "(e,r)") return Task::kEr;
  if (s == "trans" || s == "transductive") return Task::kTransductive;
  throw ValidationError("unknown task '" + name + "' (expected e|er|trans)");
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace

std::vector<LabeledTriple> parse_triples(std::istream& in) {
  std::vector<LabeledTriple> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
      const std::size_t tab = line.find('\t', start);
      fields.push_back(trim(line.substr(start, tab - start)));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (fields.size() != 3) {
      throw ParseError(line_no, "expected 3 tab-separated fields, got " +
                                    std::to_string(fields.size()));
    }
    for (const auto& f : fields) {
      if (f.empty()) throw ParseError(line_no, "empty field");
    }
    out.push_back({fields[0], fields[1], fields[2]});
  }
  return out;
}

std::vector<LabeledTriple> read_triple_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return parse_triples(in);
  } catch (const ParseError& e) {
    throw ParseError(e.line, path.string() + ": " + e.what());
  }
}

void write_triple_file(const fs::path& path,
                       const std::vector<LabeledTriple>& triples) {
  std::ofstream out(path, std::ios::binary);  // LF line endings everywhere
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& t : triples) {
    out << t.head << '\t' << t.relation << '\t' << t.tail << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

namespace {

// Interns split triples over the graph's vocabulary. Entities must already be
// present; unseen relations become imported vocabulary entries (relation
// interning does not touch the entity-indexed CSR).
std::vector<Triple> intern_split(KnowledgeGraph& graph,
                                 const std::vector<LabeledTriple>& labeled,
                                 const std::string& what) {
  std::vector<Triple> out;
  out.reserve(labeled.size());
  for (const auto& lt : labeled) {
    const auto h = graph.entities.find(lt.head);
    const auto t = graph.entities.find(lt.tail);
    if (!h || !t) {
      throw ValidationError(what + " triple mentions entity absent from its graph: " +
                            lt.head + " / " + lt.tail);
    }
    out.push_back({*h, graph.relations.intern(lt.relation), *t});
  }
  return out;
}

// Builds a graph whose vocabulary also covers the given split files, so split
// triples always resolve (split-only labels become imported entries).
KnowledgeGraph build_graph_covering(
    const std::vector<LabeledTriple>& graph_triples,
    const std::vector<const std::vector<LabeledTriple>*>& splits) {
  Vocab ents, rels;
  for (const auto& t : graph_triples) {
    ents.intern(t.head);
    rels.intern(t.relation);
    ents.intern(t.tail);
  }
  for (const auto* split : splits) {
    for (const auto& t : *split) {
      ents.intern(t.head);
      rels.intern(t.relation);
      ents.intern(t.tail);
    }
  }
  return build_graph(graph_triples, std::move(ents), std::move(rels));
}

std::set<std::string> appearing_entities(const KnowledgeGraph& g) {
  std::set<std::string> out;
  for (const Triple& t : g.triples) {
    out.insert(g.entities.label(t.head));
    out.insert(g.entities.label(t.tail));
  }
  return out;
}

std::size_t count_distinct_relations(const KnowledgeGraph& g) {
  std::unordered_set<RelationId> rels;
  for (const Triple& t : g.triples) rels.insert(t.relation);
  return rels.size();
}

std::size_t count_distinct_entities(const KnowledgeGraph& g) {
  std::unordered_set<EntityId> ents;
  for (const Triple& t : g.triples) {
    ents.insert(t.head);
    ents.insert(t.tail);
  }
  return ents.size();
}

}  // namespace

std::vector<double> new_relation_fractions(const DatasetBundle& bundle) {
  std::vector<double> out;
  out.reserve(bundle.inference.size());
  for (const auto& split : bundle.inference) {
    if (split.graph.triples.empty()) {
      out.push_back(0.0);
      continue;
    }
    std::uint64_t unseen = 0;
    for (const Triple& t : split.graph.triples) {
      if (!bundle.train.relations.find(split.graph.relations.label(t.relation))) {
        ++unseen;
      }
    }
    out.push_back(static_cast<double>(unseen) /
                  static_cast<double>(split.graph.triples.size()));
  }
  return out;
}

std::vector<ValidationIssue> validate_bundle(const DatasetBundle& bundle) {
  std::vector<ValidationIssue> issues;

  {
    std::unordered_set<Triple, TripleHash> train_set(bundle.train.triples.begin(),
                                                     bundle.train.triples.end());
    for (const Triple& t : bundle.valid) {
      if (train_set.count(t)) {
        issues.push_back({"valid-train-disjoint",
                          "validation triple also present in the train graph"});
        break;
      }
    }
  }

  for (std::size_t i = 0; i < bundle.inference.size(); ++i) {
    const auto& split = bundle.inference[i];
    const std::string which = "inference_" + std::to_string(i + 1);
    std::unordered_set<Triple, TripleHash> graph_set(split.graph.triples.begin(),
                                                     split.graph.triples.end());
    for (const Triple& t : split.test) {
      if (graph_set.count(t)) {
        issues.push_back({"test-graph-disjoint",
                          which + ": test triple also present in its graph"});
        break;
      }
    }
    if (bundle.task == Task::kE) {
      for (const Triple& t : split.graph.triples) {
        if (!bundle.train.relations.find(split.graph.relations.label(t.relation))) {
          issues.push_back({"task-e-relation-containment",
                            which + ": relation '" +
                                split.graph.relations.label(t.relation) +
                                "' unseen in the train graph"});
          break;
        }
      }
      for (const Triple& t : split.test) {
        if (!bundle.train.relations.find(split.graph.relations.label(t.relation))) {
          issues.push_back({"task-e-relation-containment",
                            which + ": test relation '" +
                                split.graph.relations.label(t.relation) +
                                "' unseen in the train graph"});
          break;
        }
      }
    }
  }

  if (bundle.task == Task::kTransductive) {
    if (bundle.inference.size() != 1) {
      issues.push_back({"transductive-single-graph",
                        "transductive bundle must have exactly one inference graph"});
    } else {
      const auto& g = bundle.inference[0].graph;
      if (g.entities.labels() != bundle.train.entities.labels()) {
        issues.push_back({"transductive-shared-vocab",
                          "inference graph does not share the train entity vocabulary"});
      }
    }
  } else {
    const std::set<std::string> train_ents = appearing_entities(bundle.train);
    for (std::size_t i = 0; i < bundle.inference.size(); ++i) {
      for (const std::string& label : bundle.inference[i].graph.entities.labels()) {
        if (train_ents.count(label)) {
          issues.push_back({"entity-vocab-disjoint",
                            "inference_" + std::to_string(i + 1) +
                                ": entity '" + label + "' also appears in train"});
          break;
        }
      }
    }
  }

  return issues;
}

nlohmann::json dataset_stats(const DatasetBundle& bundle) {
  nlohmann::json graphs = nlohmann::json::array();
  graphs.push_back({{"name", "train"},
                    {"entities", count_distinct_entities(bundle.train)},
                    {"relations", count_distinct_relations(bundle.train)},
                    {"triples", bundle.train.num_triples()},
                    {"split_size", bundle.valid.size()},
                    {"new_relation_fraction", 0.0}});
  const auto fractions = new_relation_fractions(bundle);
  for (std::size_t i = 0; i < bundle.inference.size(); ++i) {
    const auto& split = bundle.inference[i];
    graphs.push_back({{"name", "inference_" + std::to_string(i + 1)},
                      {"entities", count_distinct_entities(split.graph)},
                      {"relations", count_distinct_relations(split.graph)},
                      {"triples", split.graph.num_triples()},
                      {"split_size", split.test.size()},
                      {"new_relation_fraction", fractions[i]}});
  }

  nlohmann::json stats{{"name", bundle.name},
                       {"task", task_name(bundle.task)},
                       {"graphs", graphs},
                       {"delta_spd", bundle.delta_spd}};
  if (bundle.generator) {
    stats["generator"] = {{"procedure", bundle.generator->procedure},
                          {"seed", bundle.generator->seed},
                          {"parameters", bundle.generator->parameters}};
  }
  if (!bundle.warnings.empty()) stats["warnings"] = bundle.warnings;
  return stats;
}

void emit_dataset(const DatasetBundle& bundle, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  auto labeled = [](const KnowledgeGraph& g, const std::vector<Triple>& ts) {
    std::vector<LabeledTriple> out;
    out.reserve(ts.size());
    for (const Triple& t : ts) out.push_back(g.labeled(t));
    return out;
  };

  write_triple_file(dir / "train.txt", bundle.train.labeled_triples());
  write_triple_file(dir / "valid.txt", labeled(bundle.train, bundle.valid));

  if (bundle.task == Task::kTransductive) {
    if (bundle.inference.size() != 1) {
      throw ValidationError("transductive bundle must have exactly one inference graph");
    }
    write_triple_file(dir / "test.txt",
                      labeled(bundle.inference[0].graph, bundle.inference[0].test));
  } else {
    for (std::size_t i = 0; i < bundle.inference.size(); ++i) {
      const fs::path sub = dir / ("inference_" + std::to_string(i + 1));
      fs::create_directories(sub, ec);
      if (ec) throw IoError("cannot create " + sub.string() + ": " + ec.message());
      write_triple_file(sub / "graph.txt",
                        bundle.inference[i].graph.labeled_triples());
      write_triple_file(sub / "test.txt",
                        labeled(bundle.inference[i].graph, bundle.inference[i].test));
    }
  }

  std::ofstream stats(dir / "stats.json", std::ios::binary);
  if (!stats) throw IoError("cannot write " + (dir / "stats.json").string());
  stats << dataset_stats(bundle).dump(2) << '\n';
  if (!stats) throw IoError("write failed for " + (dir / "stats.json").string());
}

namespace {

DatasetBundle load_emitted_layout(const fs::path& dir, Task task) {
  DatasetBundle bundle;
  bundle.task = task;
  const auto train_triples = read_triple_file(dir / "train.txt");
  if (!fs::exists(dir / "valid.txt")) {
    throw IoError("missing " + (dir / "valid.txt").string());
  }
  const auto valid_triples = read_triple_file(dir / "valid.txt");

  if (task == Task::kTransductive) {
    const auto test_triples = read_triple_file(dir / "test.txt");
    bundle.train =
        build_graph_covering(train_triples, {&valid_triples, &test_triples});
    bundle.valid = intern_split(bundle.train, valid_triples, "validation");
    InferenceSplit split;
    split.graph = bundle.train;  // shared vocabulary, same triples
    split.test = intern_split(split.graph, test_triples, "test");
    bundle.inference.push_back(std::move(split));
    return bundle;
  }

  bundle.train = build_graph_covering(train_triples, {&valid_triples});
  bundle.valid = intern_split(bundle.train, valid_triples, "validation");
  for (std::size_t i = 1;; ++i) {
    const fs::path sub = dir / ("inference_" + std::to_string(i));
    if (!fs::exists(sub / "graph.txt")) break;
    const auto graph_triples = read_triple_file(sub / "graph.txt");
    const auto test_triples = read_triple_file(sub / "test.txt");
    InferenceSplit split;
    split.graph = build_graph_covering(graph_triples, {&test_triples});
    split.test = intern_split(split.graph, test_triples, "test");
    bundle.inference.push_back(std::move(split));
  }
  if (bundle.inference.empty()) {
    throw IoError("no inference_<i>/graph.txt under " + dir.string());
  }
  return bundle;
}

DatasetBundle load_legacy_pair(const fs::path& dir, const fs::path& ind_dir,
                               Task task) {
  DatasetBundle bundle;
  bundle.task = task;
  const auto train_triples = read_triple_file(dir / "train.txt");
  if (!fs::exists(dir / "valid.txt")) {
    throw IoError("missing " + (dir / "valid.txt").string());
  }
  const auto valid_triples = read_triple_file(dir / "valid.txt");
  bundle.train = build_graph_covering(train_triples, {&valid_triples});
  bundle.valid = intern_split(bundle.train, valid_triples, "validation");

  const auto graph_triples = read_triple_file(ind_dir / "train.txt");
  const auto test_triples = read_triple_file(ind_dir / "test.txt");
  InferenceSplit split;
  split.graph = build_graph_covering(graph_triples, {&test_triples});
  split.test = intern_split(split.graph, test_triples, "test");
  bundle.inference.push_back(std::move(split));

  if (fs::exists(ind_dir / "valid.txt")) {
    const auto n = read_triple_file(ind_dir / "valid.txt").size();
    if (n > 0) {
      bundle.warnings.push_back(
          "legacy_inference_validation: " + std::to_string(n) +
          " validation triples live on the inference graph and were ignored");
    }
  }
  return bundle;
}

}  // namespace

DatasetBundle load_dataset(const fs::path& dir_in, const LoadOptions& opts) {
  fs::path dir = dir_in;
  if (dir.filename().empty()) dir = dir.parent_path();  // strip trailing slash
  if (!fs::exists(dir)) throw IoError("no such dataset directory: " + dir.string());

  std::optional<Task> task = opts.task;
  nlohmann::json stats;
  if (fs::exists(dir / "stats.json")) {
    std::ifstream in(dir / "stats.json");
    try {
      in >> stats;
    } catch (const nlohmann::json::exception& e) {
      throw IoError("bad stats.json in " + dir.string() + ": " + e.what());
    }
    if (!task && stats.contains("task")) {
      task = parse_task(stats["task"].get<std::string>());
    }
  }

  DatasetBundle bundle;
  const fs::path ind_dir = dir.parent_path() / (dir.filename().string() + "_ind");
  if (fs::exists(dir / "inference_1" / "graph.txt")) {
    bundle = load_emitted_layout(dir, task.value_or(Task::kE));
  } else if (fs::exists(ind_dir / "train.txt")) {
    bundle = load_legacy_pair(dir, ind_dir, task.value_or(Task::kE));
  } else if (fs::exists(dir / "train.txt") && fs::exists(dir / "test.txt")) {
    bundle = load_emitted_layout(dir, task.value_or(Task::kTransductive));
  } else {
    throw IoError("unrecognized dataset layout under " + dir.string());
  }

  bundle.name = dir.filename().string();
  if (stats.is_object()) {
    if (stats.contains("name")) bundle.name = stats["name"].get<std::string>();
    if (stats.contains("delta_spd")) {
      for (auto& [k, v] : stats["delta_spd"].items()) {
        bundle.delta_spd[k] = v.get<double>();
      }
    }
    if (stats.contains("generator")) {
      GeneratorInfo gen;
      gen.procedure = stats["generator"].value("procedure", "");
      gen.seed = stats["generator"].value("seed", std::uint64_t{0});
      gen.parameters = stats["generator"].value("parameters", nlohmann::json::object());
      bundle.generator = gen;
    }
  }

  const auto issues = validate_bundle(bundle);
  if (!issues.empty()) {
    if (!opts.permissive) {
      throw ValidationError("bundle invariant '" + issues.front().invariant +
                            "' violated: " + issues.front().detail);
    }
    for (const auto& issue : issues) {
      bundle.warnings.push_back("invariant " + issue.invariant + ": " + issue.detail);
    }
  }
  return bundle;
}

bool bundles_equal(const DatasetBundle& a, const DatasetBundle& b) {
  auto label_multiset = [](const KnowledgeGraph& g,
                           const std::vector<Triple>& ts) {
    std::vector<LabeledTriple> out;
    out.reserve(ts.size());
    for (const Triple& t : ts) out.push_back(g.labeled(t));
    std::sort(out.begin(), out.end());
    return out;
  };
  auto graph_equal = [&](const KnowledgeGraph& x, const KnowledgeGraph& y) {
    auto lx = label_multiset(x, x.triples);
    auto ly = label_multiset(y, y.triples);
    if (lx != ly) return false;
    auto ex = x.entities.labels();
    auto ey = y.entities.labels();
    std::sort(ex.begin(), ex.end());
    std::sort(ey.begin(), ey.end());
    if (ex != ey) return false;
    auto rx = x.relations.labels();
    auto ry = y.relations.labels();
    std::sort(rx.begin(), rx.end());
    std::sort(ry.begin(), ry.end());
    return rx == ry;
  };

  if (a.task != b.task || a.inference.size() != b.inference.size()) return false;
  if (!graph_equal(a.train, b.train)) return false;
  if (label_multiset(a.train, a.valid) != label_multiset(b.train, b.valid)) {
    return false;
  }
  for (std::size_t i = 0; i < a.inference.size(); ++i) {
    if (!graph_equal(a.inference[i].graph, b.inference[i].graph)) return false;
    if (label_multiset(a.inference[i].graph, a.inference[i].test) !=
        label_multiset(b.inference[i].graph, b.inference[i].test)) {
      return false;
    }
  }
  return true;
}

}  // namespace kgaudit
