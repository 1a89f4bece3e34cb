#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kgaudit/graph.hpp"

namespace kgaudit {

enum class Task { kE, kEr, kTransductive };

std::string task_name(Task t);
Task parse_task(const std::string& name);

// One inference graph plus the test triples held out from it. Test triples
// are interned over the graph's vocabulary (relations seen only in the test
// split become imported vocabulary entries).
struct InferenceSplit {
  KnowledgeGraph graph;
  std::vector<Triple> test;
};

struct GeneratorInfo {
  std::string procedure;
  std::uint64_t seed = 0;
  nlohmann::json parameters = nlohmann::json::object();
};

// Train graph + validation triples + one or more inference graphs with their
// held-out test triples; the unit audited and emitted.
struct DatasetBundle {
  std::string name;
  Task task = Task::kE;
  KnowledgeGraph train;
  std::vector<Triple> valid;  // over the train vocabulary
  std::vector<InferenceSplit> inference;

  std::optional<GeneratorInfo> generator;
  std::map<std::string, double> delta_spd;  // stats sidecar, keyed inference_<i>
  std::vector<std::string> warnings;
};

// Parses head<TAB>relation<TAB>tail lines. LF or CRLF accepted, surrounding
// whitespace trimmed, empty lines skipped. Throws ParseError (with the line
// number) on anything that is not exactly three non-empty fields.
std::vector<LabeledTriple> parse_triples(std::istream& in);
std::vector<LabeledTriple> read_triple_file(const std::filesystem::path& path);
void write_triple_file(const std::filesystem::path& path,
                       const std::vector<LabeledTriple>& triples);

struct ValidationIssue {
  std::string invariant;
  std::string detail;
};

// Checks the bundle invariants: split/graph disjointness, task-E relation
// containment, and entity-vocabulary disjointness (shared for transductive).
std::vector<ValidationIssue> validate_bundle(const DatasetBundle& bundle);

struct LoadOptions {
  std::optional<Task> task;  // overrides stats.json / layout inference
  bool permissive = false;   // record violations as warnings instead of throwing
};

// Loads the emitted layout (train.txt, valid.txt, inference_<i>/{graph,test}.txt,
// stats.json) or one of the legacy layouts: transductive train/valid/test.txt,
// and the paired "<dir>" + "<dir>_ind" inductive layout.
DatasetBundle load_dataset(const std::filesystem::path& dir,
                           const LoadOptions& opts = {});

// Writes the bundle in the standard layout (legacy 3-file layout for
// transductive bundles) plus a stats.json sidecar. load(emit(b)) == b.
void emit_dataset(const DatasetBundle& bundle, const std::filesystem::path& dir);

// The stats.json payload: per-graph counts, split sizes, new-relation
// fractions, delta_spd sidecar and generator echo.
nlohmann::json dataset_stats(const DatasetBundle& bundle);

// Fraction of the inference graph's triples whose relation does not appear in
// the train relation vocabulary, one value per inference graph.
std::vector<double> new_relation_fractions(const DatasetBundle& bundle);

// Label-level structural equality (vocabulary label sets, triple multisets,
// split membership); used by the round-trip checks.
bool bundles_equal(const DatasetBundle& a, const DatasetBundle& b);

}  // namespace kgaudit
