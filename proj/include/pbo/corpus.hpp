#pragma once
// Corpus entries: a .pbo file plus the expectations in its `--!` header lines.

#include <optional>
#include <string>
#include <vector>

namespace pbo {

struct CorpusEntry {
  std::string path;
  std::string name;    // file stem
  std::string suite;   // positive | negative
  std::string check = "ok";          // ok or the expected error code
  std::optional<int64_t> returns;    // ReturnedInt under both semantics
  std::optional<size_t> leak;        // expected residual locations (`none` = 0)
  bool diverges = false;             // BlackHole or BudgetExhausted
  std::string source;
};

// Throws std::runtime_error when the file cannot be read or a header is malformed.
CorpusEntry load_entry(const std::string& path);
// All *.pbo files of a directory, ordered by name.
std::vector<CorpusEntry> load_corpus(const std::string& dir);
// $PBO_CORPUS, else the source tree's corpus/ directory.
std::string default_corpus_dir();

}  // namespace pbo

namespace pbo {

struct CorpusOptions {
  size_t schedules = 100;
  size_t budget = 5000;
  int depth = 20;
  size_t node_cap = 100000;
  uint64_t seed = 1;
};

// One machine-checked expectation of an entry.
struct Expectation {
  std::string entry;
  std::string check;  // typecheck | returns | diverges | leak | diamond | uniq
  std::string expected;
  std::string actual;
  bool pass = false;
};

// suite: all | positive | negative | metatheory. Entries outside the suite
// yield nothing.
std::vector<Expectation> run_expectations(const CorpusEntry& e, const std::string& suite, const CorpusOptions& o);

}  // namespace pbo
