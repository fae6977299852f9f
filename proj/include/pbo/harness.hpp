#pragma once
// Schedulers, runs, reduction graphs and the metatheory checkers.

#include <random>

#include "pbo/runtime.hpp"

namespace pbo {

class Scheduler {
 public:
  enum Kind { Random, First, Last, RoundRobin, Scripted };
  static Scheduler random(uint64_t seed);
  static Scheduler first();
  static Scheduler last();
  static Scheduler round_robin();
  static Scheduler scripted(std::vector<size_t> script);

  size_t pick(const std::vector<Redex>& rs);
  Kind kind() const { return kind_; }
  std::string describe() const;

 private:
  Kind kind_ = First;
  uint64_t seed_ = 0;
  std::mt19937_64 rng_;
  size_t counter_ = 0;
  std::vector<size_t> script_;
};

struct Outcome {
  enum Kind { ReturnedInt, NormalValue, BlackHole, BudgetExhausted, Stuck, SeparationViolation } kind = Stuck;
  int64_t value = 0;          // ReturnedInt
  std::string detail;         // shape summary / diagnostic / digest
  std::vector<Sym> cycle;     // BlackHole
  size_t steps = 0;
};
const char* outcome_name(Outcome::Kind k);
std::string describe(const Outcome& o);

struct TraceRecord {
  size_t step_index = 0;
  std::string rule;
  Sym target = 0;
  std::vector<std::pair<Sym, TermP>> env_delta;
  std::vector<std::pair<int64_t, std::optional<Sym>>> mem_delta;
  std::vector<int64_t> bids_delta;
  struct HistEvent {
    Sym token;
    HistoryP before;  // may be null
    HistoryP after;
  };
  std::vector<HistEvent> history_events;
};

struct RunResult {
  Outcome outcome;
  Config final;
  std::vector<TraceRecord> trace;
  std::map<int64_t, size_t> alloc_step;  // location -> step that allocated it
};

RunResult run(const Program& p, Sem sem, Scheduler& sched, size_t budget, bool record_trace = false);
// Same, starting from an explicit configuration.
RunResult run_config(Config c, Sem sem, Scheduler& sched, size_t budget, bool record_trace = false);

// Classify a configuration with no further progress, or nullopt if it can step.
std::optional<Outcome> terminal_outcome(const Config& c, Sem sem);

size_t node_cap_from_env(size_t dflt = 100000);

struct GraphNode {
  Hash128 key{};
  int depth = 0;
  bool expanded = false;
  bool normal = false;
  bool stuck = false;
  std::string error;  // StepError on some outgoing rule
  std::vector<std::pair<size_t, std::string>> succ;  // (node, rule), deduplicated by node
};

struct ReductionGraph {
  std::vector<GraphNode> nodes;
  size_t edges = 0;
  int max_depth = 0;
  bool aborted = false;  // node cap exceeded
  std::map<size_t, Config> kept;  // configurations retained for reporting
};

struct GraphOptions {
  int depth = 20;
  size_t node_cap = 100000;
  bool keep_configs = false;
};

ReductionGraph reduction_graph(const Program& p, Sem sem, const GraphOptions& opt);
ReductionGraph reduction_graph_from(const Config& c0, Sem sem, const GraphOptions& opt);

struct Violation {
  std::string kind;
  std::string message;
  std::vector<std::string> configs;  // dumps
};

struct Report {
  std::string check;
  std::string program;
  std::map<std::string, std::string> parameters;
  std::string verdict;  // PASS | FAIL | ABORTED
  std::vector<Violation> violations;
  size_t nodes = 0, edges = 0, runs = 0;
  int max_depth = 0;
  double wall_ms = 0;
  // check-specific
  std::vector<int64_t> values;             // uniqueness: distinct returned integers
  std::map<std::string, size_t> outcomes;  // outcome kind -> count
  size_t residues = 0;                     // leak: residual locations over all runs
  size_t stuck = 0;                        // runs or graph nodes that are Stuck
};

Report check_diamond(const Program& p, const std::string& name, int depth, size_t node_cap);
Report check_leak_freedom(const Program& p, const std::string& name, size_t n_schedules, size_t budget,
                          uint64_t seed0 = 1);
Report check_behavior_uniqueness(const Program& p, const std::string& name, size_t n_schedules,
                                 size_t budget, uint64_t seed0 = 1);

// Worked-example shape: run until the result of the (single) execBO first is
// a pair (token, borrower), then match the state against the expected one:
//   mutative       b = 7, token •, borrower Ref ℓ, memory ℓ ↦ b
//   denotational   b = 7, token •_{β ↦ b}, borrower Mut^β(Ref b), bids {β}
struct ExampleCheck {
  bool ok = false;
  size_t step = 0;
  std::string detail;
};
ExampleCheck check_worked_example(const Program& p, Sem sem, Scheduler& sched, size_t budget = 5000);

}  // namespace pbo
