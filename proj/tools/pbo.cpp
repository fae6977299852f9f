// pbo: command-line front end. Every command prints one JSON document.
// Exit codes: 0 success / PASS, 1 type error or failed check, 2 parse or usage error.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "pbo/corpus.hpp"
#include "pbo/harness.hpp"
#include "pbo/report.hpp"
#include "pbo/syntax.hpp"
#include "pbo/types.hpp"

using namespace pbo;

namespace {

struct Loaded {
  Program prog;
  std::string name;
};

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

// Parse and (unless unsafe) check. On failure prints diagnostics and returns the exit code.
std::optional<Loaded> load(const std::string& file, bool unsafe, int& code) {
  std::ifstream in(file, std::ios::binary);
  if (!in) {
    emit({{"file", file}, {"ok", false}, {"diagnostics", json::array({{{"code", "IOError"}, {"message", "cannot read " + file}, {"span", {{"line", 0}, {"col", 0}}}}})}});
    code = 2;
    return std::nullopt;
  }
  std::stringstream ss;
  ss << in.rdbuf();
  Loaded l;
  l.name = file;
  try {
    l.prog = parse_program(ss.str());
  } catch (const ParseError& e) {
    emit({{"file", file}, {"ok", false}, {"diagnostics", json::array({diagnostic_json({e.code, e.what(), e.line, e.col})})}});
    code = 2;
    return std::nullopt;
  }
  if (!unsafe) {
    CheckResult r = type_check(l.prog);
    if (!r.ok) {
      json d = json::array();
      for (auto& x : r.diagnostics) d.push_back(diagnostic_json(x));
      emit({{"file", file}, {"ok", false}, {"diagnostics", d}});
      code = 1;
      return std::nullopt;
    }
  }
  return l;
}

Sem parse_sem(const std::string& s) { return s == "den" ? Sem::Den : Sem::Mut; }

Scheduler make_scheduler(const std::string& kind, uint64_t seed, const std::string& script) {
  if (kind == "first") return Scheduler::first();
  if (kind == "last") return Scheduler::last();
  if (kind == "round-robin") return Scheduler::round_robin();
  if (kind == "scripted") {
    std::vector<size_t> v;
    std::stringstream ss(script);
    std::string tok;
    while (std::getline(ss, tok, ',')) v.push_back(std::stoul(tok));
    return Scheduler::scripted(v);
  }
  return Scheduler::random(seed);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reference interpreter and metatheory harness for the pure borrow core calculus"};
  app.require_subcommand(1);

  std::string file, semantics = "mut", scheduler = "seeded-random", script, trace_out, suite = "all", dir;
  uint64_t seed = 1;
  size_t budget = 5000, schedules = 100;
  int depth = 20;
  bool unsafe = false, with_nodes = false;

  auto* check = app.add_subcommand("check", "parse and type-check a program");
  check->add_option("file", file)->required();

  auto* runc = app.add_subcommand("run", "run a program under one scheduler");
  runc->add_option("file", file)->required();
  runc->add_option("--semantics", semantics)->check(CLI::IsMember({"mut", "den"}));
  runc->add_option("--seed", seed);
  runc->add_option("--scheduler", scheduler)->check(CLI::IsMember({"seeded-random", "first", "last", "round-robin", "scripted"}));
  runc->add_option("--script", script, "comma-separated redex indices for --scheduler scripted");
  runc->add_option("--budget", budget);
  runc->add_option("--trace", trace_out, "write the trace as JSON lines");
  runc->add_flag("--unsafe", unsafe, "skip type checking");

  auto* conf = app.add_subcommand("confluence", "diamond check on the denotational reduction graph");
  conf->add_option("file", file)->required();
  conf->add_option("--depth", depth);
  conf->add_flag("--unsafe", unsafe);

  auto* uniq = app.add_subcommand("uniq", "behavior uniqueness across schedules and both semantics");
  uniq->add_option("file", file)->required();
  uniq->add_option("--schedules", schedules);
  uniq->add_option("--budget", budget);
  uniq->add_option("--seed", seed);
  uniq->add_flag("--unsafe", unsafe);

  auto* leak = app.add_subcommand("leak", "memory is empty in every mutative normal form");
  leak->add_option("file", file)->required();
  leak->add_option("--schedules", schedules);
  leak->add_option("--budget", budget);
  leak->add_option("--seed", seed);
  leak->add_flag("--unsafe", unsafe);

  auto* graph = app.add_subcommand("graph", "explore the reduction graph");
  graph->add_option("file", file)->required();
  graph->add_option("--semantics", semantics)->check(CLI::IsMember({"mut", "den"}));
  graph->add_option("--depth", depth);
  graph->add_flag("--nodes", with_nodes, "include node and edge lists");
  graph->add_flag("--unsafe", unsafe);

  auto* corpus = app.add_subcommand("corpus", "check every corpus entry against its expectations");
  corpus->add_option("--suite", suite)->check(CLI::IsMember({"all", "positive", "negative", "metatheory"}));
  corpus->add_option("--dir", dir);
  corpus->add_option("--schedules", schedules);
  corpus->add_option("--depth", depth);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  size_t cap = node_cap_from_env();
  int code = 0;

  if (*check) {
    auto l = load(file, false, code);
    if (!l) return code;
    CheckResult r = type_check(l->prog);
    emit({{"file", file}, {"ok", true}, {"type", print_type(r.type)}, {"diagnostics", json::array()}});
    return 0;
  }

  if (*corpus) {
    if (dir.empty()) dir = default_corpus_dir();
    CorpusOptions o;
    o.schedules = schedules;
    o.depth = depth;
    o.node_cap = cap;
    std::vector<CorpusEntry> entries;
    try {
      entries = load_corpus(dir);
    } catch (const std::exception& e) {
      emit({{"error", e.what()}});
      return 2;
    }
    json rows = json::array();
    size_t passed = 0, failed = 0;
    for (auto& e : entries)
      for (auto& x : run_expectations(e, suite, o)) {
        (x.pass ? passed : failed)++;
        rows.push_back({{"entry", x.entry}, {"check", x.check}, {"expected", x.expected}, {"actual", x.actual},
                        {"verdict", x.pass ? "PASS" : "FAIL"}});
      }
    emit({{"suite", suite}, {"dir", dir}, {"results", rows}, {"passed", passed}, {"failed", failed}});
    return failed ? 1 : 0;
  }

  auto l = load(file, unsafe, code);
  if (!l) return code;

  if (*runc) {
    Scheduler s = make_scheduler(scheduler, seed, script);
    RunResult rr = run(l->prog, parse_sem(semantics), s, budget, !trace_out.empty());
    if (!trace_out.empty()) {
      std::ofstream out(trace_out);
      for (auto& r : rr.trace) out << trace_record_json(r, parse_sem(semantics)).dump() << "\n";
    }
    emit({{"program", file}, {"semantics", semantics}, {"scheduler", s.describe()}, {"budget", budget},
          {"outcome", outcome_json(rr.outcome)}});
    bool bad = rr.outcome.kind == Outcome::Stuck || rr.outcome.kind == Outcome::SeparationViolation;
    return bad ? 1 : 0;
  }

  Report rep;
  if (*conf) rep = check_diamond(l->prog, file, depth, cap);
  if (*uniq) rep = check_behavior_uniqueness(l->prog, file, schedules, budget, seed);
  if (*leak) rep = check_leak_freedom(l->prog, file, schedules, budget, seed);
  if (*graph) {
    GraphOptions go;
    go.depth = depth;
    go.node_cap = cap;
    go.keep_configs = with_nodes;
    ReductionGraph g = reduction_graph(l->prog, parse_sem(semantics), go);
    json j = graph_json(g, with_nodes);
    j["program"] = file;
    j["semantics"] = semantics;
    j["depth"] = depth;
    j["node_cap"] = cap;
    if (g.aborted) j["error"] = "ExplosionAbort";
    emit(j);
    return g.aborted ? 1 : 0;
  }
  emit(report_json(rep));
  return rep.verdict == "PASS" ? 0 : 1;
}
