// Checking corpus expectations against the checker and the harness.

#include "pbo/corpus.hpp"
#include "pbo/harness.hpp"
#include "pbo/syntax.hpp"
#include "pbo/types.hpp"

namespace pbo {

namespace {

std::string check_actual(const Program& p) {
  CheckResult r = type_check(p);
  return r.ok ? "ok" : r.diagnostics.front().code;
}

}  // namespace

std::vector<Expectation> run_expectations(const CorpusEntry& e, const std::string& suite, const CorpusOptions& o) {
  std::vector<Expectation> out;
  auto add = [&](std::string check, std::string expected, std::string actual) {
    bool pass = expected == actual;
    out.push_back({e.name, std::move(check), std::move(expected), std::move(actual), pass});
  };
  bool all = suite == "all";
  bool pos = e.suite == "positive", neg = e.suite == "negative";
  bool basic = (all || suite == "positive") && pos;
  bool negs = (all || suite == "negative") && neg;
  bool meta = (all || suite == "metatheory") && pos;
  if (!basic && !negs && !meta) return out;

  Program p;
  try {
    p = parse_program(e.source);
  } catch (const ParseError& err) {
    add("parse", "ok", err.code);
    return out;
  }

  if (basic || negs) add("typecheck", e.check, check_actual(p));

  if (basic && e.returns) {
    for (Sem sem : {Sem::Mut, Sem::Den}) {
      Scheduler s = Scheduler::random(o.seed);
      RunResult rr = run(p, sem, s, o.budget);
      add(std::string("returns/") + sem_name(sem), "ReturnedInt " + std::to_string(*e.returns), describe(rr.outcome));
    }
  }
  if (basic && e.diverges) {
    Scheduler s = Scheduler::random(o.seed);
    RunResult rr = run(p, Sem::Mut, s, o.budget);
    bool div = rr.outcome.kind == Outcome::BlackHole || rr.outcome.kind == Outcome::BudgetExhausted;
    add("diverges", "BlackHole|BudgetExhausted", div ? "BlackHole|BudgetExhausted" : describe(rr.outcome));
  }
  if ((negs && e.leak) || (meta && !e.diverges)) {
    Report r = check_leak_freedom(p, e.name, o.schedules, o.budget, o.seed);
    size_t want = e.leak.value_or(0);
    // the expected residue is per run; every terminating run must show it
    size_t normal = r.outcomes["ReturnedInt"] + r.outcomes["NormalValue"];
    add("leak", std::to_string(want), normal ? std::to_string(r.residues / normal) +
                                                   (r.residues % normal ? "+" : "")
                                             : "no normal form");
  }
  if (meta) {
    Report d = check_diamond(p, e.name, o.depth, o.node_cap);
    add("diamond", "PASS", d.verdict);
    if (e.returns) {
      Report u = check_behavior_uniqueness(p, e.name, o.schedules, o.budget, o.seed);
      std::string got = u.verdict;
      if (u.values.size() == 1) got += " " + std::to_string(u.values[0]);
      add("uniq", "PASS " + std::to_string(*e.returns), got);
    }
  }
  return out;
}

}  // namespace pbo
