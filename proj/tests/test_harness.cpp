#include <catch_amalgamated.hpp>

#include <cstdlib>

#include "pbo/corpus.hpp"
#include "pbo/harness.hpp"
#include "pbo/syntax.hpp"

using namespace pbo;

namespace {
Program corpus_program(const std::string& name) {
  for (auto& e : load_corpus(default_corpus_dir()))
    if (e.name == name) return parse_program(e.source);
  FAIL("missing corpus entry " << name);
  return {};
}
GraphOptions opts(int depth, size_t cap = 100000) {
  GraphOptions o;
  o.depth = depth;
  o.node_cap = cap;
  return o;
}
}  // namespace

TEST_CASE("graph of a literal", "[harness][graph]") {
  Program p = parse_program("42");
  for (Sem s : {Sem::Mut, Sem::Den}) {
    ReductionGraph g = reduction_graph(p, s, opts(20));
    CHECK(g.nodes.size() == 2);  // root lookup, then done
    CHECK(g.edges == 1);
    CHECK(g.nodes[1].normal);
    CHECK_FALSE(g.aborted);
    ReductionGraph g0 = reduction_graph(p, s, opts(0));
    CHECK(g0.nodes.size() == 1);
    CHECK(g0.edges == 0);
  }
}

TEST_CASE("independent redexes form a diamond", "[harness][graph]") {
  Program p = parse_program("let1 a = 1 + 2 in let1 b = 3 + 4 in a + b");
  ReductionGraph g = reduction_graph(p, Sem::Den, opts(30));
  CHECK_FALSE(g.aborted);
  bool diamond = false;
  for (auto& n : g.nodes) {
    if (n.succ.size() < 2) continue;
    std::set<size_t> s0, s1;
    for (auto& x : g.nodes[n.succ[0].first].succ) s0.insert(x.first);
    for (auto& x : g.nodes[n.succ[1].first].succ) diamond = diamond || s0.count(x.first);
  }
  CHECK(diamond);
  Report r = check_diamond(p, "diamond", 20, 100000);
  CHECK(r.verdict == "PASS");
  CHECK(r.stuck == 0);
}

TEST_CASE("node cap aborts exploration", "[harness][graph]") {
  Program p = corpus_program("par_disjoint");
  ReductionGraph g = reduction_graph(p, Sem::Den, opts(20, 5));
  CHECK(g.aborted);
  CHECK(g.nodes.size() <= 6);
  CHECK(check_diamond(p, "par_disjoint", 20, 5).verdict == "ABORTED");
  setenv("PBO_NODE_CAP", "17", 1);
  CHECK(node_cap_from_env() == 17);
  unsetenv("PBO_NODE_CAP");
  CHECK(node_cap_from_env(123) == 123);
}

TEST_CASE("diamond holds on positive corpus entries", "[harness][diamond]") {
  for (auto& e : load_corpus(default_corpus_dir())) {
    if (e.suite != "positive") continue;
    Report r = check_diamond(parse_program(e.source), e.name, 20, 100000);
    INFO(e.name);
    CHECK(r.verdict == "PASS");
    CHECK(r.stuck == 0);
    CHECK(r.nodes > 1);
  }
}

// depth 20 only reaches the first few rules; these graphs are small enough to exhaust
TEST_CASE("diamond holds on the whole reachable graph", "[harness][diamond]") {
  for (auto& e : load_corpus(default_corpus_dir())) {
    if (e.suite != "positive") continue;
    Report r = check_diamond(parse_program(e.source), e.name, 1000, 100000);
    INFO(e.name);
    CHECK(r.verdict == "PASS");
    CHECK(r.stuck == 0);
    CHECK(r.max_depth < 1000);  // exhausted, not cut off
  }
}

TEST_CASE("leak freedom", "[harness][leak]") {
  Report ok = check_leak_freedom(corpus_program("reduce_example"), "reduce_example", 20, 5000);
  CHECK(ok.verdict == "PASS");
  CHECK(ok.residues == 0);
  CHECK(ok.runs == 20);
  // the leaking program only runs when checking is skipped
  Report bad = check_leak_freedom(corpus_program("leak"), "leak", 10, 5000);
  CHECK(bad.verdict == "FAIL");
  CHECK(bad.residues == 10);
  REQUIRE_FALSE(bad.violations.empty());
  CHECK(bad.violations[0].kind == "Leak");
}

TEST_CASE("behavior uniqueness", "[harness][uniq]") {
  Report r = check_behavior_uniqueness(corpus_program("par_disjoint"), "par_disjoint", 30, 5000);
  CHECK(r.verdict == "PASS");
  CHECK(r.values == std::vector<int64_t>{38});
  CHECK(r.runs == 60);
  Report d = check_behavior_uniqueness(corpus_program("blackhole"), "blackhole", 5, 1000);
  CHECK(d.verdict == "PASS");
  CHECK(d.values.empty());
}

TEST_CASE("seeded schedulers are deterministic", "[harness][scheduler]") {
  Program p = corpus_program("par_disjoint");
  for (Sem s : {Sem::Mut, Sem::Den}) {
    Scheduler a = Scheduler::random(42), b = Scheduler::random(42);
    RunResult ra = run(p, s, a, 5000, true), rb = run(p, s, b, 5000, true);
    REQUIRE(ra.trace.size() == rb.trace.size());
    for (size_t i = 0; i < ra.trace.size(); ++i) {
      CHECK(ra.trace[i].rule == rb.trace[i].rule);
      CHECK(ra.trace[i].target == rb.trace[i].target);
    }
    CHECK(canonical(ra.final) == canonical(rb.final));
  }
  Scheduler x = Scheduler::scripted({1, 0, 5});
  std::vector<Redex> rs(3);
  CHECK(x.pick(rs) == 1);
  CHECK(x.pick(rs) == 0);
  CHECK(x.pick(rs) == 2);  // out of range entries wrap around
}

TEST_CASE("sampled runs stay inside the explored graph", "[harness][graph]") {
  // every configuration a scheduled run visits within the depth bound is a graph node
  Program p = corpus_program("reduce_example");
  const int depth = 25;
  ReductionGraph g = reduction_graph(p, Sem::Den, opts(depth));
  REQUIRE_FALSE(g.aborted);
  std::set<Hash128> keys;
  for (auto& n : g.nodes) keys.insert(n.key);
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    Scheduler s = Scheduler::random(seed);
    Config c = initial_config(p);
    for (int i = 0; i <= depth; ++i) {
      CHECK(keys.count(canonical_hash(c)));
      auto rs = enumerate_redexes(c, Sem::Den);
      if (rs.empty()) break;
      c = step(c, rs[s.pick(rs)], Sem::Den);
    }
  }
}

TEST_CASE("worked example matches in both semantics", "[harness][example]") {
  Program p = corpus_program("reduce_example");
  for (Sem s : {Sem::Mut, Sem::Den})
    for (uint64_t seed = 1; seed <= 5; ++seed) {
      Scheduler sch = Scheduler::random(seed);
      ExampleCheck ex = check_worked_example(p, s, sch);
      INFO(sem_name(s) << " seed " << seed << ": " << ex.detail);
      CHECK(ex.ok);
      CHECK(ex.step > 0);
    }
  // same shape but adding 5 stores 8, not 7
  std::string src;
  for (auto& e : load_corpus(default_corpus_dir()))
    if (e.name == "reduce_example") src = e.source;
  auto at = src.find("a + 4");
  REQUIRE(at != std::string::npos);
  src.replace(at, 5, "a + 5");
  Program q = parse_program(src);
  for (Sem s : {Sem::Mut, Sem::Den}) {
    Scheduler sch = Scheduler::first();
    CHECK_FALSE(check_worked_example(q, s, sch).ok);
  }
}
