#include <catch_amalgamated.hpp>

#include "pbo/corpus.hpp"
#include "pbo/harness.hpp"
#include "pbo/syntax.hpp"

using namespace pbo;

namespace {
Sym v(const char* s) { return intern(s); }

Program corpus_program(const std::string& name) {
  for (auto& e : load_corpus(default_corpus_dir()))
    if (e.name == name) return parse_program(e.source);
  FAIL("missing corpus entry " << name);
  return {};
}

// Fire the only redex at x; fails the test when x has none.
Config fire_at(const Config& c, Sym x, Sem s) {
  for (auto& r : enumerate_redexes(c, s))
    if (r.target == x) return step(c, r, s);
  FAIL("no redex at " << name_of(x));
  return c;
}

Config cfg(std::initializer_list<std::pair<Sym, TermP>> bs, Sym root) {
  Config c;
  for (auto& [x, t] : bs) c.env[x] = t;
  c.root = root;
  c.next = 50;
  return c;
}
}  // namespace

TEST_CASE("reduce example returns 7 in both semantics", "[semantics]") {
  Program p = corpus_program("reduce_example");
  for (Sem s : {Sem::Mut, Sem::Den}) {
    for (uint64_t seed = 1; seed <= 5; ++seed) {
      Scheduler sch = Scheduler::random(seed);
      RunResult r = run(p, s, sch, 5000);
      INFO(sem_name(s) << " seed " << seed << ": " << describe(r.outcome));
      CHECK(r.outcome.kind == Outcome::ReturnedInt);
      CHECK(r.outcome.value == 7);
      if (s == Sem::Mut) CHECK(r.final.mem.empty());
    }
  }
}

TEST_CASE("worked example state after execBO", "[semantics]") {
  Program p = corpus_program("reduce_example");
  for (Sem s : {Sem::Mut, Sem::Den}) {
    Scheduler sch = Scheduler::first();
    ExampleCheck ex = check_worked_example(p, s, sch);
    INFO(ex.detail);
    CHECK(ex.ok);
  }
}

TEST_CASE("joinMut concatenates borrower paths", "[semantics]") {
  Path pi{1, {}}, rho{2, {0}};
  Config c = cfg({{v("c"), tm::lit(1)},
                  {v("p"), tm::wrap(Bcon::Mut, {pi}, tm::wrap(Bcon::Mut, {rho}, tm::ref_var(v("c"))))},
                  {v("x"), tm::op(Op::JoinMut, {tm::var(v("p"))})}},
                 v("x"));
  Config d = fire_at(c, v("x"), Sem::Den);
  TermP t = d.env.at(v("x"));
  REQUIRE(t->tag == Term::Wrap);
  CHECK(t->bcon == Bcon::Mut);
  CHECK(t->paths == std::vector<Path>{pi, rho});
  REQUIRE(t->args[0]->tag == Term::RefVar);
  CHECK(t->args[0]->x == v("c"));
  // shared outside: the inner borrower becomes shared
  c.env[v("p")] = tm::wrap(Bcon::Share, {}, tm::wrap(Bcon::Mut, {rho}, tm::ref_var(v("c"))));
  t = fire_at(c, v("x"), Sem::Den).env.at(v("x"));
  REQUIRE(t->tag == Term::Wrap);
  CHECK(t->bcon == Bcon::Share);
  CHECK(t->args[0]->tag == Term::RefVar);
}

TEST_CASE("case on a borrowed pair distributes the borrower", "[semantics]") {
  Path pi{1, {}};
  Config c = cfg({{v("a"), tm::ref_var(v("ca"))},
                  {v("b"), tm::ref_var(v("cb"))},
                  {v("ca"), tm::lit(1)},
                  {v("cb"), tm::lit(2)},
                  {v("p"), tm::wrap(Bcon::Mut, {pi}, tm::con(names::pair(), {tm::var(v("a")), tm::var(v("b"))}))},
                  {v("x"), erase(parse_program("case p of { (u, w) -> (u, w) }").body)}},
                 v("x"));
  Config d = fire_at(c, v("x"), Sem::Den);
  TermP body = d.env.at(v("x"));
  REQUIRE(body->tag == Term::Con);
  REQUIRE(body->args.size() == 2);
  for (int i = 0; i < 2; ++i) {
    TermP f = d.env.at(body->args[size_t(i)]->x);
    REQUIRE(f->tag == Term::Wrap);
    CHECK(f->bcon == Bcon::Mut);
    CHECK(f->paths == std::vector<Path>{Path{1, {i}}});
    REQUIRE(f->args[0]->tag == Term::Var);
    CHECK(f->args[0]->x == (i == 0 ? v("a") : v("b")));
  }
}

TEST_CASE("reclaim restores the cell from the end token's history", "[semantics]") {
  auto h = std::make_shared<const History>(History{{Path{1, {}}, v("b")}});
  Config c = cfg({{v("c"), tm::lit(3)},
                  {v("b"), tm::lit(7)},
                  {v("orig"), tm::ref_var(v("c"))},
                  {v("l"), tm::lend(1, v("orig"))},
                  {v("e"), tm::tok_h(h)},
                  {v("x"), tm::op(Op::Reclaim, {tm::var(v("l")), tm::var(v("e"))})}},
                 v("x"));
  c.bids = {1};
  Config d = fire_at(c, v("x"), Sem::Den);
  TermP r = chase(d, v("x"));
  REQUIRE(r);
  REQUIRE(r->tag == Term::RefVar);
  CHECK(r->x == v("b"));
  // the original cell binding is untouched
  CHECK(d.env.at(v("orig"))->x == v("c"));
}

TEST_CASE("forcing loops are black holes", "[semantics]") {
  Program p = corpus_program("blackhole");
  for (Sem s : {Sem::Mut, Sem::Den}) {
    Scheduler sch = Scheduler::first();
    RunResult r = run(p, s, sch, 1000);
    INFO(describe(r.outcome));
    CHECK(r.outcome.kind == Outcome::BlackHole);
    CHECK_FALSE(r.outcome.cycle.empty());
  }
}

TEST_CASE("unbounded recursion exhausts the budget", "[semantics]") {
  Program p = corpus_program("omega");
  for (Sem s : {Sem::Mut, Sem::Den}) {
    Scheduler sch = Scheduler::random(3);
    RunResult r = run(p, s, sch, 300);
    CHECK(r.outcome.kind == Outcome::BudgetExhausted);
    CHECK(r.outcome.steps == 300);
  }
}

TEST_CASE("normal forms", "[semantics]") {
  Program p = parse_program("42");
  for (Sem s : {Sem::Mut, Sem::Den}) {
    Config c = initial_config(p);
    CHECK_FALSE(is_normal_form(c, s));
    Scheduler sch = Scheduler::first();
    RunResult r = run(p, s, sch, 100);
    CHECK(r.outcome.kind == Outcome::ReturnedInt);
    CHECK(r.outcome.value == 42);
    CHECK(is_normal_form(r.final, s));
    CHECK(enumerate_redexes(r.final, s).empty());
  }
  // a lambda result is a value but not an integer
  Program q = parse_program("\\x. x");
  Scheduler sch = Scheduler::first();
  CHECK(run(q, Sem::Den, sch, 100).outcome.kind == Outcome::NormalValue);
}

TEST_CASE("every scheduler agrees on the corpus", "[semantics]") {
  for (auto& e : load_corpus(default_corpus_dir())) {
    if (e.suite != "positive" || !e.returns) continue;
    Program p = parse_program(e.source);
    for (Sem s : {Sem::Mut, Sem::Den}) {
      for (Scheduler sch : {Scheduler::first(), Scheduler::last(), Scheduler::round_robin(), Scheduler::random(9)}) {
        RunResult r = run(p, s, sch, 5000);
        INFO(e.name << " " << sem_name(s) << " " << sch.describe() << ": " << describe(r.outcome));
        CHECK(r.outcome.kind == Outcome::ReturnedInt);
        CHECK(r.outcome.value == *e.returns);
      }
    }
  }
}

TEST_CASE("canonical form ignores runtime names", "[semantics]") {
  Sym c1 = runtime_sym(v("c"), 3), x1 = runtime_sym(v("x"), 4);
  Sym c2 = runtime_sym(v("c"), 11), x2 = runtime_sym(v("x"), 12);
  Config a = cfg({{c1, tm::lit(1)}, {x1, tm::ref_var(c1)}}, x1);
  Config b = cfg({{c2, tm::lit(1)}, {x2, tm::ref_var(c2)}}, x2);
  CHECK(canonical(a) == canonical(b));
  CHECK(canonical_hash(a) == canonical_hash(b));
  b.env[c2] = tm::lit(2);
  CHECK(canonical_hash(a) != canonical_hash(b));
}
