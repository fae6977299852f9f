#include <catch_amalgamated.hpp>

#include "oracles.hpp"
#include "pbo/history.hpp"
#include "pbo/syntax.hpp"

using namespace pbo;
namespace o = pbo::oracle;

namespace {
Path P(int64_t bid, std::vector<int> idx = {}) { return Path{bid, std::move(idx)}; }
Sym v(const char* s) { return intern(s); }

bool disjoint(const History& a, const History& b) {
  for (auto& [p, _] : a)
    if (b.count(p)) return false;
  return true;
}
std::optional<History> try_par(const History& a, const History& b) {
  try {
    return hist_par(a, b);
  } catch (const DisjointnessError&) {
    return std::nullopt;
  }
}
}  // namespace

TEST_CASE("sequential composition", "[history]") {
  CHECK(hist_seq({{P(1), v("x")}}, {{P(1), v("y")}}) == History{{P(1), v("y")}});
  History h{{P(1, {0}), v("x")}, {P(2), v("y")}};
  CHECK(hist_seq({}, h) == h);
  CHECK(hist_seq({{P(1), v("x")}}, {{P(2), v("y")}}) == History{{P(1), v("x")}, {P(2), v("y")}});
}

TEST_CASE("parallel composition", "[history]") {
  CHECK(hist_par({{P(1), v("x")}}, {{P(2), v("y")}}) == History{{P(1), v("x")}, {P(2), v("y")}});
  History h{{P(1, {1}), v("x")}};
  CHECK(hist_par({}, h) == h);
  CHECK_THROWS_AS(hist_par({{P(1), v("x")}}, {{P(1), v("y")}}), DisjointnessError);
  // a path and its extension are different records
  CHECK(hist_par({{P(1), v("x")}}, {{P(1, {0}), v("y")}}).size() == 2);
}

TEST_CASE("restriction and domain", "[history]") {
  History h{{P(1, {0}), v("x")}, {P(2), v("y")}};
  CHECK(hist_restrict(h, P(1)) == History{{P(1, {0}), v("x")}});
  CHECK(hist_restrict({}, P(1)).empty());
  CHECK(hist_restrict({{P(1), v("x")}}, P(1)) == History{{P(1), v("x")}});
  CHECK(hist_restrict({{P(1, {1}), v("x")}, {P(1, {0, 1}), v("y")}}, P(1, {0})) == History{{P(1, {0, 1}), v("y")}});
  CHECK(hist_domain({{P(1), v("x")}, {P(2), v("y")}}) == std::set<Path>{P(1), P(2)});
  CHECK(hist_domain({}).empty());
  CHECK(hist_touches(h, P(1)));
  CHECK_FALSE(hist_touches(h, P(1, {1})));
  CHECK(print_path(P(3, {0, 1})) == "b3.0.1");
}

TEST_CASE("history laws on random histories", "[history][property]") {
  o::Rng r(21);
  int cases = 0, disjoint_pairs = 0;
  for (int i = 0; i < 1200; ++i) {
    History a = o::random_history(r), b = o::random_history(r), c = o::random_history(r);
    Path p = o::random_path(r);
    // seq: associativity, unit, domain union, latest record wins
    CHECK(hist_seq(hist_seq(a, b), c) == hist_seq(a, hist_seq(b, c)));
    CHECK(hist_seq({}, a) == a);
    CHECK(hist_seq(a, {}) == a);
    std::set<Path> dom = hist_domain(a);
    for (auto& q : hist_domain(b)) dom.insert(q);
    CHECK(hist_domain(hist_seq(a, b)) == dom);
    for (auto& [q, x] : hist_seq(a, b)) CHECK(x == (b.count(q) ? b.at(q) : a.at(q)));
    // par: defined exactly on disjoint domains, commutative, associative, unit
    auto ab = try_par(a, b);
    CHECK(bool(ab) == disjoint(a, b));
    CHECK(bool(try_par(b, a)) == bool(ab));
    if (ab) {
      ++disjoint_pairs;
      CHECK(*ab == *try_par(b, a));
      CHECK(*ab == hist_seq(a, b));
      auto ab_c = try_par(*ab, c), bc = try_par(b, c);
      if (ab_c && bc) CHECK(*ab_c == *try_par(a, *bc));
    }
    CHECK(*try_par({}, a) == a);
    // restriction: subset, idempotent, exactly the extensions of p
    History ra = hist_restrict(a, p);
    for (auto& [q, x] : ra) CHECK((a.count(q) && a.at(q) == x && q.extends(p)));
    for (auto& [q, x] : a)
      if (q.extends(p)) CHECK(ra.count(q));
    CHECK(hist_restrict(ra, p) == ra);
    CHECK(hist_touches(a, p) == !ra.empty());
    ++cases;
  }
  CHECK(cases >= 1000);
  CHECK(disjoint_pairs > 50);
}

// ---- restoration --------------------------------------------------------------------

namespace {
Config env_of(std::initializer_list<std::pair<const char*, TermP>> bs) {
  Config c;
  for (auto& [x, t] : bs) c.env[intern(x)] = t;
  c.next = 100;
  return c;
}
}  // namespace

TEST_CASE("restoration: untouched value is returned as is", "[history][restore]") {
  Config c = env_of({{"orig", tm::ref_var(v("c"))}, {"c", tm::lit(3)}});
  auto [c2, r] = restore_by_history({}, P(1), c, v("orig"));
  CHECK(r == v("orig"));
  CHECK(c2.env.size() == c.env.size());
}

TEST_CASE("restoration: recorded reference gets the recorded content", "[history][restore]") {
  Config c = env_of({{"orig", tm::ref_var(v("c"))}, {"c", tm::lit(3)}, {"b", tm::lit(7)}});
  auto [c2, r] = restore_by_history({{P(1), v("b")}}, P(1), c, v("orig"));
  CHECK(r != v("orig"));
  TermP t = c2.env.at(r);
  REQUIRE(t->tag == Term::RefVar);
  CHECK(t->x == v("b"));
  CHECK(o::materialize(c2, r) == o::VTree{o::VTree::Ref, 0, {o::VTree{o::VTree::Lit, 7, {}}}});
}

TEST_CASE("restoration: record below a pair field", "[history][restore]") {
  Config c = env_of({{"orig", tm::con(names::pair(), {tm::var(v("x0")), tm::var(v("x1"))})},
                     {"x0", tm::lit(1)},
                     {"x1", tm::ref_var(v("c"))},
                     {"c", tm::lit(2)},
                     {"y", tm::lit(9)}});
  auto [c2, r] = restore_by_history({{P(1, {1}), v("y")}}, P(1), c, v("orig"));
  TermP t = c2.env.at(r);
  REQUIRE(t->tag == Term::Con);
  CHECK(t->args[0]->x == v("x0"));  // untouched field is shared
  CHECK(t->args[1]->x != v("x1"));
  CHECK(o::show(o::materialize(c2, r)) == "(1, Ref 9)");
}

TEST_CASE("restoration: record at a non-reference is stuck", "[history][restore]") {
  Config c = env_of({{"orig", tm::lit(1)}, {"b", tm::lit(7)}});
  CHECK_THROWS_AS(restore_by_history({{P(1), v("b")}}, P(1), c, v("orig")), StepError);
}

TEST_CASE("restoration agrees with the replay oracle", "[history][restore][property]") {
  o::Rng r(22);
  int cases = 0, with_records = 0;
  for (int i = 0; i < 600; ++i) {
    o::RestoreCase rc = o::random_restore_case(r);
    REQUIRE(rc.depth <= 4);
    REQUIRE(rc.records <= 6);
    auto [c2, root] = restore_by_history(rc.h, rc.at, rc.cfg, rc.root);
    o::VTree got = o::materialize(c2, root);
    INFO("input " << o::show(o::materialize(rc.cfg, rc.root)) << " history " << print_history(rc.h));
    CHECK(o::show(got) == o::show(rc.expected));
    CHECK(got == rc.expected);
    // the input value itself is never modified
    CHECK(o::materialize(c2, rc.root) == o::materialize(rc.cfg, rc.root));
    ++cases;
    if (!rc.h.empty()) ++with_records;
  }
  CHECK(cases >= 500);
  CHECK(with_records > 200);  // generator coverage, not a tolerance
}
