#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "pbo/corpus.hpp"
#include "pbo/syntax.hpp"

using namespace pbo;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string parse_error_code(const std::string& src) {
  try {
    parse_program(src);
  } catch (const ParseError& e) {
    return e.code;
  }
  return "";
}

// Tiny term generator. Binders get short (clashing) names at generation
// time; variables point at a visible binder by absolute scope position, so the
// same tree can also be rendered with unique names.
struct G {
  enum K { Var, Lit, Lam, Let, App, Add, Pair, Case } k = Lit;
  int ref = 0;  // Var: absolute scope position
  int n = 0;
  std::vector<std::string> names;  // binders introduced here
  std::vector<G> kids;
};

G gen(std::mt19937_64& r, int depth, std::vector<std::string>& scope) {
  static const char* pool[] = {"x", "y", "z"};
  auto name = [&] { return std::string(pool[r() % 3]); };
  std::vector<int> visible;
  for (int i = int(scope.size()); i-- > 0;) {
    bool shadowed = false;
    for (int j = i + 1; j < int(scope.size()); ++j) shadowed = shadowed || scope[size_t(j)] == scope[size_t(i)];
    if (!shadowed) visible.push_back(i);
  }
  G g;
  int k = std::uniform_int_distribution<int>(0, depth > 0 ? 7 : 1)(r);
  if (k == 0 && visible.empty()) k = 1;
  g.k = G::K(k);
  auto under = [&](int d, std::vector<std::string> add) {
    for (auto& a : add) scope.push_back(a);
    G c = gen(r, d, scope);
    scope.resize(scope.size() - add.size());
    return c;
  };
  switch (g.k) {
    case G::Var: g.ref = visible[r() % visible.size()]; break;
    case G::Lit: g.n = int(r() % 100); break;
    case G::Lam:
      g.names = {name()};
      g.kids = {under(depth - 1, g.names)};
      break;
    case G::Let:
      g.names = {name()};
      g.kids = {gen(r, depth - 1, scope), under(depth - 1, g.names)};
      break;
    case G::App: case G::Add: case G::Pair:
      g.kids = {gen(r, depth - 1, scope), gen(r, depth - 1, scope)};
      break;
    case G::Case: {
      std::string a = name(), b = name();
      if (a == b) b = a == "x" ? "y" : "x";
      g.names = {a, b};
      g.kids = {gen(r, depth - 1, scope), under(depth - 1, g.names)};
      break;
    }
  }
  return g;
}

struct Render {
  bool unique;
  int counter = 0;
  std::vector<std::string> scope;

  std::vector<std::string> bind(const G& g) {
    std::vector<std::string> v;
    for (auto& n : g.names) v.push_back(unique ? "v" + std::to_string(counter++) : n);
    return v;
  }
  std::string under(const G& g, const std::vector<std::string>& ns) {
    for (auto& n : ns) scope.push_back(n);
    std::string s = go(g);
    scope.resize(scope.size() - ns.size());
    return s;
  }
  std::string go(const G& g) {
    switch (g.k) {
      case G::Var: return scope[size_t(g.ref)];
      case G::Lit: return std::to_string(g.n);
      case G::Lam: {
        auto ns = bind(g);
        return "(\\" + ns[0] + ". " + under(g.kids[0], ns) + ")";
      }
      case G::Let: {
        std::string rhs = go(g.kids[0]);
        auto ns = bind(g);
        return "(let1 " + ns[0] + " = " + rhs + " in " + under(g.kids[1], ns) + ")";
      }
      case G::App: return "(" + go(g.kids[0]) + " " + go(g.kids[1]) + ")";
      case G::Add: return "(" + go(g.kids[0]) + " + " + go(g.kids[1]) + ")";
      case G::Pair: return "(" + go(g.kids[0]) + ", " + go(g.kids[1]) + ")";
      case G::Case: {
        std::string sc = go(g.kids[0]);
        auto ns = bind(g);
        return "(case " + sc + " of { (" + ns[0] + ", " + ns[1] + ") -> " + under(g.kids[1], ns) + " })";
      }
    }
    return "";
  }
};

}  // namespace

TEST_CASE("literal parses and prints", "[syntax]") {
  Program p = parse_program("42");
  REQUIRE(p.body->tag == Term::Lit);
  CHECK(p.body->n == 42);
  CHECK(pretty_print(p.body) == "42");
}

TEST_CASE("let over execBO of an update", "[syntax]") {
  Program p = parse_program("let m = execBO now (updateRef k r) in m");
  REQUIRE(p.body->tag == Term::Let);
  REQUIRE(p.body->binds.size() == 1);
  const TermP& rhs = p.body->binds[0].rhs;
  REQUIRE(rhs->tag == Term::OpApp);
  CHECK(Op(rhs->code) == Op::ExecBO);
  REQUIRE(rhs->args.size() == 2);
  CHECK(rhs->args[1]->tag == Term::MoApp);
  CHECK(Mo(rhs->args[1]->code) == Mo::UpdateRef);
}

TEST_CASE("parse errors carry a class", "[syntax]") {
  CHECK(parse_error_code("borrow li") == "ArityMismatch");
  CHECK(parse_error_code("share a b") == "ArityMismatch");
  CHECK(parse_error_code("data T = A; data U = A; 1") == "DuplicateConstructor");
  CHECK(parse_error_code("data Pair2 = Ur; 1") == "DuplicateConstructor");  // defaults cannot be shadowed
  CHECK(parse_error_code("let x = in 1") == "Syntax");
  CHECK(parse_error_code("Frob 1") != "");
  try {
    parse_program("\n  borrow x");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
    CHECK(e.col >= 3);
  }
}

TEST_CASE("operators are saturated", "[syntax]") {
  Program p = parse_program("borrow a b");
  CHECK(p.body->tag == Term::OpApp);
  CHECK(p.body->args.size() == 2);
  Program q = parse_program("(share a) b");  // extra argument is an ordinary application
  CHECK(q.body->tag == Term::App);
}

TEST_CASE("alpha equality", "[syntax]") {
  auto b = [](const char* s) { return parse_program(s).body; };
  CHECK(alpha_equal(b("\\x. x"), b("\\y. y")));
  CHECK_FALSE(alpha_equal(b("\\x. \\y. x"), b("\\x. \\y. y")));
  CHECK(alpha_equal(b("let1 x = 1 in let1 x = x in x"), b("let1 a = 1 in let1 b = a in b")));
  CHECK_FALSE(alpha_equal(b("f x"), b("f y")));
}

TEST_CASE("free variables", "[syntax]") {
  auto fv = [](const char* s) { return free_vars(parse_program(s).body); };
  CHECK(fv("\\x. x").empty());
  CHECK(fv("x + y") == std::set<Sym>{intern("x"), intern("y")});
  CHECK(fv("let x = y in x") == std::set<Sym>{intern("y")});
  CHECK(fv("let x = x in x").empty());          // unrestricted let is recursive
  CHECK(fv("let1 x = x in x") == std::set<Sym>{intern("x")});
  CHECK(fv("case p of { (a, b) -> a + c }") == std::set<Sym>{intern("p"), intern("c")});
}

TEST_CASE("corpus programs round-trip through the printer", "[syntax]") {
  auto entries = load_corpus(default_corpus_dir());
  REQUIRE(entries.size() >= 13);
  for (auto& e : entries) {
    INFO(e.name);
    Program p = parse_program(e.source);
    std::string printed = print_program(p);
    Program q = parse_program(printed);
    CHECK(alpha_equal(p.body, q.body));
    CHECK(print_program(q) == printed);
  }
}

TEST_CASE("shadowing survives printing", "[syntax]") {
  Program p = parse_program("let1 x = 1 in let1 x = x + 1 in \\x. x");
  Program q = parse_program(print_program(p));
  CHECK(alpha_equal(p.body, q.body));
}

TEST_CASE("random terms are alpha-equal to their renamings", "[syntax][property]") {
  std::mt19937_64 r(7);
  int checked = 0;
  for (int i = 0; i < 400; ++i) {
    std::vector<std::string> scope;
    G g = gen(r, 5, scope);
    Render a{false}, b{true};
    std::string s1 = a.go(g), s2 = b.go(g);
    INFO(s1 << "\n" << s2);
    TermP t1 = parse_program(s1).body, t2 = parse_program(s2).body;
    CHECK(alpha_equal(t1, t2));
    CHECK(alpha_equal(t1, parse_program(pretty_print(t1)).body));
    ++checked;
  }
  CHECK(checked == 400);
}

TEST_CASE("types print and parse back", "[syntax]") {
  for (const char* s : {"Int", "Mut 'a (Ref Int)", "Lend ('a & 'b) Int", "forall 'a. BO 'a (Int, Now 'a)",
                        "Int -> Int", "Int -o Ur Int", "forall id 'i. Now 'i -o End 'i", "Share static Int"}) {
    INFO(s);
    TypeP t = parse_type(s);
    CHECK(type_eq(parse_type(print_type(t)), t));
  }
}

TEST_CASE("parsing is deterministic", "[syntax]") {
  std::string src = slurp(std::filesystem::path(default_corpus_dir()) / "reduce_example.pbo");
  CHECK(print_program(parse_program(src)) == print_program(parse_program(src)));
}
