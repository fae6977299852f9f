#pragma once
// Core data: symbols, lifetimes, multiplicities, types, terms, programs.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace pbo {

// Source names are interned; runtime names are (base, counter) pairs packed
// into the high half, printed as "base#n".
using Sym = uint64_t;

Sym intern(std::string_view s);
std::string name_of(Sym s);
// "x#12" -> "x"
Sym base_of(Sym s);
bool is_runtime_name(Sym s);
Sym runtime_sym(Sym base, uint32_t n);

// ---- lifetimes -------------------------------------------------------------

// An atom of a lifetime. Vars are bound by `forall 'a`, ids by `forall id 'i`,
// skolems are opened binders, metas are unification holes.
struct LAtom {
  enum Kind : uint8_t { Var, Id, Skolem, Meta } kind = Var;
  Sym name = 0;   // Var/Id/Skolem
  int meta = 0;   // Meta
  bool id_kind = false;  // Skolem opened from an id binder
  auto operator<=>(const LAtom&) const = default;
};

// Normal form of a lifetime: the meet of a set of atoms. Empty set is static.
struct Lifetime {
  std::set<LAtom> atoms;
  bool is_static() const { return atoms.empty(); }
  auto operator<=>(const Lifetime&) const = default;

  static Lifetime stat() { return {}; }
  static Lifetime var(Sym s) { Lifetime l; l.atoms.insert({LAtom::Var, s, 0, false}); return l; }
  static Lifetime id(Sym s) { Lifetime l; l.atoms.insert({LAtom::Id, s, 0, true}); return l; }
  static Lifetime meta(int m) { Lifetime l; l.atoms.insert({LAtom::Meta, 0, m, false}); return l; }
};

Lifetime lft_meet(const Lifetime& a, const Lifetime& b);
bool lifetime_leq(const Lifetime& a, const Lifetime& b);

// ---- multiplicities --------------------------------------------------------

// Normal form: 1, ω, or a product over a non-empty set of variables.
// Products are idempotent in the order (p·p ≤ p by the join law), so a set.
struct Mult {
  enum Kind : uint8_t { One, Many, Prod } kind = One;
  std::set<Sym> vars;
  auto operator<=>(const Mult&) const = default;

  static Mult one() { return {}; }
  static Mult many() { return {Many, {}}; }
  static Mult var(Sym s) { return {Prod, {s}}; }
};

Mult mult_mul(const Mult& a, const Mult& b);
bool mult_leq(const Mult& a, const Mult& b);

// ---- types -----------------------------------------------------------------

enum class Bcon : uint8_t { Mut, Share };

enum class BinderKind : uint8_t { Lifetime, LifetimeId, Mult, Type };

struct Type;
using TypeP = std::shared_ptr<const Type>;

struct Type {
  enum Kind : uint8_t {
    Forall, TVar, Fun, Data, Int, Linearly, Ref, Now, End, Bor, Lend, BO, Meta
  } kind = Int;
  Sym name = 0;          // TVar, Data constructor, Forall binder
  BinderKind bkind = BinderKind::Type;
  Mult mult;             // Fun
  Lifetime lft;          // Now End Bor Lend BO
  Bcon bcon = Bcon::Mut; // Bor
  int bmeta = -1;        // Bor with an unresolved borrower kind
  int meta = -1;         // Meta
  std::vector<TypeP> args;  // Fun: arg,res; Data: params; Ref/Bor/Lend/BO/Forall: body
};

namespace ty {
TypeP int_();
TypeP linearly();
TypeP var(Sym s);
TypeP fun(TypeP a, Mult m, TypeP b);
TypeP data(Sym c, std::vector<TypeP> args);
TypeP unit();
TypeP boolean();
TypeP ur(TypeP a);
TypeP pair(TypeP a, TypeP b);
TypeP ref(TypeP a);
TypeP now(Lifetime l);
TypeP end(Lifetime l);
TypeP bor(Bcon b, Lifetime l, TypeP a);
TypeP lend(Lifetime l, TypeP a);
TypeP bo(Lifetime l, TypeP a);
TypeP forall(BinderKind k, Sym name, TypeP body);
TypeP meta(int m);
}  // namespace ty

bool type_eq(const TypeP& a, const TypeP& b);

// Argument of an explicit instantiation `@[...]`.
struct InstArg {
  enum Kind : uint8_t { Type, Lifetime, Mult, Bcon } kind = Type;
  TypeP type;
  pbo::Lifetime lft;
  pbo::Mult mult;
  pbo::Bcon bcon = pbo::Bcon::Mut;
  int bmeta = -1;  // Bcon hole (checker only)
};

// ---- operators -------------------------------------------------------------

enum class Op : uint8_t {
  Add, Sub, Mul,                 // iop
  Le, Lt, Eq, Ge, Gt, Ne,        // irel
  Par, Consume, Move, Linearly, WithLinearly,
  NewRef, FreeRef, NewLifetime, EndLifetime,
  Borrow, Share, Copy, JoinMut, Reclaim, ExecBO,
  Count_
};

enum class Mo : uint8_t { Pure, Bind, SexecBO, ParBO, Deref, UpdateRef, Count_ };

// Runtime-only operators (both semantics; histories/locations/paths live on the term).
enum class XOp : uint8_t {
  Linear, ExeBO, ExecPost, BindPost, SexecPre, SexecPost, ParPost,
  DerefPost, UpdPre, UpdPrePost, UpdPost, Count_
};

int arity(Op o);
int arity(Mo m);
int arity(XOp x);
const char* op_name(Op o);
const char* mo_name(Mo m);
const char* xop_name(XOp x);
std::optional<Op> op_by_name(std::string_view s);
std::optional<Mo> mo_by_name(std::string_view s);
bool is_iop(Op o);
bool is_irel(Op o);

// ---- histories -------------------------------------------------------------

struct Path {
  int64_t bid = 0;
  std::vector<int> idx;
  auto operator<=>(const Path&) const = default;
  Path dot(int i) const { Path p = *this; p.idx.push_back(i); return p; }
  bool extends(const Path& p) const;  // *this == p.i...
};

// Latest record per borrow path.
using History = std::map<Path, Sym>;
using HistoryP = std::shared_ptr<const History>;

// ---- terms -----------------------------------------------------------------

struct Term;
using TermP = std::shared_ptr<const Term>;

struct LetBind {
  Sym name = 0;
  TypeP ann;  // optional
  TermP rhs;
};

struct Alt {
  Sym con = 0;
  std::vector<Sym> vars;
  TermP body;
};

struct Term {
  enum Tag : uint8_t {
    // surface
    Var, Let, Lam, App, Seq, Lit, Con, Case, OpApp, MoApp,
    Ann, Gen, Inst,
    // runtime
    Tok, RefLoc, RefVar, Lend, Done, Wrap, XOpApp
  } tag = Lit;

  Sym x = 0;          // Var, Lam param, Con name, Seq var, Gen binder, RefVar/Lend/Done var
  int64_t n = 0;      // Lit value, RefLoc location, Lend bid
  int code = 0;       // Op/Mo/XOp code; Gen binder kind
  bool linear_let = false;  // Let: `let1`
  std::vector<TermP> args;  // App f,a | Con/Op/Mo/XOp args | Lam/Seq/Ann/Gen/Inst/Wrap body | Case scrutinee
  std::vector<LetBind> binds;
  TermP body;                // Let body
  std::vector<Alt> alts;     // Case
  TypeP ty;                  // Ann
  std::vector<InstArg> inst; // OpApp/MoApp/Inst
  // runtime payloads
  HistoryP h;                // Tok (if has_h), Done, XOp history H
  HistoryP h2;               // SexecPost second history
  bool has_h = false;
  Bcon bcon = Bcon::Mut;     // Wrap
  std::vector<Path> paths;   // Wrap Mut paths, UpdPrePost/UpdPost paths
  int line = 0, col = 0;     // source position (surface only)
};

namespace tm {
TermP var(Sym x);
TermP lit(int64_t n);
TermP app(TermP f, TermP a);
TermP lam(Sym x, TermP body);
TermP seq(Sym x, TermP body);
TermP con(Sym c, std::vector<TermP> args);
TermP op(Op o, std::vector<TermP> args);
TermP mo(Mo m, std::vector<TermP> args);
TermP let(std::vector<LetBind> bs, TermP body, bool linear);
TermP cas(TermP scrut, std::vector<Alt> alts);
// runtime
TermP tok();
TermP tok_h(HistoryP h);
TermP ref_loc(int64_t loc);
TermP ref_var(Sym x);
TermP lend(int64_t bid, Sym x);
TermP done(Sym x, HistoryP h = nullptr);
TermP wrap(Bcon b, std::vector<Path> paths, TermP inner);
TermP xop(XOp o, std::vector<TermP> args, HistoryP h = nullptr, HistoryP h2 = nullptr,
          std::vector<Path> paths = {}, int64_t loc = 0);
}  // namespace tm

HistoryP hist_empty();

// ---- programs --------------------------------------------------------------

struct CtorDecl {
  Sym name = 0;
  std::vector<std::pair<Mult, TypeP>> fields;
};

struct DataDecl {
  Sym name = 0;
  std::vector<Sym> params;
  std::vector<CtorDecl> ctors;
};

struct Program {
  std::vector<DataDecl> data_decls;  // includes the defaults
  TermP body;
};

// Default declarations: (), Bool, Ur, pair.
std::vector<DataDecl> default_decls();
namespace names {
Sym unit();
Sym pair();
Sym ur();
Sym boolean();
Sym t_true();
Sym t_false();
}  // namespace names

// ---- structural utilities --------------------------------------------------

std::set<Sym> free_vars(const TermP& t);
bool alpha_equal(const TermP& a, const TermP& b);
// Capture-free renaming of free variables (runtime names never clash with binders).
TermP rename(const TermP& t, const std::map<Sym, Sym>& m);
// Drop annotations, generalization and instantiation markers.
TermP erase(const TermP& t);
bool is_value(const TermP& t);

}  // namespace pbo
