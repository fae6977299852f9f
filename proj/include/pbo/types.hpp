#pragma once
// Subtyping, typing contexts, operator signatures and the linear checker.

#include <functional>
#include <stdexcept>
#include <string>

#include "pbo/ast.hpp"

namespace pbo {

// ---- unification store -------------------------------------------------------

// Holes for types, lifetimes and borrower kinds. Each hole and each skolem
// carries a scope level; a hole may not be solved with a skolem of a deeper
// level (that is how lifetime ids are kept from escaping their binder).
struct Metas {
  std::vector<TypeP> ty;
  std::vector<int> ty_level;
  std::vector<std::optional<Lifetime>> lft;
  std::vector<int> lft_level;
  std::vector<std::optional<Bcon>> bc;
  std::map<int, int> skolem_level;  // skolem id -> level
  int next_skolem = 1;

  TypeP new_type(int level);
  Lifetime new_lft(int level);
  int new_bcon();
  LAtom new_skolem(Sym name, bool id_kind, int level);

  Lifetime resolve(const Lifetime& l) const;
  TypeP resolve(const TypeP& t) const;  // deep
  std::optional<Bcon> bcon_of(const TypeP& bor) const;
};

// Failure of a subtyping query: Mismatch for shape clashes, SideConditionFailed
// for lifetime inclusion or escape failures.
struct SubFailure {
  std::string code;
  std::string message;
};

// Subtyping with holes; solving is greedy (each hole is bound at its first
// constraint). Returns nullopt on success.
std::optional<SubFailure> subtype_m(const TypeP& a, const TypeP& b, Metas& m,
                                    const std::vector<DataDecl>& decls, int level);

// Closed subtyping.
bool subtype(const TypeP& a, const TypeP& b, const std::vector<DataDecl>& decls = default_decls());

// Substitutions.
TypeP subst_type_var(const TypeP& t, Sym a, const TypeP& by);
TypeP subst_lft_var(const TypeP& t, Sym a, const Lifetime& by);
TypeP subst_mult_var(const TypeP& t, Sym a, const Mult& by);
// Apply f to every lifetime occurring in t.
TypeP map_lifetimes(const TypeP& t, const std::function<Lifetime(const Lifetime&)>& f);
// Instantiate the outermost ∀ of t with x (kind must match).
TypeP instantiate(const TypeP& forall_t, const InstArg& x);
const DataDecl* find_data(const std::vector<DataDecl>& decls, Sym name);
const DataDecl* find_ctor(const std::vector<DataDecl>& decls, Sym ctor, const CtorDecl** out);

// ---- typing contexts ---------------------------------------------------------

struct CtxEntry {
  Mult mult;
  TypeP type;
};
using Ctx = std::map<Sym, CtxEntry>;

struct ContextError : std::runtime_error {
  std::string code;  // LinearShared
  Sym var;
  ContextError(std::string c, Sym v, const std::string& msg) : std::runtime_error(msg), code(std::move(c)), var(v) {}
};

Ctx ctx_scale(const Mult& m, const Ctx& g);
Ctx ctx_add(const Ctx& a, const Ctx& b);  // throws ContextError
bool ctx_include(const Ctx& sub, const Ctx& sup, const std::vector<DataDecl>& decls = default_decls());

// ---- operator signatures ------------------------------------------------------

struct SignatureError : std::runtime_error {
  std::string code;  // SideConditionFailed | BadInstantiation
  SignatureError(std::string c, const std::string& msg) : std::runtime_error(msg), code(std::move(c)) {}
};

// A type-shape side condition: "T is one of ...".
struct KindCond {
  enum Allowed : unsigned { Int = 1, Linearly = 2, Ref = 4, Now = 8, End = 16, Mut = 32, Share = 64 };
  TypeP type;
  unsigned allowed = 0;
  std::string what;
};

struct Signature {
  std::vector<TypeP> args;
  TypeP result;
  std::vector<std::pair<Lifetime, Lifetime>> leq;  // side conditions a ≤ b
  std::vector<KindCond> kinds;
};

// Schematic parameters, in `@[...]` order.
std::vector<InstArg::Kind> op_params(Op o);
std::vector<InstArg::Kind> mo_params(Mo m);

// Fully instantiated signature; side conditions are decided when the
// instantiation is closed. Throws SignatureError.
Signature op_signature(Op o, const std::vector<InstArg>& inst);
Signature mo_signature(Mo m, const std::vector<InstArg>& inst);
// Same, without deciding side conditions (used by the checker with holes).
Signature op_signature_open(Op o, const std::vector<InstArg>& inst);
Signature mo_signature_open(Mo m, const std::vector<InstArg>& inst);

// Empty string if the kind condition holds on a resolved type.
std::string kind_cond_failure(const KindCond& k, const TypeP& resolved);

// ---- checker -------------------------------------------------------------------

struct Diagnostic {
  std::string code;  // LinearUsedTwice LinearUnused Mismatch SideConditionFailed UnboundVariable BadInstantiation
  std::string message;
  int line = 0, col = 0;
};

struct CheckResult {
  bool ok = false;
  TypeP type;  // of the program body, holes resolved
  std::vector<Diagnostic> diagnostics;
};

CheckResult type_check(const Program& p);
// Check a term in the empty context against an expected type.
CheckResult type_check_at(const Program& p, const TypeP& expected);

}  // namespace pbo
