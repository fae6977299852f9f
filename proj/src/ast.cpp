#include "pbo/ast.hpp"

#include <deque>
#include <mutex>
#include <unordered_map>

namespace pbo {

// ---- symbols ---------------------------------------------------------------

namespace {
struct Interner {
  std::mutex mu;
  std::unordered_map<std::string, Sym> ids;
  std::deque<std::string> names;  // stable references
};
Interner& interner() {
  static Interner in;
  return in;
}
}  // namespace

Sym intern(std::string_view s) {
  auto& in = interner();
  std::lock_guard lk(in.mu);
  auto it = in.ids.find(std::string(s));
  if (it != in.ids.end()) return it->second;
  Sym id = static_cast<Sym>(in.names.size());
  in.names.emplace_back(s);
  in.ids.emplace(std::string(s), id);
  return id;
}

namespace {
constexpr Sym kRuntimeBit = Sym(1) << 63;
}

std::string name_of(Sym s) {
  if (s & kRuntimeBit) return name_of(base_of(s)) + "#" + std::to_string(uint32_t(s));
  auto& in = interner();
  std::lock_guard lk(in.mu);
  return in.names.at(s);
}

Sym base_of(Sym s) { return s & kRuntimeBit ? (s & ~kRuntimeBit) >> 32 : s; }

bool is_runtime_name(Sym s) { return (s & kRuntimeBit) != 0; }

Sym runtime_sym(Sym base, uint32_t n) { return kRuntimeBit | (base_of(base) << 32) | n; }

// ---- lattices --------------------------------------------------------------

Lifetime lft_meet(const Lifetime& a, const Lifetime& b) {
  Lifetime r = a;
  r.atoms.insert(b.atoms.begin(), b.atoms.end());
  return r;
}

// a ≤ b iff every atom of b occurs in a: the meet drops toward shorter lifetimes.
bool lifetime_leq(const Lifetime& a, const Lifetime& b) {
  for (auto& x : b.atoms)
    if (!a.atoms.count(x)) return false;
  return true;
}

Mult mult_mul(const Mult& a, const Mult& b) {
  if (a.kind == Mult::One) return b;
  if (b.kind == Mult::One) return a;
  if (a.kind == Mult::Many || b.kind == Mult::Many) return Mult::many();
  Mult r = a;
  r.vars.insert(b.vars.begin(), b.vars.end());
  return r;
}

bool mult_leq(const Mult& a, const Mult& b) {
  if (a.kind == Mult::One || b.kind == Mult::Many) return true;
  if (a.kind == Mult::Many || b.kind == Mult::One) return false;
  for (auto v : a.vars)
    if (!b.vars.count(v)) return false;
  return true;
}

// ---- types -----------------------------------------------------------------

namespace ty {
namespace {
TypeP mk(Type t) { return std::make_shared<const Type>(std::move(t)); }
}  // namespace
TypeP int_() {
  static TypeP t = mk(Type{});
  return t;
}
TypeP linearly() {
  Type t;
  t.kind = Type::Linearly;
  return mk(t);
}
TypeP var(Sym s) {
  Type t;
  t.kind = Type::TVar;
  t.name = s;
  return mk(t);
}
TypeP fun(TypeP a, Mult m, TypeP b) {
  Type t;
  t.kind = Type::Fun;
  t.mult = m;
  t.args = {std::move(a), std::move(b)};
  return mk(t);
}
TypeP data(Sym c, std::vector<TypeP> args) {
  Type t;
  t.kind = Type::Data;
  t.name = c;
  t.args = std::move(args);
  return mk(t);
}
TypeP unit() { return data(names::unit(), {}); }
TypeP boolean() { return data(names::boolean(), {}); }
TypeP ur(TypeP a) { return data(names::ur(), {std::move(a)}); }
TypeP pair(TypeP a, TypeP b) { return data(names::pair(), {std::move(a), std::move(b)}); }
TypeP ref(TypeP a) {
  Type t;
  t.kind = Type::Ref;
  t.args = {std::move(a)};
  return mk(t);
}
TypeP now(Lifetime l) {
  Type t;
  t.kind = Type::Now;
  t.lft = std::move(l);
  return mk(t);
}
TypeP end(Lifetime l) {
  Type t;
  t.kind = Type::End;
  t.lft = std::move(l);
  return mk(t);
}
TypeP bor(Bcon b, Lifetime l, TypeP a) {
  Type t;
  t.kind = Type::Bor;
  t.bcon = b;
  t.lft = std::move(l);
  t.args = {std::move(a)};
  return mk(t);
}
TypeP lend(Lifetime l, TypeP a) {
  Type t;
  t.kind = Type::Lend;
  t.lft = std::move(l);
  t.args = {std::move(a)};
  return mk(t);
}
TypeP bo(Lifetime l, TypeP a) {
  Type t;
  t.kind = Type::BO;
  t.lft = std::move(l);
  t.args = {std::move(a)};
  return mk(t);
}
TypeP forall(BinderKind k, Sym name, TypeP body) {
  Type t;
  t.kind = Type::Forall;
  t.bkind = k;
  t.name = name;
  t.args = {std::move(body)};
  return mk(t);
}
TypeP meta(int m) {
  Type t;
  t.kind = Type::Meta;
  t.meta = m;
  return mk(t);
}
}  // namespace ty

bool type_eq(const TypeP& a, const TypeP& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind || a->name != b->name || a->args.size() != b->args.size()) return false;
  switch (a->kind) {
    case Type::Forall:
      if (a->bkind != b->bkind) return false;
      break;
    case Type::Fun:
      if (a->mult != b->mult) return false;
      break;
    case Type::Now: case Type::End: case Type::Lend: case Type::BO:
      if (a->lft != b->lft) return false;
      break;
    case Type::Bor:
      if (a->lft != b->lft || a->bcon != b->bcon || a->bmeta != b->bmeta) return false;
      break;
    case Type::Meta:
      if (a->meta != b->meta) return false;
      break;
    default:
      break;
  }
  for (size_t i = 0; i < a->args.size(); ++i)
    if (!type_eq(a->args[i], b->args[i])) return false;
  return true;
}

// ---- operator tables -------------------------------------------------------

namespace {
struct OpInfo {
  const char* name;
  int arity;
};
constexpr OpInfo kOps[] = {
    {"+", 2}, {"-", 2}, {"*", 2},
    {"<=", 2}, {"<", 2}, {"==", 2}, {">=", 2}, {">", 2}, {"/=", 2},
    {"par", 2}, {"consume", 1}, {"move", 1}, {"linearly", 1}, {"withLinearly", 1},
    {"newRef", 2}, {"freeRef", 1}, {"newLifetime", 2}, {"endLifetime", 1},
    {"borrow", 2}, {"share", 1}, {"copy", 1}, {"joinMut", 1}, {"reclaim", 2}, {"execBO", 2},
};
constexpr OpInfo kMos[] = {
    {"pure", 1}, {">>=", 2}, {"sexecBO", 2}, {"parBO", 2}, {"deref", 1}, {"updateRef", 2},
};
constexpr OpInfo kXOps[] = {
    {"linear", 1}, {"exeBO", 1}, {"execBO.post", 1}, {">>=.post", 2}, {"sexecBO.pre", 2},
    {"sexecBO.post", 1}, {"parBO.post", 2}, {"deref.post", 1}, {"updateRef.pre", 2},
    {"updateRef.prepost", 1}, {"updateRef.post", 1},
};
static_assert(std::size(kOps) == size_t(Op::Count_));
static_assert(std::size(kMos) == size_t(Mo::Count_));
static_assert(std::size(kXOps) == size_t(XOp::Count_));
}  // namespace

int arity(Op o) { return kOps[size_t(o)].arity; }
int arity(Mo m) { return kMos[size_t(m)].arity; }
int arity(XOp x) { return kXOps[size_t(x)].arity; }
const char* op_name(Op o) { return kOps[size_t(o)].name; }
const char* mo_name(Mo m) { return kMos[size_t(m)].name; }
const char* xop_name(XOp x) { return kXOps[size_t(x)].name; }

std::optional<Op> op_by_name(std::string_view s) {
  for (size_t i = 0; i < std::size(kOps); ++i)
    if (s == kOps[i].name) return Op(i);
  return std::nullopt;
}
std::optional<Mo> mo_by_name(std::string_view s) {
  for (size_t i = 0; i < std::size(kMos); ++i)
    if (s == kMos[i].name) return Mo(i);
  if (s == "bind") return Mo::Bind;
  return std::nullopt;
}
bool is_iop(Op o) { return o <= Op::Mul; }
bool is_irel(Op o) { return o >= Op::Le && o <= Op::Ne; }

bool Path::extends(const Path& p) const {
  if (bid != p.bid || idx.size() < p.idx.size()) return false;
  for (size_t i = 0; i < p.idx.size(); ++i)
    if (idx[i] != p.idx[i]) return false;
  return true;
}

// ---- term constructors -----------------------------------------------------

namespace tm {
namespace {
TermP mk(Term t) { return std::make_shared<const Term>(std::move(t)); }
}  // namespace
TermP var(Sym x) {
  Term t;
  t.tag = Term::Var;
  t.x = x;
  return mk(std::move(t));
}
TermP lit(int64_t n) {
  Term t;
  t.tag = Term::Lit;
  t.n = n;
  return mk(std::move(t));
}
TermP app(TermP f, TermP a) {
  Term t;
  t.tag = Term::App;
  t.args = {std::move(f), std::move(a)};
  return mk(std::move(t));
}
TermP lam(Sym x, TermP body) {
  Term t;
  t.tag = Term::Lam;
  t.x = x;
  t.args = {std::move(body)};
  return mk(std::move(t));
}
TermP seq(Sym x, TermP body) {
  Term t;
  t.tag = Term::Seq;
  t.x = x;
  t.args = {std::move(body)};
  return mk(std::move(t));
}
TermP con(Sym c, std::vector<TermP> args) {
  Term t;
  t.tag = Term::Con;
  t.x = c;
  t.args = std::move(args);
  return mk(std::move(t));
}
TermP op(Op o, std::vector<TermP> args) {
  Term t;
  t.tag = Term::OpApp;
  t.code = int(o);
  t.args = std::move(args);
  return mk(std::move(t));
}
TermP mo(Mo m, std::vector<TermP> args) {
  Term t;
  t.tag = Term::MoApp;
  t.code = int(m);
  t.args = std::move(args);
  return mk(std::move(t));
}
TermP let(std::vector<LetBind> bs, TermP body, bool linear) {
  Term t;
  t.tag = Term::Let;
  t.binds = std::move(bs);
  t.body = std::move(body);
  t.linear_let = linear;
  return mk(std::move(t));
}
TermP cas(TermP scrut, std::vector<Alt> alts) {
  Term t;
  t.tag = Term::Case;
  t.args = {std::move(scrut)};
  t.alts = std::move(alts);
  return mk(std::move(t));
}
TermP tok() {
  static TermP t = [] {
    Term r;
    r.tag = Term::Tok;
    return mk(std::move(r));
  }();
  return t;
}
TermP tok_h(HistoryP h) {
  Term t;
  t.tag = Term::Tok;
  t.has_h = true;
  t.h = std::move(h);
  return mk(std::move(t));
}
TermP ref_loc(int64_t loc) {
  Term t;
  t.tag = Term::RefLoc;
  t.n = loc;
  return mk(std::move(t));
}
TermP ref_var(Sym x) {
  Term t;
  t.tag = Term::RefVar;
  t.x = x;
  return mk(std::move(t));
}
TermP lend(int64_t bid, Sym x) {
  Term t;
  t.tag = Term::Lend;
  t.n = bid;
  t.x = x;
  return mk(std::move(t));
}
TermP done(Sym x, HistoryP h) {
  Term t;
  t.tag = Term::Done;
  t.x = x;
  t.has_h = h != nullptr;
  t.h = std::move(h);
  return mk(std::move(t));
}
TermP wrap(Bcon b, std::vector<Path> paths, TermP inner) {
  Term t;
  t.tag = Term::Wrap;
  t.bcon = b;
  t.paths = std::move(paths);
  t.args = {std::move(inner)};
  return mk(std::move(t));
}
TermP xop(XOp o, std::vector<TermP> args, HistoryP h, HistoryP h2, std::vector<Path> paths,
          int64_t loc) {
  Term t;
  t.tag = Term::XOpApp;
  t.code = int(o);
  t.args = std::move(args);
  t.has_h = h != nullptr;
  t.h = std::move(h);
  t.h2 = std::move(h2);
  t.paths = std::move(paths);
  t.n = loc;
  return mk(std::move(t));
}
}  // namespace tm

HistoryP hist_empty() {
  static HistoryP e = std::make_shared<const History>();
  return e;
}

// ---- defaults --------------------------------------------------------------

namespace names {
Sym unit() { static Sym s = intern("()"); return s; }
Sym pair() { static Sym s = intern("(,)"); return s; }
Sym ur() { static Sym s = intern("Ur"); return s; }
Sym boolean() { static Sym s = intern("Bool"); return s; }
Sym t_true() { static Sym s = intern("True"); return s; }
Sym t_false() { static Sym s = intern("False"); return s; }
}  // namespace names

std::vector<DataDecl> default_decls() {
  Sym a = intern("#a"), b = intern("#b");
  std::vector<DataDecl> ds;
  ds.push_back({names::unit(), {}, {{names::unit(), {}}}});
  ds.push_back({names::boolean(), {}, {{names::t_true(), {}}, {names::t_false(), {}}}});
  ds.push_back({names::ur(), {a}, {{names::ur(), {{Mult::many(), ty::var(a)}}}}});
  ds.push_back({names::pair(), {a, b},
                {{names::pair(), {{Mult::one(), ty::var(a)}, {Mult::one(), ty::var(b)}}}}});
  return ds;
}

// ---- structural utilities --------------------------------------------------

namespace {

void fv(const TermP& t, std::set<Sym>& bound, std::set<Sym>& out);

void fv_scoped(const TermP& t, std::set<Sym>& bound, const std::vector<Sym>& bs,
               std::set<Sym>& out) {
  std::vector<Sym> added;
  for (Sym b : bs)
    if (bound.insert(b).second) added.push_back(b);
  fv(t, bound, out);
  for (Sym b : added) bound.erase(b);
}

void fv(const TermP& t, std::set<Sym>& bound, std::set<Sym>& out) {
  if (!t) return;
  auto use = [&](Sym x) {
    if (!bound.count(x)) out.insert(x);
  };
  switch (t->tag) {
    case Term::Var: case Term::RefVar: case Term::Lend: case Term::Done:
      use(t->x);
      break;
    case Term::Lam:
      fv_scoped(t->args[0], bound, {t->x}, out);
      break;
    case Term::Seq:
      use(t->x);
      fv(t->args[0], bound, out);
      break;
    case Term::Let: {
      std::vector<Sym> bs;
      for (auto& b : t->binds) bs.push_back(b.name);
      // let1 is non-recursive; the plain let binds in all right-hand sides
      for (auto& b : t->binds) {
        if (t->linear_let) fv(b.rhs, bound, out);
        else fv_scoped(b.rhs, bound, bs, out);
      }
      fv_scoped(t->body, bound, bs, out);
      break;
    }
    case Term::Case:
      fv(t->args[0], bound, out);
      for (auto& a : t->alts) fv_scoped(a.body, bound, a.vars, out);
      break;
    default:
      for (auto& a : t->args) fv(a, bound, out);
      break;
  }
  if (t->h)
    for (auto& [p, v] : *t->h) use(v);
  if (t->h2)
    for (auto& [p, v] : *t->h2) use(v);
}

struct AlphaCmp {
  std::vector<std::pair<Sym, Sym>> scope;

  bool same_var(Sym a, Sym b) const {
    for (auto it = scope.rbegin(); it != scope.rend(); ++it) {
      if (it->first == a || it->second == b) return it->first == a && it->second == b;
    }
    return a == b;
  }

  bool go_scoped(const TermP& a, const TermP& b, const std::vector<Sym>& va,
                 const std::vector<Sym>& vb) {
    if (va.size() != vb.size()) return false;
    for (size_t i = 0; i < va.size(); ++i) scope.emplace_back(va[i], vb[i]);
    bool r = go(a, b);
    scope.resize(scope.size() - va.size());
    return r;
  }

  bool hist_eq(const HistoryP& a, const HistoryP& b) {
    if (!a || !b) return a == b;
    if (a->size() != b->size()) return false;
    auto ia = a->begin();
    auto ib = b->begin();
    for (; ia != a->end(); ++ia, ++ib)
      if (ia->first != ib->first || !same_var(ia->second, ib->second)) return false;
    return true;
  }

  bool go(const TermP& a, const TermP& b) {
    if (!a || !b) return a == b;
    if (a->tag != b->tag || a->code != b->code || a->args.size() != b->args.size()) return false;
    switch (a->tag) {
      case Term::Var: case Term::RefVar: case Term::Done:
        if (!same_var(a->x, b->x)) return false;
        break;
      case Term::Lend:
        if (a->n != b->n || !same_var(a->x, b->x)) return false;
        break;
      case Term::Lit: case Term::RefLoc:
        if (a->n != b->n) return false;
        break;
      case Term::Con:
        if (a->x != b->x) return false;
        break;
      case Term::Lam:
        return go_scoped(a->args[0], b->args[0], {a->x}, {b->x});
      case Term::Seq:
        if (!same_var(a->x, b->x)) return false;
        break;
      case Term::Gen:
        if (a->x != b->x) return false;
        break;
      case Term::Ann:
        if (!type_eq(a->ty, b->ty)) return false;
        break;
      case Term::Wrap:
        if (a->bcon != b->bcon || a->paths != b->paths) return false;
        break;
      case Term::XOpApp:
        if (a->n != b->n || a->paths != b->paths) return false;
        break;
      case Term::Let: {
        if (a->linear_let != b->linear_let || a->binds.size() != b->binds.size()) return false;
        std::vector<Sym> va, vb;
        for (auto& x : a->binds) va.push_back(x.name);
        for (auto& x : b->binds) vb.push_back(x.name);
        for (size_t i = 0; i < a->binds.size(); ++i) {
          if (!type_eq(a->binds[i].ann, b->binds[i].ann)) return false;
          bool ok = a->linear_let ? go(a->binds[i].rhs, b->binds[i].rhs)
                                  : go_scoped(a->binds[i].rhs, b->binds[i].rhs, va, vb);
          if (!ok) return false;
        }
        return go_scoped(a->body, b->body, va, vb);
      }
      case Term::Case: {
        if (!go(a->args[0], b->args[0]) || a->alts.size() != b->alts.size()) return false;
        for (size_t i = 0; i < a->alts.size(); ++i) {
          if (a->alts[i].con != b->alts[i].con) return false;
          if (!go_scoped(a->alts[i].body, b->alts[i].body, a->alts[i].vars, b->alts[i].vars))
            return false;
        }
        return true;
      }
      default:
        break;
    }
    if (a->has_h != b->has_h || !hist_eq(a->h, b->h) || !hist_eq(a->h2, b->h2)) return false;
    if (a->inst.size() != b->inst.size()) return false;
    for (size_t i = 0; i < a->inst.size(); ++i) {
      auto& x = a->inst[i];
      auto& y = b->inst[i];
      if (x.kind != y.kind || !type_eq(x.type, y.type) || x.lft != y.lft || x.mult != y.mult ||
          x.bcon != y.bcon)
        return false;
    }
    for (size_t i = 0; i < a->args.size(); ++i)
      if (!go(a->args[i], b->args[i])) return false;
    return true;
  }
};

HistoryP rename_hist(const HistoryP& h, const std::map<Sym, Sym>& m) {
  if (!h || h->empty()) return h;
  bool touched = false;
  History r;
  for (auto& [p, v] : *h) {
    auto it = m.find(v);
    if (it != m.end()) touched = true;
    r.emplace(p, it != m.end() ? it->second : v);
  }
  return touched ? std::make_shared<const History>(std::move(r)) : h;
}

TermP rename_in(const TermP& t, const std::map<Sym, Sym>& m);

TermP rename_scoped(const TermP& t, const std::map<Sym, Sym>& m, const std::vector<Sym>& bs) {
  bool hit = false;
  for (Sym b : bs)
    if (m.count(b)) hit = true;
  if (!hit) return rename_in(t, m);
  auto m2 = m;
  for (Sym b : bs) m2.erase(b);
  return rename_in(t, m2);
}

TermP rename_in(const TermP& t, const std::map<Sym, Sym>& m) {
  if (!t || m.empty()) return t;
  auto sub = [&](Sym x) {
    auto it = m.find(x);
    return it == m.end() ? x : it->second;
  };
  Term r = *t;
  switch (t->tag) {
    case Term::Var: case Term::RefVar: case Term::Lend: case Term::Done:
      r.x = sub(t->x);
      break;
    case Term::Lam:
      r.args[0] = rename_scoped(t->args[0], m, {t->x});
      return std::make_shared<const Term>(std::move(r));
    case Term::Seq:
      r.x = sub(t->x);
      break;
    case Term::Let: {
      std::vector<Sym> bs;
      for (auto& b : t->binds) bs.push_back(b.name);
      for (auto& b : r.binds)
        b.rhs = t->linear_let ? rename_in(b.rhs, m) : rename_scoped(b.rhs, m, bs);
      r.body = rename_scoped(t->body, m, bs);
      return std::make_shared<const Term>(std::move(r));
    }
    case Term::Case:
      r.args[0] = rename_in(t->args[0], m);
      for (auto& a : r.alts) a.body = rename_scoped(a.body, m, a.vars);
      return std::make_shared<const Term>(std::move(r));
    default:
      break;
  }
  for (auto& a : r.args) a = rename_in(a, m);
  r.h = rename_hist(t->h, m);
  r.h2 = rename_hist(t->h2, m);
  return std::make_shared<const Term>(std::move(r));
}

}  // namespace

std::set<Sym> free_vars(const TermP& t) {
  std::set<Sym> bound, out;
  fv(t, bound, out);
  return out;
}

bool alpha_equal(const TermP& a, const TermP& b) {
  AlphaCmp c;
  return c.go(a, b);
}

TermP rename(const TermP& t, const std::map<Sym, Sym>& m) { return rename_in(t, m); }

TermP erase(const TermP& t) {
  if (!t) return t;
  switch (t->tag) {
    case Term::Ann: case Term::Gen: case Term::Inst:
      return erase(t->args[0]);
    default:
      break;
  }
  Term r = *t;
  r.ty = nullptr;
  r.inst.clear();
  for (auto& a : r.args) a = erase(a);
  for (auto& b : r.binds) {
    b.rhs = erase(b.rhs);
    b.ann = nullptr;
  }
  r.body = erase(t->body);
  for (auto& a : r.alts) a.body = erase(a.body);
  return std::make_shared<const Term>(std::move(r));
}

bool is_value(const TermP& t) {
  switch (t->tag) {
    case Term::Lam: case Term::Lit: case Term::Tok: case Term::RefLoc: case Term::RefVar:
    case Term::Lend: case Term::Done:
      return true;
    case Term::Con: case Term::MoApp:
      for (auto& a : t->args)
        if (a->tag != Term::Var) return false;
      return true;
    case Term::Wrap:
      return is_value(t->args[0]);
    default:
      return false;
  }
}

}  // namespace pbo
