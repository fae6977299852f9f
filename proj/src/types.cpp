// Subtyping with holes, typing contexts and operator signatures.

#include "pbo/types.hpp"

#include <functional>

#include "pbo/syntax.hpp"

namespace pbo {

namespace {

TypeP mk(Type t) { return std::make_shared<const Type>(std::move(t)); }

TypeP with_args(const TypeP& t, std::vector<TypeP> args) {
  Type c = *t;
  c.args = std::move(args);
  return mk(std::move(c));
}

// Rebuild t bottom-up through f on every node (after children).
TypeP map_type(const TypeP& t, const std::function<TypeP(const TypeP&)>& f) {
  if (!t) return t;
  bool changed = false;
  std::vector<TypeP> args;
  args.reserve(t->args.size());
  for (auto& a : t->args) {
    args.push_back(map_type(a, f));
    changed = changed || args.back() != a;
  }
  TypeP r = changed ? with_args(t, std::move(args)) : t;
  return f(r);
}

bool has_lft(const TypeP& t) {
  switch (t->kind) {
    case Type::Now: case Type::End: case Type::Bor: case Type::Lend: case Type::BO: return true;
    default: return false;
  }
}

Lifetime subst_atom(const Lifetime& l, const std::function<std::optional<Lifetime>(const LAtom&)>& f) {
  Lifetime r;
  for (auto& a : l.atoms) {
    if (auto by = f(a)) r = lft_meet(r, *by);
    else r.atoms.insert(a);
  }
  return r;
}

// Serialization used as the key of the coinductive hypothesis set.
void key_of(const TypeP& t, std::string& out) {
  auto lft = [&](const Lifetime& l) {
    out += '[';
    for (auto& a : l.atoms) out += std::to_string(int(a.kind)) + ":" + std::to_string(a.name) + ":" + std::to_string(a.meta) + ",";
    out += ']';
  };
  out += char('A' + t->kind);
  switch (t->kind) {
    case Type::TVar: case Type::Data: case Type::Forall: out += std::to_string(t->name); break;
    case Type::Fun: out += print_mult(t->mult); break;
    case Type::Meta: out += std::to_string(t->meta); break;
    case Type::Bor: out += t->bcon == Bcon::Mut ? 'M' : 'S'; out += std::to_string(t->bmeta); lft(t->lft); break;
    default: if (has_lft(t)) lft(t->lft);
  }
  out += '(';
  for (auto& a : t->args) key_of(a, out), out += ',';
  out += ')';
}

}  // namespace

TypeP map_lifetimes(const TypeP& t, const std::function<Lifetime(const Lifetime&)>& f) {
  return map_type(t, [&](const TypeP& n) {
    if (!has_lft(n)) return n;
    Lifetime l = f(n->lft);
    if (l == n->lft) return n;
    Type c = *n;
    c.lft = std::move(l);
    return mk(std::move(c));
  });
}

// ---- substitution --------------------------------------------------------------

TypeP subst_type_var(const TypeP& t, Sym a, const TypeP& by) {
  if (!t) return t;
  if (t->kind == Type::TVar) return t->name == a ? by : t;
  if (t->kind == Type::Forall && t->name == a && t->bkind == BinderKind::Type) return t;
  bool changed = false;
  std::vector<TypeP> args;
  for (auto& x : t->args) {
    args.push_back(subst_type_var(x, a, by));
    changed = changed || args.back() != x;
  }
  return changed ? with_args(t, std::move(args)) : t;
}

TypeP subst_lft_var(const TypeP& t, Sym a, const Lifetime& by) {
  if (!t) return t;
  bool lft_binder = t->bkind == BinderKind::Lifetime || t->bkind == BinderKind::LifetimeId;
  if (t->kind == Type::Forall && t->name == a && lft_binder) return t;
  Type c = *t;
  bool changed = false;
  if (has_lft(t)) {
    c.lft = subst_atom(t->lft, [&](const LAtom& x) -> std::optional<Lifetime> {
      if ((x.kind == LAtom::Var || x.kind == LAtom::Id) && x.name == a) return by;
      return std::nullopt;
    });
    changed = c.lft != t->lft;
  }
  for (auto& x : c.args) {
    auto y = subst_lft_var(x, a, by);
    changed = changed || y != x;
    x = y;
  }
  return changed ? mk(std::move(c)) : t;
}

TypeP subst_mult_var(const TypeP& t, Sym a, const Mult& by) {
  if (!t) return t;
  if (t->kind == Type::Forall && t->name == a && t->bkind == BinderKind::Mult) return t;
  Type c = *t;
  bool changed = false;
  if (t->kind == Type::Fun && t->mult.kind == Mult::Prod && t->mult.vars.count(a)) {
    Mult rest = Mult::one();
    for (auto v : t->mult.vars)
      if (v != a) rest = mult_mul(rest, Mult::var(v));
    c.mult = mult_mul(rest, by);
    changed = true;
  }
  for (auto& x : c.args) {
    auto y = subst_mult_var(x, a, by);
    changed = changed || y != x;
    x = y;
  }
  return changed ? mk(std::move(c)) : t;
}

TypeP instantiate(const TypeP& f, const InstArg& x) {
  if (!f || f->kind != Type::Forall) throw std::invalid_argument("instantiate: not a forall");
  const TypeP& body = f->args[0];
  switch (f->bkind) {
    case BinderKind::Lifetime:
    case BinderKind::LifetimeId:
      if (x.kind != InstArg::Lifetime) throw std::invalid_argument("expected a lifetime");
      return subst_lft_var(body, f->name, x.lft);
    case BinderKind::Mult:
      if (x.kind != InstArg::Mult) throw std::invalid_argument("expected a multiplicity");
      return subst_mult_var(body, f->name, x.mult);
    case BinderKind::Type:
      if (x.kind != InstArg::Type) throw std::invalid_argument("expected a type");
      return subst_type_var(body, f->name, x.type);
  }
  return body;
}

const DataDecl* find_data(const std::vector<DataDecl>& decls, Sym name) {
  for (auto& d : decls)
    if (d.name == name) return &d;
  return nullptr;
}

const DataDecl* find_ctor(const std::vector<DataDecl>& decls, Sym ctor, const CtorDecl** out) {
  for (auto& d : decls)
    for (auto& c : d.ctors)
      if (c.name == ctor) {
        if (out) *out = &c;
        return &d;
      }
  return nullptr;
}

// ---- holes -----------------------------------------------------------------------

TypeP Metas::new_type(int level) {
  ty.push_back(nullptr);
  ty_level.push_back(level);
  return ty::meta(int(ty.size()) - 1);
}

Lifetime Metas::new_lft(int level) {
  lft.push_back(std::nullopt);
  lft_level.push_back(level);
  return Lifetime::meta(int(lft.size()) - 1);
}

int Metas::new_bcon() {
  bc.push_back(std::nullopt);
  return int(bc.size()) - 1;
}

LAtom Metas::new_skolem(Sym name, bool id_kind, int level) {
  int id = next_skolem++;
  skolem_level[id] = level;
  return LAtom{LAtom::Skolem, name, id, id_kind};
}

Lifetime Metas::resolve(const Lifetime& l) const {
  bool any = false;
  for (auto& a : l.atoms) any = any || (a.kind == LAtom::Meta && lft[a.meta]);
  if (!any) return l;
  return resolve(subst_atom(l, [&](const LAtom& a) -> std::optional<Lifetime> {
    if (a.kind == LAtom::Meta && lft[a.meta]) return *lft[a.meta];
    return std::nullopt;
  }));
}

TypeP Metas::resolve(const TypeP& t) const {
  return map_type(t, [&](const TypeP& n) -> TypeP {
    if (n->kind == Type::Meta) return ty[n->meta] ? resolve(ty[n->meta]) : n;
    if (!has_lft(n) && !(n->kind == Type::Bor && n->bmeta >= 0)) return n;
    Type c = *n;
    c.lft = resolve(n->lft);
    if (c.kind == Type::Bor && c.bmeta >= 0 && bc[c.bmeta]) {
      c.bcon = *bc[c.bmeta];
      c.bmeta = -1;
    }
    return mk(std::move(c));
  });
}

std::optional<Bcon> Metas::bcon_of(const TypeP& t) const {
  if (t->bmeta < 0) return t->bcon;
  return bc[t->bmeta];
}

// ---- subtyping ---------------------------------------------------------------------

namespace {

struct Sub {
  Metas& m;
  const std::vector<DataDecl>& decls;
  int level;
  std::set<std::pair<std::string, std::string>> assumed;
  std::optional<SubFailure> fail;

  bool no(const char* code, std::string msg) {
    if (!fail) fail = SubFailure{code, std::move(msg)};
    return false;
  }

  TypeP head(TypeP t) {
    while (t->kind == Type::Meta && m.ty[t->meta]) t = m.ty[t->meta];
    return t;
  }

  // Deepest skolem mentioned; lowers the level of holes inside to `lvl`.
  bool scope_ok_lft(const Lifetime& l, int lvl, std::string& bad) {
    for (auto& a : m.resolve(l).atoms) {
      if (a.kind == LAtom::Skolem && m.skolem_level[a.meta] > lvl) {
        bad = name_of(a.name);
        return false;
      }
      if (a.kind == LAtom::Meta) m.lft_level[a.meta] = std::min(m.lft_level[a.meta], lvl);
    }
    return true;
  }

  bool scope_ok_type(const TypeP& t, int lvl, std::string& bad) {
    TypeP r = m.resolve(t);
    bool ok = true;
    std::function<void(const TypeP&)> walk = [&](const TypeP& n) {
      if (!ok) return;
      if (n->kind == Type::Meta) m.ty_level[n->meta] = std::min(m.ty_level[n->meta], lvl);
      if (has_lft(n) && !scope_ok_lft(n->lft, lvl, bad)) ok = false;
      for (auto& a : n->args) walk(a);
    };
    walk(r);
    return ok;
  }

  bool occurs(int meta, const TypeP& t) {
    TypeP r = m.resolve(t);
    bool found = false;
    map_type(r, [&](const TypeP& n) {
      if (n->kind == Type::Meta && n->meta == meta) found = true;
      return n;
    });
    return found;
  }

  bool bind_ty(int meta, const TypeP& t) {
    if (occurs(meta, t)) return no("Mismatch", "infinite type");
    std::string bad;
    if (!scope_ok_type(t, m.ty_level[meta], bad))
      return no("SideConditionFailed", "lifetime " + bad + " escapes its scope");
    m.ty[meta] = t;
    return true;
  }

  bool bind_lft(int meta, const Lifetime& l) {
    Lifetime r = m.resolve(l);
    for (auto& a : r.atoms)
      if (a.kind == LAtom::Meta && a.meta == meta) return true;  // ?m ≤ ?m ∧ …: leave open
    std::string bad;
    if (!scope_ok_lft(r, m.lft_level[meta], bad))
      return no("SideConditionFailed", "lifetime " + bad + " escapes its scope");
    m.lft[meta] = r;
    return true;
  }

  // a ≤ ?m holds for any ?m made of a subset of a's atoms; skolems deeper than
  // the hole's level are dropped rather than reported as escaping.
  Lifetime upper_within(const Lifetime& a, int lvl) {
    Lifetime r = a;
    r.atoms.clear();
    for (auto& x : a.atoms)
      if (!(x.kind == LAtom::Skolem && m.skolem_level[x.meta] > lvl)) r.atoms.insert(x);
    return r;
  }

  static std::vector<int> open_metas(const Lifetime& l) {
    std::vector<int> v;
    for (auto& a : l.atoms)
      if (a.kind == LAtom::Meta) v.push_back(a.meta);
    return v;
  }

  bool lft_leq(const Lifetime& a0, const Lifetime& b0) {
    Lifetime a = m.resolve(a0), b = m.resolve(b0);
    if (lifetime_leq(a, b)) return true;
    // a is a bare hole: ?m := b is exact
    if (a.atoms.size() == 1 && a.atoms.begin()->kind == LAtom::Meta)
      if (bind_lft(a.atoms.begin()->meta, b)) return true;
    fail.reset();
    // b = … ∧ ?m: need a ≤ ?m, solved by ?m := a
    auto mb = open_metas(b);
    if (!mb.empty()) {
      for (int x : mb)
        if (!bind_lft(x, upper_within(a, m.lft_level[x]))) return false;
      a = m.resolve(a), b = m.resolve(b);
      if (lifetime_leq(a, b)) return true;
    }
    // a = ?m ∧ …: solved by ?m := b
    auto ma = open_metas(a);
    if (!ma.empty()) {
      // only what the rest of a does not already provide
      Lifetime need = b;
      for (auto& x : a.atoms)
        if (x.kind != LAtom::Meta) need.atoms.erase(x);
      if (!bind_lft(ma.front(), need)) return false;
      a = m.resolve(a), b = m.resolve(b);
      if (lifetime_leq(a, b)) return true;
    }
    return no("SideConditionFailed", "lifetime " + print_lifetime(a) + " is not included in " + print_lifetime(b));
  }

  bool bcon_eq(const TypeP& a, const TypeP& b) {
    auto ka = m.bcon_of(a), kb = m.bcon_of(b);
    if (ka && kb) return *ka == *kb || no("Mismatch", "Mut and Share borrowers differ");
    if (!ka && !kb) return true;  // both open: left undecided
    if (!ka) m.bc[a->bmeta] = *kb;
    else m.bc[b->bmeta] = *ka;
    return true;
  }

  TypeP skolemize(const TypeP& f) {
    const TypeP& body = f->args[0];
    switch (f->bkind) {
      case BinderKind::Lifetime:
      case BinderKind::LifetimeId: {
        LAtom s = m.new_skolem(f->name, f->bkind == BinderKind::LifetimeId, level + 1);
        Lifetime l;
        l.atoms.insert(s);
        return subst_lft_var(body, f->name, l);
      }
      case BinderKind::Mult:
        return subst_mult_var(body, f->name, Mult::var(runtime_sym(f->name, uint32_t(m.next_skolem++))));
      case BinderKind::Type:
        return subst_type_var(body, f->name, ty::var(runtime_sym(f->name, uint32_t(m.next_skolem++))));
    }
    return body;
  }

  TypeP open_with_holes(const TypeP& f) {
    InstArg x;
    switch (f->bkind) {
      case BinderKind::Lifetime:
      case BinderKind::LifetimeId:
        x.kind = InstArg::Lifetime;
        x.lft = m.new_lft(level);
        break;
      case BinderKind::Mult:
        x.kind = InstArg::Mult;
        x.mult = Mult::one();
        break;
      case BinderKind::Type:
        x.kind = InstArg::Type;
        x.type = m.new_type(level);
        break;
    }
    return instantiate(f, x);
  }

  bool leq(TypeP a, TypeP b) {
    a = head(a), b = head(b);
    if (a->kind == Type::Meta && b->kind == Type::Meta && a->meta == b->meta) return true;
    if (a->kind == Type::Meta) return bind_ty(a->meta, b);
    if (b->kind == Type::Meta) return bind_ty(b->meta, a);
    if (b->kind == Type::Forall) {
      ++level;
      bool r = leq(a, skolemize(b));
      --level;
      return r;
    }
    if (a->kind == Type::Forall) return leq(open_with_holes(a), b);
    if (a->kind != b->kind)
      return no("Mismatch", "expected " + print_type(m.resolve(b)) + ", found " + print_type(m.resolve(a)));
    switch (a->kind) {
      case Type::Int:
      case Type::Linearly:
        return true;
      case Type::TVar:
        return a->name == b->name || no("Mismatch", "type variables " + name_of(a->name) + " and " + name_of(b->name) + " differ");
      case Type::Fun:
        if (!mult_leq(a->mult, b->mult))
          return no("Mismatch", "function multiplicity " + print_mult(a->mult) + " is not included in " + print_mult(b->mult));
        return leq(b->args[0], a->args[0]) && leq(a->args[1], b->args[1]);
      case Type::Data:
        return data_leq(a, b);
      case Type::Ref:
        return leq(a->args[0], b->args[0]);
      case Type::Now:
        return lft_leq(a->lft, b->lft) && lft_leq(b->lft, a->lft);
      case Type::End:
        return lft_leq(b->lft, a->lft);
      case Type::Bor: {
        if (!bcon_eq(a, b)) return false;
        if (!lft_leq(b->lft, a->lft)) return false;
        auto k = m.bcon_of(a);
        if (k && *k == Bcon::Share) return leq(a->args[0], b->args[0]);
        return leq(a->args[0], b->args[0]) && leq(b->args[0], a->args[0]);
      }
      case Type::Lend:
        return lft_leq(a->lft, b->lft) && leq(a->args[0], b->args[0]);
      case Type::BO:
        return lft_leq(b->lft, a->lft) && leq(a->args[0], b->args[0]);
      default:
        return no("Mismatch", "unexpected type");
    }
  }

  // The data rule, applied coinductively.
  bool data_leq(const TypeP& a, const TypeP& b) {
    if (a->name != b->name || a->args.size() != b->args.size())
      return no("Mismatch", "expected " + print_type(m.resolve(b)) + ", found " + print_type(m.resolve(a)));
    if (a->args.empty()) return true;
    std::string ka, kb;
    key_of(m.resolve(a), ka);
    key_of(m.resolve(b), kb);
    if (!assumed.insert({ka, kb}).second) return true;
    const DataDecl* d = find_data(decls, a->name);
    if (!d) {
      for (size_t i = 0; i < a->args.size(); ++i)
        if (!leq(a->args[i], b->args[i]) || !leq(b->args[i], a->args[i])) return false;
      return true;
    }
    for (auto& c : d->ctors)
      for (auto& [mu, f] : c.fields) {
        TypeP fa = f, fb = f;
        for (size_t i = 0; i < d->params.size() && i < a->args.size(); ++i) {
          fa = subst_type_var(fa, d->params[i], a->args[i]);
          fb = subst_type_var(fb, d->params[i], b->args[i]);
        }
        if (!leq(fa, fb)) return false;
      }
    return true;
  }
};

}  // namespace

std::optional<SubFailure> subtype_m(const TypeP& a, const TypeP& b, Metas& m,
                                    const std::vector<DataDecl>& decls, int level) {
  Sub s{m, decls, level, {}, std::nullopt};
  if (s.leq(a, b)) return std::nullopt;
  if (!s.fail) s.fail = SubFailure{"Mismatch", "not a subtype"};
  return s.fail;
}

bool subtype(const TypeP& a, const TypeP& b, const std::vector<DataDecl>& decls) {
  Metas m;
  return !subtype_m(a, b, m, decls, 0);
}

// ---- contexts ------------------------------------------------------------------------

Ctx ctx_scale(const Mult& mu, const Ctx& g) {
  Ctx r;
  for (auto& [x, e] : g) r[x] = {mult_mul(mu, e.mult), e.type};
  return r;
}

Ctx ctx_add(const Ctx& a, const Ctx& b) {
  Ctx r = a;
  for (auto& [x, e] : b) {
    auto it = r.find(x);
    if (it == r.end()) {
      r[x] = e;
      continue;
    }
    if (it->second.mult.kind != Mult::Many || e.mult.kind != Mult::Many || !type_eq(it->second.type, e.type))
      throw ContextError("LinearShared", x, name_of(x) + " is shared but not unrestricted on both sides");
  }
  return r;
}

bool ctx_include(const Ctx& sub, const Ctx& sup, const std::vector<DataDecl>& decls) {
  for (auto& [x, e] : sup) {
    auto it = sub.find(x);
    if (it == sub.end()) return false;
    if (!mult_leq(e.mult, it->second.mult)) return false;
    if (!subtype(it->second.type, e.type, decls)) return false;
  }
  for (auto& [x, e] : sub)
    if (!sup.count(x) && e.mult.kind != Mult::Many) return false;
  return true;
}

// ---- signatures ----------------------------------------------------------------------

std::vector<InstArg::Kind> op_params(Op o) {
  using K = InstArg::Kind;
  if (is_iop(o) || is_irel(o)) return {};
  switch (o) {
    case Op::Par: return {K::Type, K::Type};
    case Op::Consume: case Op::Move: case Op::Linearly: case Op::WithLinearly:
    case Op::NewRef: case Op::FreeRef: case Op::NewLifetime:
      return {K::Type};
    case Op::EndLifetime: return {K::Lifetime};
    case Op::Borrow: case Op::Share: case Op::Copy: case Op::Reclaim: case Op::ExecBO:
      return {K::Lifetime, K::Type};
    case Op::JoinMut: return {K::Bcon, K::Lifetime, K::Lifetime, K::Type};
    default: return {};
  }
}

std::vector<InstArg::Kind> mo_params(Mo mo) {
  using K = InstArg::Kind;
  switch (mo) {
    case Mo::Pure: return {K::Lifetime, K::Type};
    case Mo::Bind: return {K::Lifetime, K::Type, K::Type};
    case Mo::SexecBO: return {K::Lifetime, K::Lifetime, K::Type};
    case Mo::ParBO: return {K::Lifetime, K::Type, K::Type};
    case Mo::Deref: return {K::Bcon, K::Lifetime, K::Type};
    case Mo::UpdateRef: return {K::Lifetime, K::Lifetime, K::Type, K::Type};
    default: return {};
  }
}

namespace {

void check_inst(const std::vector<InstArg::Kind>& ks, const std::vector<InstArg>& inst, const char* name) {
  if (ks.size() != inst.size())
    throw SignatureError("BadInstantiation", std::string(name) + " takes " + std::to_string(ks.size()) +
                                                 " instantiation arguments, got " + std::to_string(inst.size()));
  for (size_t i = 0; i < ks.size(); ++i)
    if (ks[i] != inst[i].kind)
      throw SignatureError("BadInstantiation", std::string(name) + ": instantiation argument " +
                                                   std::to_string(i + 1) + " has the wrong kind");
}

TypeP bor_of(const InstArg& k, const Lifetime& l, TypeP a) {
  Type t;
  t.kind = Type::Bor;
  t.bcon = k.bcon;
  t.bmeta = k.bmeta;
  t.lft = l;
  t.args = {std::move(a)};
  return mk(std::move(t));
}

const Sym kIota = intern("'i");

}  // namespace

Signature op_signature_open(Op o, const std::vector<InstArg>& x) {
  check_inst(op_params(o), x, op_name(o));
  using namespace ty;
  Signature s;
  using KC = KindCond;
  if (is_iop(o)) return {{int_(), int_()}, int_(), {}, {}};
  if (is_irel(o)) return {{int_(), int_()}, boolean(), {}, {}};
  switch (o) {
    case Op::Par: return {{x[0].type, x[1].type}, pair(x[0].type, x[1].type), {}, {}};
    case Op::Consume:
      s = {{x[0].type}, unit(), {}, {}};
      s.kinds.push_back({x[0].type, KC::Linearly | KC::Mut, "consume"});
      return s;
    case Op::Move:
      s = {{x[0].type}, ur(x[0].type), {}, {}};
      s.kinds.push_back({x[0].type, KC::Int | KC::End | KC::Share, "move"});
      return s;
    case Op::Linearly:
      return {{fun(linearly(), Mult::one(), ur(x[0].type))}, ur(x[0].type), {}, {}};
    case Op::WithLinearly:
      s = {{x[0].type}, pair(linearly(), x[0].type), {}, {}};
      s.kinds.push_back({x[0].type, KC::Linearly | KC::Ref | KC::Now | KC::Mut, "withLinearly"});
      return s;
    case Op::NewRef: return {{linearly(), x[0].type}, ref(x[0].type), {}, {}};
    case Op::FreeRef: return {{ref(x[0].type)}, x[0].type, {}, {}};
    case Op::NewLifetime: {
      TypeP body = fun(now(Lifetime::var(kIota)), Mult::one(), x[0].type);
      return {{linearly(), forall(BinderKind::LifetimeId, kIota, body)}, x[0].type, {}, {}};
    }
    case Op::EndLifetime: return {{now(x[0].lft)}, ur(end(x[0].lft)), {}, {}};
    case Op::Borrow:
      return {{linearly(), x[1].type}, pair(bor(Bcon::Mut, x[0].lft, x[1].type), lend(x[0].lft, x[1].type)), {}, {}};
    case Op::Share:
      return {{bor(Bcon::Mut, x[0].lft, x[1].type)}, ur(bor(Bcon::Share, x[0].lft, x[1].type)), {}, {}};
    case Op::Copy:
      s = {{bor(Bcon::Share, x[0].lft, x[1].type)}, x[1].type, {}, {}};
      s.kinds.push_back({x[1].type, KC::Int | KC::End | KC::Share, "copy"});
      return s;
    case Op::JoinMut:
      return {{bor_of(x[0], x[1].lft, bor(Bcon::Mut, x[2].lft, x[3].type))},
              bor_of(x[0], lft_meet(x[1].lft, x[2].lft), x[3].type), {}, {}};
    case Op::Reclaim: return {{lend(x[0].lft, x[1].type), end(x[0].lft)}, x[1].type, {}, {}};
    case Op::ExecBO:
      return {{now(x[0].lft), bo(x[0].lft, x[1].type)}, pair(now(x[0].lft), x[1].type), {}, {}};
    default:
      throw SignatureError("BadInstantiation", "no signature");
  }
}

Signature mo_signature_open(Mo mo, const std::vector<InstArg>& x) {
  check_inst(mo_params(mo), x, mo_name(mo));
  using namespace ty;
  switch (mo) {
    case Mo::Pure: return {{x[1].type}, bo(x[0].lft, x[1].type), {}, {}};
    case Mo::Bind:
      return {{bo(x[0].lft, x[1].type), fun(x[1].type, Mult::one(), bo(x[0].lft, x[2].type))},
              bo(x[0].lft, x[2].type), {}, {}};
    case Mo::SexecBO:
      return {{now(x[0].lft), bo(lft_meet(x[0].lft, x[1].lft), x[2].type)},
              bo(x[1].lft, pair(now(x[0].lft), x[2].type)), {}, {}};
    case Mo::ParBO:
      return {{bo(x[0].lft, x[1].type), bo(x[0].lft, x[2].type)}, bo(x[0].lft, pair(x[1].type, x[2].type)), {}, {}};
    case Mo::Deref:
      return {{bor_of(x[0], x[1].lft, ref(x[2].type))}, bo(x[1].lft, bor_of(x[0], x[1].lft, x[2].type)), {}, {}};
    case Mo::UpdateRef: {
      // α = x0, β = x1, T = x2, U = x3; β ≤ α
      TypeP mr = bor(Bcon::Mut, x[0].lft, ref(x[2].type));
      Signature s{{fun(x[2].type, Mult::one(), bo(x[1].lft, pair(x[3].type, x[2].type))), mr},
                  bo(x[1].lft, pair(x[3].type, mr)), {{x[1].lft, x[0].lft}}, {}};
      return s;
    }
    default:
      throw SignatureError("BadInstantiation", "no signature");
  }
}

std::string kind_cond_failure(const KindCond& k, const TypeP& t) {
  unsigned have = 0;
  switch (t->kind) {
    case Type::Int: have = KindCond::Int; break;
    case Type::Linearly: have = KindCond::Linearly; break;
    case Type::Ref: have = KindCond::Ref; break;
    case Type::Now: have = KindCond::Now; break;
    case Type::End: have = KindCond::End; break;
    case Type::Bor:
      if (t->bmeta >= 0) have = 0;
      else have = t->bcon == Bcon::Mut ? KindCond::Mut : KindCond::Share;
      break;
    default: break;
  }
  if (have & k.allowed) return "";
  return k.what + " does not accept " + print_type(t);
}

namespace {
void decide(const Signature& s) {
  for (auto& [a, b] : s.leq)
    if (!lifetime_leq(a, b))
      throw SignatureError("SideConditionFailed", print_lifetime(a) + " is not included in " + print_lifetime(b));
  for (auto& k : s.kinds) {
    std::string f = kind_cond_failure(k, k.type);
    if (!f.empty()) throw SignatureError("SideConditionFailed", f);
  }
}
}  // namespace

Signature op_signature(Op o, const std::vector<InstArg>& inst) {
  Signature s = op_signature_open(o, inst);
  decide(s);
  return s;
}

Signature mo_signature(Mo mo, const std::vector<InstArg>& inst) {
  Signature s = mo_signature_open(mo, inst);
  decide(s);
  return s;
}

}  // namespace pbo
