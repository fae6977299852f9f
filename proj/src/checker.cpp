// Bidirectional linear checker. One context is threaded through; a usage
// count per linear entry stands in for context splitting.

#include <functional>

#include "pbo/syntax.hpp"
#include "pbo/types.hpp"

namespace pbo {

namespace {

struct TypeError {
  Diagnostic d;
};

class Checker {
 public:
  explicit Checker(const Program& p) : p_(p) {}

  CheckResult run(const TypeP* expected) {
    CheckResult r;
    try {
      TypeP t;
      if (expected) {
        check(p_.body, *expected);
        t = *expected;
      } else {
        t = synth(p_.body);
      }
      finish();
      r.type = m_.resolve(t);
      r.ok = true;
    } catch (const TypeError& e) {
      r.diagnostics.push_back(e.d);
    }
    return r;
  }

 private:
  struct Entry {
    Sym name;
    Mult mult;
    TypeP type;
    int uses = 0;
    size_t scale_depth = 0;
  };
  struct DeferredKind {
    KindCond k;
    int line, col;
  };

  const Program& p_;
  Metas m_;
  int level_ = 0;
  std::vector<Entry> ctx_;
  std::vector<Mult> scales_;
  std::map<Sym, Lifetime> lft_env_;
  std::map<Sym, TypeP> ty_env_;
  std::map<Sym, Mult> mult_env_;
  std::vector<DeferredKind> kinds_;

  [[noreturn]] void err(const char* code, const std::string& msg, const TermP& at) {
    throw TypeError{{code, msg, at ? at->line : 0, at ? at->col : 0}};
  }

  std::string show(const TypeP& t) { return print_type(m_.resolve(t)); }

  void sub(const TypeP& a, const TypeP& b, const TermP& at) {
    if (auto f = subtype_m(a, b, m_, p_.data_decls, level_)) err(f->code.c_str(), f->message, at);
  }

  TypeP head(TypeP t) {
    while (t->kind == Type::Meta && m_.ty[t->meta]) t = m_.ty[t->meta];
    return t;
  }

  // ---- context ----

  struct Scale {
    Checker& c;
    Scale(Checker& ch, Mult m) : c(ch) { c.scales_.push_back(std::move(m)); }
    ~Scale() { c.scales_.pop_back(); }
  };

  void push(Sym x, Mult mu, TypeP t) { ctx_.push_back({x, std::move(mu), std::move(t), 0, scales_.size()}); }

  void pop(const TermP& at) {
    Entry e = ctx_.back();
    ctx_.pop_back();
    if (e.mult.kind != Mult::Many && e.uses == 0)
      err("LinearUnused", "linear variable " + name_of(e.name) + " is never used", at);
  }

  Entry* lookup(Sym x) {
    for (auto it = ctx_.rbegin(); it != ctx_.rend(); ++it)
      if (it->name == x) return &*it;
    return nullptr;
  }

  TypeP use(Sym x, const TermP& at) {
    Entry* e = lookup(x);
    if (!e) err("UnboundVariable", "unbound variable " + name_of(x), at);
    if (e->mult.kind == Mult::Many) return e->type;
    Mult eff = Mult::one();
    for (size_t i = e->scale_depth; i < scales_.size(); ++i) eff = mult_mul(eff, scales_[i]);
    if (!mult_leq(eff, e->mult))
      err("LinearUsedTwice", "linear variable " + name_of(x) + " is used in an unrestricted position", at);
    if (++e->uses > 1) err("LinearUsedTwice", "linear variable " + name_of(x) + " is used more than once", at);
    return e->type;
  }

  std::vector<int> snapshot() const {
    std::vector<int> v;
    for (auto& e : ctx_) v.push_back(e.uses);
    return v;
  }
  void restore(const std::vector<int>& v) {
    for (size_t i = 0; i < v.size(); ++i) ctx_[i].uses = v[i];
  }

  // ---- annotations: source binder names to skolems ----

  Lifetime resolve_lft(const Lifetime& l) {
    Lifetime r;
    for (auto& a : l.atoms) {
      auto it = a.kind == LAtom::Var ? lft_env_.find(a.name) : lft_env_.end();
      if (it != lft_env_.end()) r = lft_meet(r, it->second);
      else r.atoms.insert(a);
    }
    return r;
  }

  TypeP resolve_ann(const TypeP& t) {
    TypeP r = map_lifetimes(t, [&](const Lifetime& l) { return resolve_lft(l); });
    for (auto& [n, by] : ty_env_) r = subst_type_var(r, n, by);
    for (auto& [n, by] : mult_env_) r = subst_mult_var(r, n, by);
    return r;
  }

  InstArg resolve_inst(const InstArg& a) {
    InstArg r = a;
    if (r.kind == InstArg::Type) r.type = resolve_ann(r.type);
    if (r.kind == InstArg::Lifetime) r.lft = resolve_lft(r.lft);
    if (r.kind == InstArg::Mult)
      for (auto& [n, by] : mult_env_)
        if (r.mult.kind == Mult::Prod && r.mult.vars.count(n)) r.mult = by;
    return r;
  }

  InstArg hole(InstArg::Kind k) {
    InstArg a;
    a.kind = k;
    switch (k) {
      case InstArg::Type: a.type = m_.new_type(level_); break;
      case InstArg::Lifetime: a.lft = m_.new_lft(level_); break;
      case InstArg::Mult: a.mult = Mult::one(); break;
      case InstArg::Bcon: a.bmeta = m_.new_bcon(); break;
    }
    return a;
  }

  // ---- binders ----

  // Opens a ∀ with a fresh skolem; returns the opened body. `src` is the
  // source binder name bound to the skolem for annotations.
  TypeP skolemize(const TypeP& f, Sym src) {
    ++level_;
    const TypeP& body = f->args[0];
    switch (f->bkind) {
      case BinderKind::Lifetime:
      case BinderKind::LifetimeId: {
        Lifetime l;
        l.atoms.insert(m_.new_skolem(src, f->bkind == BinderKind::LifetimeId, level_));
        lft_env_[src] = l;
        return subst_lft_var(body, f->name, l);
      }
      case BinderKind::Mult: {
        Mult v = Mult::var(runtime_sym(src, uint32_t(m_.next_skolem++)));
        mult_env_[src] = v;
        return subst_mult_var(body, f->name, v);
      }
      case BinderKind::Type: {
        TypeP v = ty::var(runtime_sym(src, uint32_t(m_.next_skolem++)));
        ty_env_[src] = v;
        return subst_type_var(body, f->name, v);
      }
    }
    return body;
  }

  TypeP open_holes(TypeP t) {
    for (t = head(t); t->kind == Type::Forall; t = head(t)) {
      InstArg::Kind k = t->bkind == BinderKind::Type   ? InstArg::Type
                        : t->bkind == BinderKind::Mult ? InstArg::Mult
                                                       : InstArg::Lifetime;
      t = instantiate(t, hole(k));
    }
    return t;
  }

  static bool same_binder_class(BinderKind a, BinderKind b) {
    auto lft = [](BinderKind k) { return k == BinderKind::Lifetime || k == BinderKind::LifetimeId; };
    return a == b || (lft(a) && lft(b));
  }

  // ---- checking ----

  void check(const TermP& t, TypeP expect) {
    expect = head(expect);
    if (expect->kind == Type::Forall && t->tag != Term::Gen) {
      auto saved = std::make_tuple(lft_env_, ty_env_, mult_env_);
      TypeP body = skolemize(expect, expect->name);
      std::tie(lft_env_, ty_env_, mult_env_) = saved;
      check(t, body);
      --level_;
      return;
    }
    switch (t->tag) {
      case Term::Lam: return check_lam(t, expect);
      case Term::Gen: return check_gen(t, expect);
      case Term::Let: return let_(t, [&](const TermP& b) { check(b, expect); return expect; }), void();
      case Term::Case: return case_(t, &expect), void();
      case Term::Seq:
        if (!lookup(t->x)) err("UnboundVariable", "unbound variable " + name_of(t->x), t);
        return check(t->args[0], expect);
      default:
        sub(synth(t), expect, t);
    }
  }

  void check_lam(const TermP& t, TypeP expect) {
    if (expect->kind == Type::Meta) {
      TypeP f = ty::fun(m_.new_type(level_), Mult::many(), m_.new_type(level_));
      m_.ty[expect->meta] = f;
      expect = f;
    }
    if (expect->kind != Type::Fun) err("Mismatch", "a function is checked against " + show(expect), t);
    push(t->x, expect->mult, expect->args[0]);
    check(t->args[0], expect->args[1]);
    pop(t);
  }

  void check_gen(const TermP& t, TypeP expect) {
    if (expect->kind != Type::Forall || !same_binder_class(expect->bkind, BinderKind(t->code)))
      err("Mismatch", "a generalization is checked against " + show(expect), t);
    auto saved = std::make_tuple(lft_env_, ty_env_, mult_env_);
    TypeP body = skolemize(expect, t->x);
    check(t->args[0], body);
    --level_;
    std::tie(lft_env_, ty_env_, mult_env_) = saved;
  }

  TypeP synth(const TermP& t) {
    switch (t->tag) {
      case Term::Var: return use(t->x, t);
      case Term::Lit: return ty::int_();
      case Term::Lam: {
        TypeP h = m_.new_type(level_);
        check_lam(t, h);
        return h;
      }
      case Term::App: return synth_app(t);
      case Term::Seq:
        if (!lookup(t->x)) err("UnboundVariable", "unbound variable " + name_of(t->x), t);
        return synth(t->args[0]);
      case Term::Con: return synth_con(t);
      case Term::Let: return let_(t, [&](const TermP& b) { return synth(b); });
      case Term::Case: return case_(t, nullptr);
      case Term::OpApp:
      case Term::MoApp: return synth_op(t);
      case Term::Ann: {
        TypeP a = resolve_ann(t->ty);
        check(t->args[0], a);
        return a;
      }
      case Term::Gen: return synth_gen(t);
      case Term::Inst: {
        TypeP f = synth(t->args[0]);
        for (auto& a : t->inst) {
          f = head(f);
          if (f->kind != Type::Forall) err("BadInstantiation", "instantiating a non-polymorphic term", t);
          try {
            f = instantiate(f, resolve_inst(a));
          } catch (const std::invalid_argument& e) {
            err("BadInstantiation", e.what(), t);
          }
        }
        return f;
      }
      default:
        err("Mismatch", "runtime form in source program", t);
    }
  }

  TypeP synth_gen(const TermP& t) {
    auto saved = std::make_tuple(lft_env_, ty_env_, mult_env_);
    BinderKind k = BinderKind(t->code);
    Type f;
    f.kind = Type::Forall;
    f.bkind = k;
    f.name = t->x;
    f.args = {ty::var(t->x)};  // placeholder body for skolemize
    TypeP opened = skolemize(std::make_shared<const Type>(f), t->x);
    (void)opened;
    TypeP r = m_.resolve(synth(t->args[0]));
    // abstract the skolem back to the binder
    switch (k) {
      case BinderKind::Lifetime:
      case BinderKind::LifetimeId: {
        LAtom sk = *lft_env_[t->x].atoms.begin();
        r = map_lifetimes(r, [&](const Lifetime& l) {
          Lifetime o;
          for (auto& a : l.atoms) {
            if (a == sk) o = lft_meet(o, Lifetime::var(t->x));
            else o.atoms.insert(a);
          }
          return o;
        });
        break;
      }
      case BinderKind::Type:
        r = subst_type_var(r, ty_env_[t->x]->name, ty::var(t->x));
        break;
      case BinderKind::Mult:
        r = subst_mult_var(r, *mult_env_[t->x].vars.begin(), Mult::var(t->x));
        break;
    }
    --level_;
    std::tie(lft_env_, ty_env_, mult_env_) = saved;
    return ty::forall(k, t->x, r);
  }

  TypeP synth_app(const TermP& t) {
    const TermP& f = t->args[0];
    const TermP& a = t->args[1];
    if (f->tag == Term::Lam) {
      // a direct redex is checked as a linear let
      TypeP at = synth(a);
      push(f->x, Mult::one(), at);
      TypeP r = synth(f->args[0]);
      pop(f);
      return r;
    }
    TypeP ft = open_holes(synth(f));
    if (ft->kind == Type::Meta) {
      TypeP fn = ty::fun(m_.new_type(level_), Mult::one(), m_.new_type(level_));
      m_.ty[ft->meta] = fn;
      ft = fn;
    }
    if (ft->kind != Type::Fun) err("Mismatch", "applying a term of type " + show(ft), t);
    {
      Scale s(*this, ft->mult);
      check(a, ft->args[0]);
    }
    return ft->args[1];
  }

  TypeP synth_con(const TermP& t) {
    const CtorDecl* c = nullptr;
    const DataDecl* d = find_ctor(p_.data_decls, t->x, &c);
    if (!d) err("UnboundVariable", "unknown constructor " + name_of(t->x), t);
    if (c->fields.size() != t->args.size()) err("Mismatch", "constructor " + name_of(t->x) + " arity", t);
    std::vector<TypeP> params;
    for (size_t i = 0; i < d->params.size(); ++i) params.push_back(m_.new_type(level_));
    for (size_t i = 0; i < c->fields.size(); ++i) {
      TypeP ft = c->fields[i].second;
      for (size_t j = 0; j < d->params.size(); ++j) ft = subst_type_var(ft, d->params[j], params[j]);
      Scale s(*this, c->fields[i].first);
      check(t->args[i], ft);
    }
    return ty::data(d->name, params);
  }

  TypeP synth_op(const TermP& t) {
    bool is_op = t->tag == Term::OpApp;
    auto kinds = is_op ? op_params(Op(t->code)) : mo_params(Mo(t->code));
    std::vector<InstArg> inst;
    if (t->inst.empty()) {
      for (auto k : kinds) inst.push_back(hole(k));
    } else {
      for (auto& a : t->inst) inst.push_back(resolve_inst(a));
    }
    Signature s;
    try {
      s = is_op ? op_signature_open(Op(t->code), inst) : mo_signature_open(Mo(t->code), inst);
    } catch (const SignatureError& e) {
      err(e.code.c_str(), e.what(), t);
    }
    for (size_t i = 0; i < s.args.size(); ++i) check(t->args[i], s.args[i]);
    for (auto& [a, b] : s.leq) {
      // a ≤ b, phrased as End^b ⊑ End^a so holes are solved by the same engine
      if (auto f = subtype_m(ty::end(b), ty::end(a), m_, p_.data_decls, level_))
        err("SideConditionFailed", (is_op ? op_name(Op(t->code)) : mo_name(Mo(t->code))) + std::string(": ") + f->message, t);
    }
    for (auto& k : s.kinds) kinds_.push_back({k, t->line, t->col});
    return s.result;
  }

  template <class Body>
  TypeP let_(const TermP& t, Body&& body) {
    size_t n = t->binds.size();
    if (t->linear_let) {
      std::vector<TypeP> tys;
      for (auto& b : t->binds) {
        if (b.ann) {
          TypeP a = resolve_ann(b.ann);
          check(b.rhs, a);
          tys.push_back(a);
        } else {
          tys.push_back(synth(b.rhs));
        }
      }
      for (size_t i = 0; i < n; ++i) push(t->binds[i].name, Mult::one(), tys[i]);
    } else {
      std::vector<TypeP> tys;
      for (auto& b : t->binds) {
        tys.push_back(b.ann ? resolve_ann(b.ann) : m_.new_type(level_));
        push(b.name, Mult::many(), tys.back());
      }
      Scale s(*this, Mult::many());
      for (size_t i = 0; i < n; ++i) check(t->binds[i].rhs, tys[i]);
    }
    TypeP r = body(t->body);
    for (size_t i = 0; i < n; ++i) pop(t);
    return r;
  }

  TypeP case_(const TermP& t, const TypeP* expect) {
    TypeP st = head(synth(t->args[0]));
    bool bor = false;
    Bcon bk = Bcon::Mut;
    int bmeta = -1;
    Lifetime bl;
    if (st->kind == Type::Bor) {
      bor = true;
      bk = st->bcon;
      bmeta = st->bmeta;
      bl = st->lft;
      st = head(st->args[0]);
    }
    const DataDecl* d = nullptr;
    if (st->kind == Type::Meta) {
      if (t->alts.empty()) err("Mismatch", "empty case", t);
      d = find_ctor(p_.data_decls, t->alts[0].con, nullptr);
      if (!d) err("UnboundVariable", "unknown constructor", t);
      std::vector<TypeP> ps;
      for (size_t i = 0; i < d->params.size(); ++i) ps.push_back(m_.new_type(level_));
      TypeP dt = ty::data(d->name, ps);
      m_.ty[st->meta] = dt;
      st = dt;
    }
    if (st->kind != Type::Data) err("Mismatch", "case on a value of type " + show(st), t);
    d = find_data(p_.data_decls, st->name);
    if (!d) err("Mismatch", "unknown data type " + name_of(st->name), t);

    auto before = snapshot();
    std::optional<std::vector<int>> after;
    TypeP result = expect ? *expect : nullptr;
    for (auto& alt : t->alts) {
      restore(before);
      const CtorDecl* c = nullptr;
      for (auto& cc : d->ctors)
        if (cc.name == alt.con) c = &cc;
      if (!c) err("Mismatch", "constructor " + name_of(alt.con) + " does not belong to " + name_of(d->name), t);
      if (c->fields.size() != alt.vars.size()) err("Mismatch", "pattern arity for " + name_of(alt.con), t);
      for (size_t i = 0; i < alt.vars.size(); ++i) {
        TypeP ft = c->fields[i].second;
        for (size_t j = 0; j < d->params.size(); ++j) ft = subst_type_var(ft, d->params[j], st->args[j]);
        if (bor) {
          Type b;
          b.kind = Type::Bor;
          b.bcon = bk;
          b.bmeta = bmeta;
          b.lft = bl;
          b.args = {ft};
          ft = std::make_shared<const Type>(b);
        }
        push(alt.vars[i], c->fields[i].first, ft);
      }
      if (result) check(alt.body, result);
      else result = synth(alt.body);
      for (size_t i = 0; i < alt.vars.size(); ++i) pop(alt.body);
      auto now = snapshot();
      if (after) {
        for (size_t i = 0; i < now.size(); ++i)
          if (ctx_[i].mult.kind != Mult::Many && now[i] != (*after)[i])
            err("LinearUnused", "linear variable " + name_of(ctx_[i].name) + " is consumed in some branches only", t);
      } else {
        after = now;
      }
    }
    if (after) restore(*after);
    if (!result) result = m_.new_type(level_);
    return result;
  }

  void finish() {
    for (auto& dk : kinds_) {
      TypeP r = m_.resolve(dk.k.type);
      if (r->kind == Type::Meta) continue;  // unconstrained: any admissible choice works
      std::string f = kind_cond_failure(dk.k, r);
      if (!f.empty()) throw TypeError{{"SideConditionFailed", f, dk.line, dk.col}};
    }
  }
};

}  // namespace

CheckResult type_check(const Program& p) { return Checker(p).run(nullptr); }

CheckResult type_check_at(const Program& p, const TypeP& expected) { return Checker(p).run(&expected); }

}  // namespace pbo
