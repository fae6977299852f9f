// Denotational semantics: no memory; borrowers carry borrow paths and live
// tokens carry histories.

#include "pbo/runtime.hpp"
#include "pbo/syntax.hpp"

namespace pbo {

namespace {

Sym S(const char* s) { return intern(s); }

bool is_plain_tok(const TermP& t) { return t && t->tag == Term::Tok && !t->has_h; }
bool is_hist_tok(const TermP& t) { return t && t->tag == Term::Tok && t->has_h; }
bool is_done(const TermP& t) { return t && t->tag == Term::Done; }
const History& H(const TermP& t) { return t->h ? *t->h : *hist_empty(); }

// A chain of borrower constructors around a core term.
struct Peeled {
  std::vector<TermP> chain;  // outermost first
  TermP core;
};

Peeled peel(TermP t) {
  Peeled p;
  while (t->tag == Term::Wrap) {
    p.chain.push_back(t);
    t = t->args[0];
  }
  p.core = t;
  return p;
}

TermP rebuild(const std::vector<TermP>& chain, TermP core) {
  for (size_t i = chain.size(); i-- > 0;) core = tm::wrap(chain[i]->bcon, chain[i]->paths, core);
  return core;
}

std::vector<Path> extend(const std::vector<Path>& ps, int i) {
  std::vector<Path> r;
  for (auto& p : ps) r.push_back(p.dot(i));
  return r;
}

// Borrower constructor distributed to field i.
TermP distribute(const TermP& w, int i, TermP inner) {
  if (w->bcon == Bcon::Mut) return tm::wrap(Bcon::Mut, extend(w->paths, i), inner);
  return tm::wrap(Bcon::Share, {}, inner);
}

TermP exe(TermP bo, History h) { return tm::xop(XOp::ExeBO, {bo}, share_hist(std::move(h))); }

std::optional<Effect> fire_op(const Config& c, Sym x, const TermP& t) {
  Fx fx(c, "");
  auto arg = [&](size_t i) { return fx.val(t->args[i]->x); };
  auto av = [&](size_t i) { return t->args[i]; };
  auto named = [&](const char* r) {
    fx.e.rule = r;
    return fx.done();
  };
  switch (Op(t->code)) {
    case Op::NewRef:
      if (!is_plain_tok(arg(0)) || !arg(1)) return std::nullopt;
      fx.bind(x, tm::ref_var(t->args[1]->x));
      return named("newRef");
    case Op::FreeRef: {
      auto r = arg(0);
      if (!r || r->tag != Term::RefVar) return std::nullopt;
      fx.bind(x, tm::var(r->x));
      return named("freeRef");
    }
    case Op::NewLifetime: {
      if (!is_plain_tok(arg(0)) || !arg(1)) return std::nullopt;
      Sym now = fx.fresh(S("now"));
      fx.bind(now, tm::tok_h(hist_empty()));
      fx.bind(x, tm::app(av(1), tm::var(now)));
      return named("newLifetime");
    }
    case Op::EndLifetime:
      if (!is_hist_tok(arg(0))) return std::nullopt;
      fx.bind(x, tm::con(names::ur(), {av(0)}));
      return named("endLifetime");
    case Op::Borrow: {
      auto v = arg(1);
      if (!is_plain_tok(arg(0)) || !v) return std::nullopt;
      int64_t bid = fx.fresh_num();
      Sym bm = fx.fresh(S("bm")), bl = fx.fresh(S("bl"));
      fx.bind(bm, tm::wrap(Bcon::Mut, {Path{bid, {}}}, v));
      fx.bind(bl, tm::lend(bid, t->args[1]->x));
      fx.bind(x, tm::con(names::pair(), {tm::var(bm), tm::var(bl)}));
      fx.e.new_bids.push_back(bid);
      return named("borrow");
    }
    case Op::Share: {
      auto v = arg(0);
      if (!v || v->tag != Term::Wrap || v->bcon != Bcon::Mut) return std::nullopt;
      Sym y = fx.fresh(base_of(t->args[0]->x));
      fx.bind(y, tm::wrap(Bcon::Share, {}, v->args[0]));
      fx.bind(x, tm::con(names::ur(), {tm::var(y)}));
      return named("share");
    }
    case Op::Copy: {
      auto v = arg(0);
      if (!v || v->tag != Term::Wrap || v->bcon != Bcon::Share) return std::nullopt;
      fx.bind(x, v->args[0]);
      return named("copy");
    }
    case Op::JoinMut: {
      auto v = arg(0);
      if (!v || v->tag != Term::Wrap) return std::nullopt;
      auto& in = v->args[0];
      if (in->tag != Term::Wrap || in->bcon != Bcon::Mut) return std::nullopt;
      if (v->bcon == Bcon::Mut) {
        auto ps = v->paths;
        ps.insert(ps.end(), in->paths.begin(), in->paths.end());
        fx.bind(x, tm::wrap(Bcon::Mut, std::move(ps), in->args[0]));
      } else {
        fx.bind(x, tm::wrap(Bcon::Share, {}, in->args[0]));
      }
      return named("joinMut");
    }
    case Op::Reclaim: {
      auto l = arg(0), end = arg(1);
      if (!l || l->tag != Term::Lend || !is_hist_tok(end)) return std::nullopt;
      fx.e.rule = "reclaim";
      try {
        Sym c2 = restore_by_history(H(end), Path{l->n, {}}, fx, l->x);
        fx.bind(x, tm::var(c2));
      } catch (const StepError& err) {
        return fx.fail(err.kind, err.what());
      }
      return fx.done();
    }
    case Op::ExecBO: {
      auto now = arg(0);
      if (!is_hist_tok(now) || !arg(1)) return std::nullopt;
      Sym res = fx.fresh(S("res"));
      fx.bind(res, exe(av(1), H(now)));
      fx.bind(x, tm::xop(XOp::ExecPost, {tm::var(res)}));
      return named("execBO");
    }
    default:
      return std::nullopt;
  }
}

std::optional<Effect> fire_exebo(const Config& c, Sym x, const TermP& t) {
  Fx fx(c, "");
  auto bo = fx.val(t->args[0]->x);
  if (!bo || bo->tag != Term::MoApp) return std::nullopt;
  auto named = [&](const char* r) {
    fx.e.rule = r;
    return fx.done();
  };
  const History& h = H(t);
  auto& a = bo->args;
  switch (Mo(bo->code)) {
    case Mo::Pure:
      fx.bind(x, tm::done(a[0]->x, share_hist(h)));
      return named("exeBO.pure");
    case Mo::Bind: {
      Sym res = fx.fresh(S("res"));
      fx.bind(res, exe(a[0], h));
      fx.bind(x, tm::xop(XOp::BindPost, {tm::var(res), a[1]}));
      return named("exeBO.bind");
    }
    case Mo::SexecBO:
      fx.bind(x, tm::xop(XOp::SexecPre, {a[0], a[1]}, share_hist(h)));
      return named("exeBO.sexecBO");
    case Mo::ParBO: {
      Sym r0 = fx.fresh(S("res")), r1 = fx.fresh(S("res"));
      fx.bind(r0, exe(a[0], {}));
      fx.bind(r1, exe(a[1], {}));
      fx.bind(x, tm::xop(XOp::ParPost, {tm::var(r0), tm::var(r1)}, share_hist(h)));
      return named("exeBO.parBO");
    }
    case Mo::Deref:
      fx.bind(x, tm::xop(XOp::DerefPost, {a[0]}, share_hist(h)));
      return named("exeBO.deref");
    case Mo::UpdateRef:
      fx.bind(x, tm::xop(XOp::UpdPre, {a[0], a[1]}, share_hist(h)));
      return named("exeBO.updateRef");
    default:
      return std::nullopt;
  }
}

std::optional<Effect> fire_xop(const Config& c, Sym x, const TermP& t) {
  if (XOp(t->code) == XOp::ExeBO) return fire_exebo(c, x, t);
  Fx fx(c, "");
  auto arg = [&](size_t i) { return fx.val(t->args[i]->x); };
  auto av = [&](size_t i) { return t->args[i]; };
  auto named = [&](const char* r) {
    fx.e.rule = r;
    return fx.done();
  };
  switch (XOp(t->code)) {
    case XOp::ExecPost: {
      auto r = arg(0);
      if (!is_done(r)) return std::nullopt;
      Sym now = fx.fresh(S("now"));
      fx.bind(now, tm::tok_h(share_hist(H(r))));
      fx.bind(x, tm::con(names::pair(), {tm::var(now), tm::var(r->x)}));
      return named("execBO.post");
    }
    case XOp::BindPost: {
      auto r = arg(0);
      if (!is_done(r)) return std::nullopt;
      Sym bo = fx.fresh(S("bo"));
      fx.bind(bo, tm::app(av(1), tm::var(r->x)));
      fx.bind(x, exe(tm::var(bo), H(r)));
      return named("bind.post");
    }
    case XOp::SexecPre: {
      auto now = arg(0);
      if (!is_hist_tok(now) || !arg(1)) return std::nullopt;
      Sym res = fx.fresh(S("res"));
      fx.bind(res, exe(av(1), {}));
      fx.bind(x, tm::xop(XOp::SexecPost, {tm::var(res)}, share_hist(H(t)), share_hist(H(now))));
      return named("sexecBO.pre");
    }
    case XOp::SexecPost: {
      auto r = arg(0);
      if (!is_done(r)) return std::nullopt;
      Sym now = fx.fresh(S("now")), pr = fx.fresh(S("pr"));
      const History& h2 = t->h2 ? *t->h2 : *hist_empty();
      fx.bind(now, tm::tok_h(share_hist(hist_seq(h2, H(r)))));
      fx.bind(pr, tm::con(names::pair(), {tm::var(now), tm::var(r->x)}));
      fx.bind(x, tm::done(pr, share_hist(hist_seq(H(t), H(r)))));
      return named("sexecBO.post");
    }
    case XOp::ParPost: {
      auto r0 = arg(0), r1 = arg(1);
      if (!is_done(r0) || !is_done(r1)) return std::nullopt;
      fx.e.rule = "parBO.post";
      History both;
      try {
        both = hist_par(H(r0), H(r1));
      } catch (const DisjointnessError& err) {
        return fx.fail("SeparationViolation", err.what());
      }
      Sym pr = fx.fresh(S("pr"));
      fx.bind(pr, tm::con(names::pair(), {tm::var(r0->x), tm::var(r1->x)}));
      fx.bind(x, tm::done(pr, share_hist(hist_seq(H(t), both))));
      return fx.done();
    }
    case XOp::DerefPost: {
      auto r = arg(0);
      if (!r || r->tag != Term::Wrap || r->args[0]->tag != Term::RefVar) return std::nullopt;
      Sym b = fx.fresh(S("b"));
      fx.bind(b, distribute(r, 0, tm::var(r->args[0]->x)));
      fx.bind(x, tm::done(b, share_hist(H(t))));
      return named("deref.post");
    }
    case XOp::UpdPre: {
      auto k = arg(0), r = arg(1);
      if (!k || !r || r->tag != Term::Wrap || r->bcon != Bcon::Mut ||
          r->args[0]->tag != Term::RefVar)
        return std::nullopt;
      Sym bo = fx.fresh(S("bo")), res = fx.fresh(S("res"));
      fx.bind(bo, tm::app(av(0), tm::var(r->args[0]->x)));
      fx.bind(res, exe(tm::var(bo), H(t)));
      fx.bind(x, tm::xop(XOp::UpdPrePost, {tm::var(res)}, nullptr, nullptr, r->paths));
      return named("updateRef.pre");
    }
    case XOp::UpdPrePost: {
      auto r = arg(0);
      if (!is_done(r)) return std::nullopt;
      fx.bind(x, tm::xop(XOp::UpdPost, {tm::var(r->x)}, share_hist(H(r)), nullptr, t->paths));
      return named("updateRef.prepost");
    }
    case XOp::UpdPost: {
      auto p = arg(0);
      if (!p || p->tag != Term::Con || p->x != names::pair()) return std::nullopt;
      Sym b = p->args[1]->x;
      Sym r = fx.fresh(S("ref")), pr = fx.fresh(S("pr"));
      fx.bind(r, tm::wrap(Bcon::Mut, t->paths, tm::ref_var(b)));
      fx.bind(pr, tm::con(names::pair(), {p->args[0], tm::var(r)}));
      History upd;
      for (auto& path : t->paths) upd[path] = b;
      fx.bind(x, tm::done(pr, share_hist(hist_seq(H(t), upd))));
      return named("updateRef.post");
    }
    default:
      return std::nullopt;
  }
}

}  // namespace

Sym restore_by_history(const History& h, const Path& p, Fx& fx, Sym v) {
  if (!hist_touches(h, p)) return v;
  auto t = fx.val(v);
  if (!t) throw StepError("RestoreStuck", "restore at " + print_path(p) + ": " + name_of(v) + " is not a value");
  Peeled pv = peel(t);
  TermP core;
  auto rec = h.find(p);
  if (pv.core->tag == Term::RefVar) {
    Sym inner = rec != h.end() ? rec->second : pv.core->x;
    core = tm::ref_var(restore_by_history(h, p.dot(0), fx, inner));
  } else if (rec == h.end() && pv.core->tag == Term::Con) {
    std::vector<TermP> fields;
    for (size_t i = 0; i < pv.core->args.size(); ++i)
      fields.push_back(tm::var(restore_by_history(h, p.dot(int(i)), fx, pv.core->args[i]->x)));
    core = tm::con(pv.core->x, std::move(fields));
  } else {
    throw StepError("RestoreStuck", "restore at " + print_path(p) + ": no rule for " + pretty_print(t));
  }
  Sym v2 = fx.fresh(base_of(v));
  fx.bind(v2, rebuild(pv.chain, core));
  return v2;
}

std::pair<Config, Sym> restore_by_history(const History& h, const Path& p, const Config& c, Sym v) {
  Fx fx(c, "restore");
  Sym r = restore_by_history(h, p, fx, v);
  return {apply_effect(c, fx.done()), r};
}

std::optional<Effect> fire_den(const Config& c, Sym x) {
  if (auto e = fire_common(c, x)) return e;
  auto it = c.env.find(x);
  if (it == c.env.end() || denestable(it->second) || is_value(it->second)) return std::nullopt;
  const TermP& t = it->second;
  switch (t->tag) {
    case Term::Wrap: {
      Peeled p = peel(t);
      if (p.core->tag != Term::Var) return std::nullopt;
      Fx fx(c, "var");
      auto v = fx.val(p.core->x);
      if (!v) return std::nullopt;
      fx.bind(x, rebuild(p.chain, v));
      return fx.done();
    }
    case Term::Case: {
      Fx fx(c, "case-bor");
      auto v = fx.val(t->args[0]->x);
      if (!v || v->tag != Term::Wrap || v->args[0]->tag != Term::Con) return std::nullopt;
      const TermP& con = v->args[0];
      for (auto& a : t->alts) {
        if (a.con != con->x || a.vars.size() != con->args.size()) continue;
        std::map<Sym, Sym> ren;
        for (size_t j = 0; j < a.vars.size(); ++j) {
          Sym n = fx.fresh(a.vars[j]);
          ren[a.vars[j]] = n;
          fx.bind(n, distribute(v, int(j), con->args[j]));
        }
        fx.bind(x, rename(a.body, ren));
        return fx.done();
      }
      return std::nullopt;
    }
    case Term::OpApp:
      return fire_op(c, x, t);
    case Term::XOpApp:
      return fire_xop(c, x, t);
    default:
      return std::nullopt;
  }
}

std::vector<Redex> enumerate_redexes_den(const Config& c) { return enumerate_with(c, fire_den); }
Config step_den(const Config& c, const Redex& r) { return step_with(c, r, fire_den); }
std::optional<std::vector<Sym>> detect_forcing_loop_den(const Config& c, Sym v) {
  return forcing_loop(c, v);
}
bool is_normal_form_den(const Config& c) { return root_is_value(c); }

}  // namespace pbo
