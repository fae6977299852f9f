// Mutative semantics: references are locations in a global memory.

#include "pbo/runtime.hpp"

namespace pbo {

namespace {

Sym S(const char* s) { return intern(s); }

bool is_tok(const TermP& t) { return t && t->tag == Term::Tok; }
bool is_done(const TermP& t) { return t && t->tag == Term::Done; }

std::optional<Effect> fire_op(const Config& c, Sym x, const TermP& t) {
  Fx fx(c, "");
  auto arg = [&](size_t i) { return fx.val(t->args[i]->x); };
  auto av = [&](size_t i) { return t->args[i]; };
  auto named = [&](const char* r) {
    fx.e.rule = r;
    return fx.done();
  };
  switch (Op(t->code)) {
    case Op::NewRef: {
      if (!is_tok(arg(0)) || !arg(1)) return std::nullopt;
      int64_t l = fx.fresh_num();
      fx.bind(x, tm::ref_loc(l));
      fx.e.mem.emplace_back(l, t->args[1]->x);
      return named("newRef");
    }
    case Op::FreeRef: {
      auto r = arg(0);
      if (!r || r->tag != Term::RefLoc) return std::nullopt;
      auto m = c.mem.find(r->n);
      if (m == c.mem.end()) return std::nullopt;
      fx.bind(x, tm::var(m->second));
      fx.e.mem.emplace_back(r->n, std::nullopt);
      return named("freeRef");
    }
    case Op::NewLifetime: {
      if (!is_tok(arg(0)) || !arg(1)) return std::nullopt;
      Sym now = fx.fresh(S("now"));
      fx.bind(now, tm::tok());
      fx.bind(x, tm::app(av(1), tm::var(now)));
      return named("newLifetime");
    }
    case Op::EndLifetime:
      if (!is_tok(arg(0))) return std::nullopt;
      fx.bind(x, tm::con(names::ur(), {av(0)}));
      return named("endLifetime");
    case Op::Borrow: {
      auto v = arg(1);
      if (!is_tok(arg(0)) || !v) return std::nullopt;
      Sym bm = fx.fresh(S("bm")), bl = fx.fresh(S("bl"));
      fx.bind(bm, v);
      fx.bind(bl, v);
      fx.bind(x, tm::con(names::pair(), {tm::var(bm), tm::var(bl)}));
      return named("borrow");
    }
    case Op::Share:
      if (!arg(0)) return std::nullopt;
      fx.bind(x, tm::con(names::ur(), {av(0)}));
      return named("share");
    case Op::Copy:
    case Op::JoinMut: {
      auto v = arg(0);
      if (!v) return std::nullopt;
      fx.bind(x, v);
      return named(Op(t->code) == Op::Copy ? "copy" : "joinMut");
    }
    case Op::Reclaim:
      if (!arg(0) || !is_tok(arg(1))) return std::nullopt;
      fx.bind(x, av(0));
      return named("reclaim");
    case Op::ExecBO: {
      if (!is_tok(arg(0)) || !arg(1)) return std::nullopt;
      Sym res = fx.fresh(S("res"));
      fx.bind(res, tm::xop(XOp::ExeBO, {av(1)}));
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
  auto& a = bo->args;
  switch (Mo(bo->code)) {
    case Mo::Pure:
      fx.bind(x, tm::done(a[0]->x));
      return named("exeBO.pure");
    case Mo::Bind: {
      Sym res = fx.fresh(S("res"));
      fx.bind(res, tm::xop(XOp::ExeBO, {a[0]}));
      fx.bind(x, tm::xop(XOp::BindPost, {tm::var(res), a[1]}));
      return named("exeBO.bind");
    }
    case Mo::SexecBO:
      fx.bind(x, tm::xop(XOp::SexecPre, {a[0], a[1]}));
      return named("exeBO.sexecBO");
    case Mo::ParBO: {
      Sym r0 = fx.fresh(S("res")), r1 = fx.fresh(S("res"));
      fx.bind(r0, tm::xop(XOp::ExeBO, {a[0]}));
      fx.bind(r1, tm::xop(XOp::ExeBO, {a[1]}));
      fx.bind(x, tm::xop(XOp::ParPost, {tm::var(r0), tm::var(r1)}));
      return named("exeBO.parBO");
    }
    case Mo::Deref:
      fx.bind(x, tm::xop(XOp::DerefPost, {a[0]}));
      return named("exeBO.deref");
    case Mo::UpdateRef:
      fx.bind(x, tm::xop(XOp::UpdPre, {a[0], a[1]}));
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
      fx.bind(now, tm::tok());
      fx.bind(x, tm::con(names::pair(), {tm::var(now), tm::var(r->x)}));
      return named("execBO.post");
    }
    case XOp::BindPost: {
      auto r = arg(0);
      if (!is_done(r)) return std::nullopt;
      Sym bo = fx.fresh(S("bo"));
      fx.bind(bo, tm::app(av(1), tm::var(r->x)));
      fx.bind(x, tm::xop(XOp::ExeBO, {tm::var(bo)}));
      return named("bind.post");
    }
    case XOp::SexecPre: {
      if (!is_tok(arg(0)) || !arg(1)) return std::nullopt;
      Sym res = fx.fresh(S("res"));
      fx.bind(res, tm::xop(XOp::ExeBO, {av(1)}));
      fx.bind(x, tm::xop(XOp::SexecPost, {tm::var(res)}));
      return named("sexecBO.pre");
    }
    case XOp::SexecPost: {
      auto r = arg(0);
      if (!is_done(r)) return std::nullopt;
      Sym now = fx.fresh(S("now")), pr = fx.fresh(S("pr"));
      fx.bind(now, tm::tok());
      fx.bind(pr, tm::con(names::pair(), {tm::var(now), tm::var(r->x)}));
      fx.bind(x, tm::done(pr));
      return named("sexecBO.post");
    }
    case XOp::ParPost: {
      auto r0 = arg(0), r1 = arg(1);
      if (!is_done(r0) || !is_done(r1)) return std::nullopt;
      Sym pr = fx.fresh(S("pr"));
      fx.bind(pr, tm::con(names::pair(), {tm::var(r0->x), tm::var(r1->x)}));
      fx.bind(x, tm::done(pr));
      return named("parBO.post");
    }
    case XOp::DerefPost: {
      auto r = arg(0);
      if (!r || r->tag != Term::RefLoc) return std::nullopt;
      auto m = c.mem.find(r->n);
      if (m == c.mem.end()) return std::nullopt;
      Sym b = fx.fresh(S("b"));
      fx.bind(b, tm::var(m->second));
      fx.bind(x, tm::done(b));
      return named("deref.post");
    }
    case XOp::UpdPre: {
      auto k = arg(0), r = arg(1);
      if (!k || !r || r->tag != Term::RefLoc) return std::nullopt;
      auto m = c.mem.find(r->n);
      if (m == c.mem.end()) return std::nullopt;
      Sym bo = fx.fresh(S("bo")), res = fx.fresh(S("res"));
      fx.bind(bo, tm::app(av(0), tm::var(m->second)));
      fx.bind(res, tm::xop(XOp::ExeBO, {tm::var(bo)}));
      fx.bind(x, tm::xop(XOp::UpdPrePost, {tm::var(res)}, nullptr, nullptr, {}, r->n));
      return named("updateRef.pre");
    }
    case XOp::UpdPrePost: {
      auto r = arg(0);
      if (!is_done(r)) return std::nullopt;
      fx.bind(x, tm::xop(XOp::UpdPost, {tm::var(r->x)}, nullptr, nullptr, {}, t->n));
      return named("updateRef.prepost");
    }
    case XOp::UpdPost: {
      auto p = arg(0);
      if (!p || p->tag != Term::Con || p->x != names::pair()) return std::nullopt;
      Sym r = fx.fresh(S("ref")), pr = fx.fresh(S("pr"));
      fx.bind(r, tm::ref_loc(t->n));
      fx.bind(pr, tm::con(names::pair(), {p->args[0], tm::var(r)}));
      fx.bind(x, tm::done(pr));
      fx.e.mem.emplace_back(t->n, p->args[1]->x);
      return named("updateRef.post");
    }
    default:
      return std::nullopt;
  }
}

}  // namespace

std::optional<Effect> fire_mut(const Config& c, Sym x) {
  if (auto e = fire_common(c, x)) return e;
  auto it = c.env.find(x);
  if (it == c.env.end() || denestable(it->second)) return std::nullopt;
  const TermP& t = it->second;
  if (t->tag == Term::OpApp) return fire_op(c, x, t);
  if (t->tag == Term::XOpApp) return fire_xop(c, x, t);
  return std::nullopt;
}

std::vector<Redex> enumerate_redexes_mut(const Config& c) { return enumerate_with(c, fire_mut); }
Config step_mut(const Config& c, const Redex& r) { return step_with(c, r, fire_mut); }
std::optional<std::vector<Sym>> detect_forcing_loop_mut(const Config& c, Sym v) {
  return forcing_loop(c, v);
}
bool is_normal_form_mut(const Config& c) { return root_is_value(c); }

}  // namespace pbo
