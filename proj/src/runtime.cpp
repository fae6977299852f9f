#include "pbo/runtime.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>

#include "pbo/syntax.hpp"

namespace pbo {

const char* sem_name(Sem s) { return s == Sem::Mut ? "mut" : "den"; }

Config initial_config(const Program& p) {
  Config c;
  // root = main, main = body: the result is read off the root after a lookup
  Sym main = runtime_sym(intern("main"), 0);
  c.root = runtime_sym(intern("root"), 0);
  c.env[main] = erase(p.body);
  c.env[c.root] = tm::var(main);
  return c;
}

TermP Fx::val(Sym y) const {
  auto it = c.env.find(y);
  if (it == c.env.end() || !is_value(it->second)) return nullptr;
  return it->second;
}

// ---- shapes ----------------------------------------------------------------

namespace {

bool is_var(const TermP& t) { return t->tag == Term::Var; }

// Index of the first non-variable subterm in a denesting position, or -1.
int denest_index(const TermP& t) {
  switch (t->tag) {
    case Term::App:
      if (!is_var(t->args[0])) return 0;
      if (!is_var(t->args[1])) return 1;
      return -1;
    case Term::Seq: case Term::Case:
      return is_var(t->args[0]) ? -1 : 0;
    case Term::Con: case Term::OpApp: case Term::MoApp:
      for (size_t i = 0; i < t->args.size(); ++i)
        if (!is_var(t->args[i])) return int(i);
      return -1;
    default:
      return -1;
  }
}

}  // namespace

bool denestable(const TermP& t) { return denest_index(t) >= 0; }

std::vector<Sym> forced_vars(const TermP& t) {
  if (denestable(t) || is_value(t)) return {};
  switch (t->tag) {
    case Term::Var: return {t->x};
    case Term::App: return {t->args[0]->x};
    case Term::Seq: return {t->x};
    case Term::Case: return {t->args[0]->x};
    case Term::OpApp: case Term::XOpApp: {
      std::vector<Sym> out;
      for (auto& a : t->args)
        if (is_var(a)) out.push_back(a->x);
      return out;
    }
    case Term::Wrap: {
      TermP in = t;
      while (in->tag == Term::Wrap) in = in->args[0];
      if (is_var(in)) return {in->x};
      return forced_vars(in);
    }
    default:
      return {};
  }
}

// ---- shared rules ----------------------------------------------------------

namespace {

int64_t wrap_arith(Op o, int64_t a, int64_t b) {
  uint64_t x = uint64_t(a), y = uint64_t(b);
  switch (o) {
    case Op::Add: return int64_t(x + y);
    case Op::Sub: return int64_t(x - y);
    default: return int64_t(x * y);
  }
}

bool rel(Op o, int64_t a, int64_t b) {
  switch (o) {
    case Op::Le: return a <= b;
    case Op::Lt: return a < b;
    case Op::Eq: return a == b;
    case Op::Ge: return a >= b;
    case Op::Gt: return a > b;
    default: return a != b;
  }
}

Sym sym_li() { static Sym s = intern("li"); return s; }
Sym sym_b() { static Sym s = intern("b"); return s; }
Sym sym_d() { static Sym s = intern("d"); return s; }

}  // namespace

std::optional<Effect> fire_common(const Config& c, Sym x) {
  auto it = c.env.find(x);
  if (it == c.env.end()) return std::nullopt;
  const TermP& t = it->second;
  if (is_value(t)) return std::nullopt;

  if (t->tag == Term::Let) {
    Fx fx(c, "let");
    std::map<Sym, Sym> ren;
    std::vector<Sym> fresh;
    for (auto& b : t->binds) {
      Sym n = fx.fresh(b.name);
      ren[b.name] = n;
      fresh.push_back(n);
    }
    for (size_t i = 0; i < t->binds.size(); ++i)
      fx.bind(fresh[i], t->linear_let ? t->binds[i].rhs : rename(t->binds[i].rhs, ren));
    fx.bind(x, rename(t->body, ren));
    return fx.done();
  }

  if (int i = denest_index(t); i >= 0) {
    Fx fx(c, "denest");
    Sym d = fx.fresh(sym_d());
    fx.bind(d, t->args[i]);
    Term r = *t;
    r.args[i] = tm::var(d);
    fx.bind(x, std::make_shared<const Term>(std::move(r)));
    return fx.done();
  }

  Fx fx(c, "");
  auto named = [&](const char* rule) {
    fx.e.rule = rule;
    return fx.done();
  };
  switch (t->tag) {
    case Term::Var:
      if (auto v = fx.val(t->x)) {
        fx.bind(x, v);
        return named("var");
      }
      return std::nullopt;
    case Term::App: {
      auto f = fx.val(t->args[0]->x);
      if (!f || f->tag != Term::Lam) return std::nullopt;
      fx.bind(x, rename(f->args[0], {{f->x, t->args[1]->x}}));
      return named("app");
    }
    case Term::Seq:
      if (!fx.val(t->x)) return std::nullopt;
      fx.bind(x, t->args[0]);
      return named("seq");
    case Term::Case: {
      auto v = fx.val(t->args[0]->x);
      if (!v || v->tag != Term::Con) return std::nullopt;
      for (auto& a : t->alts) {
        if (a.con != v->x || a.vars.size() != v->args.size()) continue;
        std::map<Sym, Sym> ren;
        for (size_t j = 0; j < a.vars.size(); ++j) {
          Sym n = fx.fresh(a.vars[j]);
          ren[a.vars[j]] = n;
          fx.bind(n, v->args[j]);
        }
        fx.bind(x, rename(a.body, ren));
        return named("case");
      }
      return std::nullopt;
    }
    case Term::OpApp: {
      Op o = Op(t->code);
      auto arg = [&](size_t i) { return fx.val(t->args[i]->x); };
      if (is_iop(o) || is_irel(o)) {
        auto a = arg(0), b = arg(1);
        if (!a || !b || a->tag != Term::Lit || b->tag != Term::Lit) return std::nullopt;
        if (is_iop(o)) {
          fx.bind(x, tm::lit(wrap_arith(o, a->n, b->n)));
          return named("iop");
        }
        fx.bind(x, tm::con(rel(o, a->n, b->n) ? names::t_true() : names::t_false(), {}));
        return named("irel");
      }
      switch (o) {
        case Op::Par:
          if (!arg(0) || !arg(1)) return std::nullopt;
          fx.bind(x, tm::con(names::pair(), {t->args[0], t->args[1]}));
          return named("par");
        case Op::Consume:
          if (!arg(0)) return std::nullopt;
          fx.bind(x, tm::con(names::unit(), {}));
          return named("consume");
        case Op::Move:
          if (!arg(0)) return std::nullopt;
          fx.bind(x, tm::con(names::ur(), {t->args[0]}));
          return named("move");
        case Op::Linearly: {
          if (!arg(0)) return std::nullopt;
          Sym li = fx.fresh(sym_li()), b = fx.fresh(sym_b());
          fx.bind(li, tm::tok());
          fx.bind(b, tm::app(t->args[0], tm::var(li)));
          fx.bind(x, tm::xop(XOp::Linear, {tm::var(b)}));
          return named("linearly");
        }
        case Op::WithLinearly: {
          if (!arg(0)) return std::nullopt;
          Sym li = fx.fresh(sym_li());
          fx.bind(li, tm::tok());
          fx.bind(x, tm::con(names::pair(), {tm::var(li), t->args[0]}));
          return named("withLinearly");
        }
        default:
          return std::nullopt;
      }
    }
    case Term::XOpApp:
      if (XOp(t->code) == XOp::Linear) {
        auto v = fx.val(t->args[0]->x);
        if (!v) return std::nullopt;
        fx.bind(x, v);
        return named("linear");
      }
      return std::nullopt;
    default:
      return std::nullopt;
  }
}

void apply_effect_in_place(Config& r, const Effect& e) {
  for (auto& [x, t] : e.binds) r.env[x] = t;
  for (auto& [l, v] : e.mem) {
    if (v) r.mem[l] = *v;
    else r.mem.erase(l);
  }
  for (auto b : e.new_bids) r.bids.insert(b);
  r.next += e.used;
}

Config apply_effect(const Config& c, const Effect& e) {
  Config r = c;
  apply_effect_in_place(r, e);
  return r;
}

// ---- enumeration -----------------------------------------------------------

namespace {

const TermP* lookup(const Config& c, Sym x) {
  auto it = c.env.find(x);
  return it == c.env.end() ? nullptr : &it->second;
}

// DFS over the forcing graph restricted to non-value bindings. Calls visit on
// each binding in preorder; returns a cycle if a back edge is found.
template <class Visit>
std::optional<std::vector<Sym>> forcing_dfs(const Config& c, Sym start, Visit&& visit) {
  std::unordered_map<Sym, int> state;  // 1 = on stack, 2 = done
  std::optional<std::vector<Sym>> cycle;
  struct Frame {
    Sym x;
    std::vector<Sym> succ;
    size_t i = 0;
  };
  std::vector<Frame> stack;
  auto push = [&](Sym x) {
    const TermP* t = lookup(c, x);
    state[x] = 1;
    visit(x);
    Frame f{x, {}, 0};
    if (t && !is_value(*t)) f.succ = forced_vars(*t);
    stack.push_back(std::move(f));
  };
  const TermP* t0 = lookup(c, start);
  if (!t0 || is_value(*t0)) return std::nullopt;
  push(start);
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.i == f.succ.size()) {
      state[f.x] = 2;
      stack.pop_back();
      continue;
    }
    Sym y = f.succ[f.i++];
    const TermP* ty = lookup(c, y);
    if (!ty || is_value(*ty)) continue;
    int s = state.count(y) ? state[y] : 0;
    if (s == 1) {
      if (!cycle) {
        std::vector<Sym> cyc;
        size_t k = stack.size();
        while (k > 0 && stack[k - 1].x != y) --k;
        for (size_t j = k - 1; j < stack.size(); ++j) cyc.push_back(stack[j].x);
        cycle = std::move(cyc);
      }
    } else if (s == 0) {
      push(y);
    }
  }
  return cycle;
}

}  // namespace

std::vector<Redex> enumerate_with(const Config& c, const FireFn& fire) {
  std::vector<Redex> out;
  auto cyc = forcing_dfs(c, c.root, [&](Sym x) {
    if (auto e = fire(c, x)) out.push_back({x, e->rule});
  });
  if (cyc) out.push_back({c.root, "loop"});
  return out;
}

Config step_with(const Config& c, const Redex& r, const FireFn& fire) {
  if (r.rule == "loop") {
    if (!forcing_loop(c, c.root)) throw std::logic_error("loop step without a forcing loop");
    return c;
  }
  auto e = fire(c, r.target);
  if (!e || e->rule != r.rule)
    throw std::logic_error("redex " + name_of(r.target) + ":" + r.rule + " does not apply");
  if (!e->error_kind.empty()) throw StepError(e->error_kind, e->error);
  return apply_effect(c, *e);
}

std::optional<std::vector<Sym>> forcing_loop(const Config& c, Sym v) {
  return forcing_dfs(c, v, [](Sym) {});
}

bool root_is_value(const Config& c) {
  const TermP* t = lookup(c, c.root);
  return t && is_value(*t);
}

TermP chase(const Config& c, Sym x) {
  for (int guard = 0; guard < 100000; ++guard) {
    const TermP* t = lookup(c, x);
    if (!t) return nullptr;
    if ((*t)->tag != Term::Var) return *t;
    x = (*t)->x;
  }
  return nullptr;
}

// ---- canonical form --------------------------------------------------------

namespace {

uint64_t mix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

uint64_t fnv(const std::string& s, uint64_t basis) {
  uint64_t h = basis;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return mix64(h);
}

class Canon {
 public:
  explicit Canon(const Config& c) : c_(c) {}

  std::string run() {
    ref(c_.root);
    drain();
    // leaked locations, then unreachable bindings, in colour order
    std::vector<Sym> garbage;
    for (auto& [x, t] : c_.env)
      if (!vnum_.count(x)) garbage.push_back(x);
    std::vector<std::pair<int64_t, Sym>> leaked;
    for (auto& [l, v] : c_.mem)
      if (!lnum_.count(l)) leaked.emplace_back(l, v);
    if (!garbage.empty() || !leaked.empty()) {
      compute_colours(garbage);
      auto key = [&](Sym v) -> std::pair<uint64_t, uint64_t> {
        auto it = vnum_.find(v);
        if (it != vnum_.end()) return {0, uint64_t(it->second)};
        auto ci = colour_.find(v);
        return {1, ci == colour_.end() ? 0 : ci->second};
      };
      std::stable_sort(leaked.begin(), leaked.end(),
                       [&](auto& a, auto& b) { return key(a.second) < key(b.second); });
      for (auto& [l, v] : leaked) {
        if (lnum_.count(l)) continue;
        lnum_[l] = int(lnum_.size());
        ref(v);
        drain();
      }
      std::stable_sort(garbage.begin(), garbage.end(),
                       [&](Sym a, Sym b) { return colour_[a] < colour_[b]; });
      for (Sym g : garbage) {
        if (vnum_.count(g)) continue;
        ref(g);
        drain();
      }
    }
    std::vector<std::pair<int, int>> mem;
    for (auto& [l, v] : c_.mem) mem.emplace_back(lnum_.at(l), vnum_.at(v));
    std::sort(mem.begin(), mem.end());
    out_ += "|M";
    for (auto& [l, v] : mem) out_ += " l" + std::to_string(l) + ">v" + std::to_string(v);
    size_t extra = 0;
    for (auto b : c_.bids)
      if (!bnum_.count(b)) ++extra;
    out_ += "|B" + std::to_string(c_.bids.size()) + "/" + std::to_string(extra);
    return out_;
  }

 private:
  const Config& c_;
  std::unordered_map<Sym, int> vnum_;
  std::vector<Sym> order_;
  size_t done_ = 0;
  std::map<int64_t, int> lnum_, bnum_;
  std::unordered_map<Sym, uint64_t> colour_;
  bool colour_mode_ = false;
  std::string out_;

  void drain() {
    while (done_ < order_.size()) {
      Sym x = order_[done_++];
      out_ += "v" + std::to_string(vnum_[x]) + "=";
      auto it = c_.env.find(x);
      if (it == c_.env.end()) {
        out_ += "!";
      } else {
        std::vector<Sym> locals;
        ser(it->second, locals, out_);
      }
      out_ += ";";
    }
  }

  std::string ref(Sym x) {
    auto it = vnum_.find(x);
    if (it != vnum_.end()) return "v" + std::to_string(it->second);
    if (colour_mode_) {
      auto ci = colour_.find(x);
      return ci == colour_.end() ? "?" : "c" + std::to_string(ci->second);
    }
    int n = int(vnum_.size());
    vnum_[x] = n;
    order_.push_back(x);
    return "v" + std::to_string(n);
  }

  std::string loc(int64_t l) {
    auto it = lnum_.find(l);
    if (it != lnum_.end()) return "l" + std::to_string(it->second);
    if (colour_mode_) return "l?";
    int n = int(lnum_.size());
    lnum_[l] = n;
    auto m = c_.mem.find(l);
    if (m != c_.mem.end()) ref(m->second);
    return "l" + std::to_string(n);
  }

  std::string bid(int64_t b) {
    auto it = bnum_.find(b);
    if (it != bnum_.end()) return "b" + std::to_string(it->second);
    if (colour_mode_) return "b?";
    int n = int(bnum_.size());
    bnum_[b] = n;
    return "b" + std::to_string(n);
  }

  std::string path(const Path& p) {
    std::string s = bid(p.bid);
    for (int i : p.idx) s += "." + std::to_string(i);
    return s;
  }

  void hist(const HistoryP& h, std::string& s) {
    s += "{";
    if (h) {
      // name-independent record order
      std::vector<const std::pair<const Path, Sym>*> recs;
      for (auto& kv : *h) recs.push_back(&kv);
      auto key = [&](const std::pair<const Path, Sym>* r) {
        auto bi = bnum_.find(r->first.bid);
        auto vi = vnum_.find(r->second);
        return std::make_tuple(bi == bnum_.end() ? INT32_MAX : bi->second, r->first.idx,
                               vi == vnum_.end() ? INT32_MAX : vi->second);
      };
      std::stable_sort(recs.begin(), recs.end(), [&](auto a, auto b) { return key(a) < key(b); });
      for (auto* r : recs) s += path(r->first) + ">" + ref(r->second) + ",";
    }
    s += "}";
  }

  void ser_ref(Sym x, const std::vector<Sym>& locals, std::string& s) {
    for (size_t i = locals.size(); i-- > 0;) {
      if (locals[i] == x) {
        s += "L" + std::to_string(locals.size() - 1 - i);
        return;
      }
    }
    s += ref(x);
  }

  void ser(const TermP& t, std::vector<Sym>& locals, std::string& s) {
    s += char('A' + t->tag);
    switch (t->tag) {
      case Term::Var:
        ser_ref(t->x, locals, s);
        return;
      case Term::Lit:
        s += std::to_string(t->n);
        return;
      case Term::Lam:
        locals.push_back(t->x);
        ser(t->args[0], locals, s);
        locals.pop_back();
        return;
      case Term::Seq:
        ser_ref(t->x, locals, s);
        break;
      case Term::Let: {
        s += t->linear_let ? "1" : "w";
        s += std::to_string(t->binds.size());
        size_t n0 = locals.size();
        if (!t->linear_let)
          for (auto& b : t->binds) locals.push_back(b.name);
        for (auto& b : t->binds) {
          s += "(";
          ser(b.rhs, locals, s);
          s += ")";
        }
        if (t->linear_let)
          for (auto& b : t->binds) locals.push_back(b.name);
        ser(t->body, locals, s);
        locals.resize(n0);
        return;
      }
      case Term::Con:
        s += name_of(t->x);
        break;
      case Term::Case:
        s += "(";
        ser(t->args[0], locals, s);
        s += ")";
        for (auto& a : t->alts) {
          s += "|" + name_of(a.con) + "/" + std::to_string(a.vars.size()) + ":";
          size_t n0 = locals.size();
          for (Sym v : a.vars) locals.push_back(v);
          ser(a.body, locals, s);
          locals.resize(n0);
        }
        return;
      case Term::OpApp: case Term::MoApp:
        s += std::to_string(t->code);
        break;
      case Term::XOpApp:
        s += std::to_string(t->code);
        if (t->has_h) hist(t->h, s);
        if (t->h2) hist(t->h2, s);
        for (auto& p : t->paths) s += "p" + path(p);
        if (t->paths.empty() && (XOp(t->code) == XOp::UpdPrePost || XOp(t->code) == XOp::UpdPost))
          s += loc(t->n);
        break;
      case Term::Tok:
        if (t->has_h) hist(t->h, s);
        return;
      case Term::RefLoc:
        s += loc(t->n);
        return;
      case Term::RefVar:
        ser_ref(t->x, locals, s);
        return;
      case Term::Lend:
        s += bid(t->n);
        ser_ref(t->x, locals, s);
        return;
      case Term::Done:
        ser_ref(t->x, locals, s);
        if (t->h) hist(t->h, s);
        return;
      case Term::Wrap:
        s += t->bcon == Bcon::Mut ? "M" : "S";
        for (auto& p : t->paths) s += path(p) + ",";
        break;
      default:
        break;
    }
    s += "[";
    for (auto& a : t->args) {
      ser(a, locals, s);
      s += ",";
    }
    s += "]";
  }

  // Weisfeiler–Lehman style refinement over unnumbered bindings.
  void compute_colours(const std::vector<Sym>& garbage) {
    colour_mode_ = true;
    std::unordered_map<Sym, uint64_t> next;
    for (int round = 0; round < 4; ++round) {
      next.clear();
      for (Sym g : garbage) {
        std::string s;
        std::vector<Sym> locals;
        ser(c_.env.at(g), locals, s);
        // mem: a location's content participates in its owner's colour
        next[g] = fnv(s, 0xcbf29ce484222325ULL);
      }
      colour_.swap(next);
    }
    colour_mode_ = false;
  }
};

}  // namespace

std::string canonical(const Config& c) {
  Canon k(c);
  return k.run();
}

Hash128 canonical_hash(const Config& c) {
  std::string s = canonical(c);
  return {fnv(s, 0xcbf29ce484222325ULL), fnv(s, 0x84222325cbf29ce4ULL)};
}

std::string dump_config(const Config& c) {
  std::ostringstream o;
  auto line = [&](Sym x, const TermP& t) { o << name_of(x) << " = " << pretty_print(t) << "\n"; };
  if (auto it = c.env.find(c.root); it != c.env.end()) line(it->first, it->second);
  for (auto& [x, t] : c.env)
    if (x != c.root) line(x, t);
  if (!c.mem.empty()) {
    o << "mem:";
    for (auto& [l, v] : c.mem) o << " ℓ" << l << "↦" << name_of(v);
    o << "\n";
  }
  if (!c.bids.empty()) {
    o << "bids:";
    for (auto b : c.bids) o << " b" << b;
    o << "\n";
  }
  o << "root: " << name_of(c.root) << "\n";
  return o.str();
}

std::vector<Redex> enumerate_redexes(const Config& c, Sem s) {
  return s == Sem::Mut ? enumerate_redexes_mut(c) : enumerate_redexes_den(c);
}
Config step(const Config& c, const Redex& r, Sem s) {
  return s == Sem::Mut ? step_mut(c, r) : step_den(c, r);
}
bool is_normal_form(const Config& c, Sem s) {
  return s == Sem::Mut ? is_normal_form_mut(c) : is_normal_form_den(c);
}

}  // namespace pbo
