// Runs under schedulers, reduction graphs, and the checkers built on them.

#include "pbo/harness.hpp"

#include <chrono>
#include <cstdlib>
#include <deque>
#include <unordered_map>

#include "pbo/syntax.hpp"

namespace pbo {

// ---- schedulers ------------------------------------------------------------

Scheduler Scheduler::random(uint64_t seed) {
  Scheduler s;
  s.kind_ = Random;
  s.seed_ = seed;
  s.rng_.seed(seed);
  return s;
}
Scheduler Scheduler::first() { return Scheduler{}; }
Scheduler Scheduler::last() {
  Scheduler s;
  s.kind_ = Last;
  return s;
}
Scheduler Scheduler::round_robin() {
  Scheduler s;
  s.kind_ = RoundRobin;
  return s;
}
Scheduler Scheduler::scripted(std::vector<size_t> script) {
  Scheduler s;
  s.kind_ = Scripted;
  s.script_ = std::move(script);
  return s;
}

size_t Scheduler::pick(const std::vector<Redex>& rs) {
  size_t n = rs.size();
  switch (kind_) {
    case Random: return std::uniform_int_distribution<size_t>(0, n - 1)(rng_);
    case First: return 0;
    case Last: return n - 1;
    case RoundRobin: return counter_++ % n;
    case Scripted: {
      // past the end of the script fall back to the first redex
      size_t i = counter_ < script_.size() ? script_[counter_] % n : 0;
      ++counter_;
      return i;
    }
  }
  return 0;
}

std::string Scheduler::describe() const {
  switch (kind_) {
    case Random: return "seeded-random(" + std::to_string(seed_) + ")";
    case First: return "first";
    case Last: return "last";
    case RoundRobin: return "round-robin";
    case Scripted: return "scripted";
  }
  return "?";
}

// ---- runs ------------------------------------------------------------------

const char* outcome_name(Outcome::Kind k) {
  switch (k) {
    case Outcome::ReturnedInt: return "ReturnedInt";
    case Outcome::NormalValue: return "NormalValue";
    case Outcome::BlackHole: return "BlackHole";
    case Outcome::BudgetExhausted: return "BudgetExhausted";
    case Outcome::Stuck: return "Stuck";
    case Outcome::SeparationViolation: return "SeparationViolation";
  }
  return "?";
}

std::string describe(const Outcome& o) {
  std::string s = outcome_name(o.kind);
  if (o.kind == Outcome::ReturnedInt) s += " " + std::to_string(o.value);
  else if (!o.detail.empty()) s += " " + o.detail;
  return s;
}

namespace {

FireFn fire_of(Sem s) { return s == Sem::Mut ? FireFn(fire_mut) : FireFn(fire_den); }

// Shape of a value: constructors and integers are followed, everything else
// is abbreviated.
std::string shape(const Config& c, Sym x, int depth) {
  TermP t = chase(c, x);
  if (!t) return "?";
  if (depth > 8) return "…";
  switch (t->tag) {
    case Term::Lit: return std::to_string(t->n);
    case Term::Con: {
      std::string s = name_of(t->x);
      if (t->x == names::pair() && t->args.size() == 2)
        return "(" + shape(c, t->args[0]->x, depth + 1) + ", " + shape(c, t->args[1]->x, depth + 1) + ")";
      for (auto& a : t->args) s += " " + (a->tag == Term::Var ? shape(c, a->x, depth + 1) : std::string("?"));
      return t->args.empty() ? s : "(" + s + ")";
    }
    case Term::Lam: return "<fun>";
    case Term::Tok: return "•";
    case Term::RefLoc: return "Ref ℓ";
    default: return pretty_print(t);
  }
}

}  // namespace

std::optional<Outcome> terminal_outcome(const Config& c, Sem sem) {
  Outcome o;
  if (root_is_value(c)) {
    TermP v = chase(c, c.root);
    if (v && v->tag == Term::Lit) {
      o.kind = Outcome::ReturnedInt;
      o.value = v->n;
    } else {
      o.kind = Outcome::NormalValue;
      o.detail = shape(c, c.root, 0);
    }
    return o;
  }
  auto rs = enumerate_redexes(c, sem);
  if (rs.empty()) {
    o.kind = Outcome::Stuck;
    o.detail = "no redex at " + name_of(c.root);
    return o;
  }
  for (auto& r : rs)
    if (r.rule != "loop") return std::nullopt;
  o.kind = Outcome::BlackHole;
  if (auto cyc = forcing_loop(c, c.root)) o.cycle = *cyc;
  return o;
}

RunResult run(const Program& p, Sem sem, Scheduler& sched, size_t budget, bool record_trace) {
  return run_config(initial_config(p), sem, sched, budget, record_trace);
}

RunResult run_config(Config c, Sem sem, Scheduler& sched, size_t budget, bool record_trace) {
  RunResult rr;
  FireFn fire = fire_of(sem);
  for (size_t i = 0;; ++i) {
    if (root_is_value(c)) {
      rr.outcome = *terminal_outcome(c, sem);
      rr.outcome.steps = i;
      break;
    }
    auto rs = enumerate_with(c, fire);
    bool only_loop = std::all_of(rs.begin(), rs.end(), [](const Redex& r) { return r.rule == "loop"; });
    if (rs.empty() || only_loop) {
      rr.outcome = *terminal_outcome(c, sem);
      rr.outcome.steps = i;
      break;
    }
    if (i >= budget) {
      rr.outcome.kind = Outcome::BudgetExhausted;
      rr.outcome.steps = i;
      break;
    }
    const Redex& r = rs[sched.pick(rs)];
    if (r.rule == "loop") continue;  // identity step
    auto e = fire(c, r.target);
    if (!e) throw std::logic_error("enumerated redex does not fire");
    if (!e->error_kind.empty()) {
      rr.outcome.kind = e->error_kind == "SeparationViolation" ? Outcome::SeparationViolation : Outcome::Stuck;
      rr.outcome.detail = e->rule + ": " + e->error;
      rr.outcome.steps = i;
      break;
    }
    for (auto& [l, v] : e->mem)
      if (v && !c.mem.count(l)) rr.alloc_step[l] = i;
    if (record_trace) {
      TraceRecord tr;
      tr.step_index = i;
      tr.rule = e->rule;
      tr.target = r.target;
      tr.env_delta = e->binds;
      tr.mem_delta = e->mem;
      tr.bids_delta = e->new_bids;
      for (auto& [x, t] : e->binds) {
        if (t->tag != Term::Tok || !t->has_h) continue;
        auto old = c.env.find(x);
        HistoryP before = old != c.env.end() && old->second->tag == Term::Tok ? old->second->h : nullptr;
        tr.history_events.push_back({x, before, t->h});
      }
      rr.trace.push_back(std::move(tr));
    }
    apply_effect_in_place(c, *e);
  }
  rr.final = std::move(c);
  return rr;
}

size_t node_cap_from_env(size_t dflt) {
  const char* s = std::getenv("PBO_NODE_CAP");
  if (!s || !*s) return dflt;
  char* end = nullptr;
  unsigned long long v = std::strtoull(s, &end, 10);
  return (end && *end == 0 && v > 0) ? size_t(v) : dflt;
}

// ---- reduction graphs ------------------------------------------------------

ReductionGraph reduction_graph(const Program& p, Sem sem, const GraphOptions& opt) {
  return reduction_graph_from(initial_config(p), sem, opt);
}

// Breadth-first, nodes identified up to alpha. Configurations are kept only
// for the frontier (and on request).
ReductionGraph reduction_graph_from(const Config& c0, Sem sem, const GraphOptions& opt) {
  ReductionGraph g;
  FireFn fire = fire_of(sem);
  std::unordered_map<Hash128, size_t, Hash128Hasher> index;
  std::deque<std::pair<size_t, Config>> queue;

  auto add = [&](const Config& c, int depth) -> std::optional<size_t> {
    Hash128 h = canonical_hash(c);
    auto it = index.find(h);
    if (it != index.end()) return it->second;
    if (g.nodes.size() >= opt.node_cap) {
      g.aborted = true;
      return std::nullopt;
    }
    size_t id = g.nodes.size();
    GraphNode n;
    n.key = h;
    n.depth = depth;
    g.nodes.push_back(n);
    index.emplace(h, id);
    g.max_depth = std::max(g.max_depth, depth);
    if (opt.keep_configs) g.kept.emplace(id, c);
    queue.emplace_back(id, c);
    return id;
  };

  add(c0, 0);
  while (!queue.empty() && !g.aborted) {
    auto [id, c] = std::move(queue.front());
    queue.pop_front();
    int depth = g.nodes[id].depth;
    if (root_is_value(c)) {
      g.nodes[id].normal = true;
      g.nodes[id].expanded = true;
      continue;
    }
    if (depth >= opt.depth) continue;
    auto rs = enumerate_with(c, fire);
    if (rs.empty()) g.nodes[id].stuck = true;
    std::vector<std::pair<size_t, std::string>> succ;
    for (auto& r : rs) {
      std::optional<size_t> to;
      if (r.rule == "loop") {
        to = id;
      } else {
        auto e = fire(c, r.target);
        if (!e) continue;
        if (!e->error_kind.empty()) {
          g.nodes[id].error = e->error_kind + " (" + e->rule + "): " + e->error;
          continue;
        }
        to = add(apply_effect(c, *e), depth + 1);
        if (!to) break;
      }
      ++g.edges;
      bool dup = std::any_of(succ.begin(), succ.end(), [&](auto& s) { return s.first == *to; });
      if (!dup) succ.emplace_back(*to, r.rule);
    }
    if (g.aborted) break;
    g.nodes[id].succ = std::move(succ);
    g.nodes[id].expanded = true;
  }
  return g;
}

// ---- checkers ----------------------------------------------------------------

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

}  // namespace

Report check_diamond(const Program& p, const std::string& name, int depth, size_t node_cap) {
  auto t0 = Clock::now();
  Report rep;
  rep.check = "diamond";
  rep.program = name;
  rep.parameters = {{"semantics", "den"}, {"depth", std::to_string(depth)}, {"node_cap", std::to_string(node_cap)}};
  GraphOptions opt;
  opt.depth = depth + 1;  // successors of checked nodes must themselves be expanded
  opt.node_cap = node_cap;
  ReductionGraph g = reduction_graph(p, Sem::Den, opt);
  rep.nodes = g.nodes.size();
  rep.edges = g.edges;
  rep.max_depth = g.max_depth;

  for (size_t u = 0; u < g.nodes.size(); ++u) {
    const GraphNode& n = g.nodes[u];
    if (n.stuck) {
      ++rep.stuck;
      rep.violations.push_back({"Stuck", "node " + std::to_string(u) + " has no redex", {}});
    }
    if (!n.error.empty()) rep.violations.push_back({"StepError", n.error, {}});
    if (!n.expanded || n.depth >= depth) continue;
    for (size_t i = 0; i < n.succ.size(); ++i)
      for (size_t j = i + 1; j < n.succ.size(); ++j) {
        const GraphNode& a = g.nodes[n.succ[i].first];
        const GraphNode& b = g.nodes[n.succ[j].first];
        if (!a.expanded || !b.expanded) continue;
        // c1 -> d <- c2, where a normal form counts as its own successor
        std::set<size_t> sa;
        for (auto& s : a.succ) sa.insert(s.first);
        if (a.normal) sa.insert(n.succ[i].first);
        bool joined = b.normal && sa.count(n.succ[j].first);
        for (auto& s : b.succ) joined = joined || sa.count(s.first);
        if (!joined)
          rep.violations.push_back({"DiamondViolation",
                                    "node " + std::to_string(u) + ": " + n.succ[i].second + " vs " +
                                        n.succ[j].second + " do not join in one step",
                                    {}});
      }
  }
  if (g.aborted) rep.verdict = "ABORTED";
  else rep.verdict = rep.violations.empty() ? "PASS" : "FAIL";
  rep.wall_ms = ms_since(t0);
  return rep;
}

Report check_leak_freedom(const Program& p, const std::string& name, size_t n_schedules, size_t budget,
                          uint64_t seed0) {
  auto t0 = Clock::now();
  Report rep;
  rep.check = "leak";
  rep.program = name;
  rep.parameters = {{"semantics", "mut"},
                    {"schedules", std::to_string(n_schedules)},
                    {"budget", std::to_string(budget)},
                    {"seed", std::to_string(seed0)}};
  for (size_t k = 0; k < n_schedules; ++k) {
    Scheduler s = Scheduler::random(seed0 + k);
    RunResult rr = run(p, Sem::Mut, s, budget);
    ++rep.runs;
    ++rep.outcomes[outcome_name(rr.outcome.kind)];
    if (rr.outcome.kind == Outcome::Stuck) ++rep.stuck;
    rep.max_depth = std::max(rep.max_depth, int(rr.outcome.steps));
    bool normal = rr.outcome.kind == Outcome::ReturnedInt || rr.outcome.kind == Outcome::NormalValue;
    if (!normal) continue;
    for (auto& [l, v] : rr.final.mem) {
      ++rep.residues;
      auto a = rr.alloc_step.find(l);
      std::string where = a == rr.alloc_step.end() ? "?" : std::to_string(a->second);
      rep.violations.push_back({"Leak",
                                "seed " + std::to_string(seed0 + k) + ": location ℓ" + std::to_string(l) +
                                    " allocated at step " + where + " holds " + name_of(v),
                                {}});
    }
  }
  rep.verdict = rep.violations.empty() ? "PASS" : "FAIL";
  rep.wall_ms = ms_since(t0);
  return rep;
}

Report check_behavior_uniqueness(const Program& p, const std::string& name, size_t n_schedules,
                                 size_t budget, uint64_t seed0) {
  auto t0 = Clock::now();
  Report rep;
  rep.check = "uniq";
  rep.program = name;
  rep.parameters = {{"semantics", "mut+den"},
                    {"schedules", std::to_string(n_schedules)},
                    {"budget", std::to_string(budget)},
                    {"seed", std::to_string(seed0)}};
  std::set<int64_t> values;
  std::set<std::string> shapes;
  bool terminated = false, diverged = false;
  for (Sem sem : {Sem::Mut, Sem::Den})
    for (size_t k = 0; k < n_schedules; ++k) {
      Scheduler s = Scheduler::random(seed0 + k);
      RunResult rr = run(p, sem, s, budget);
      ++rep.runs;
      ++rep.outcomes[outcome_name(rr.outcome.kind)];
      rep.max_depth = std::max(rep.max_depth, int(rr.outcome.steps));
      switch (rr.outcome.kind) {
        case Outcome::ReturnedInt:
          values.insert(rr.outcome.value);
          terminated = true;
          break;
        case Outcome::NormalValue:
          terminated = true;
          if (sem == Sem::Mut) shapes.insert(rr.outcome.detail);
          break;
        case Outcome::BlackHole:
          diverged = true;
          break;
        case Outcome::BudgetExhausted:
          break;
        case Outcome::Stuck:
          ++rep.stuck;
          rep.violations.push_back(
              {"Stuck", std::string(sem_name(sem)) + " seed " + std::to_string(seed0 + k) + ": " + rr.outcome.detail, {}});
          break;
        case Outcome::SeparationViolation:
          rep.violations.push_back({"SeparationViolation",
                                    std::string(sem_name(sem)) + " seed " + std::to_string(seed0 + k) + ": " +
                                        rr.outcome.detail,
                                    {}});
          break;
      }
    }
  rep.values.assign(values.begin(), values.end());
  if (values.size() > 1) {
    std::string vs;
    for (auto v : values) vs += (vs.empty() ? "" : ", ") + std::to_string(v);
    rep.violations.push_back({"DistinctResults", "returned integers {" + vs + "}", {}});
  }
  if (terminated && diverged)
    rep.violations.push_back({"MixedTermination", "some runs return, others black-hole", {}});
  rep.verdict = rep.violations.empty() ? "PASS" : "FAIL";
  rep.wall_ms = ms_since(t0);
  return rep;
}

}  // namespace pbo

// ---- worked example --------------------------------------------------------

namespace pbo {

namespace {

// x's binding is literally the integer n (no alias chain).
bool bound_to_lit(const Config& c, Sym x, int64_t n) {
  auto it = c.env.find(x);
  return it != c.env.end() && it->second->tag == Term::Lit && it->second->n == n;
}

std::string match_pair(const Config& c, const TermP& pr, Sem sem) {
  TermP tok = chase(c, pr->args[0]->x), bor = chase(c, pr->args[1]->x);
  if (!tok || tok->tag != Term::Tok) return "first component is not a token";
  if (!bor) return "second component unbound";
  if (sem == Sem::Mut) {
    if (tok->has_h) return "mutative token carries a history";
    if (bor->tag != Term::RefLoc) return "borrower is not Ref ℓ";
    auto m = c.mem.find(bor->n);
    if (m == c.mem.end()) return "ℓ not in memory";
    if (c.mem.size() != 1) return "memory has " + std::to_string(c.mem.size()) + " cells";
    if (!bound_to_lit(c, m->second, 7)) return "ℓ ↦ " + name_of(m->second) + " which is not bound to 7";
    return "";
  }
  if (!tok->has_h || !tok->h || tok->h->size() != 1) return "token history is not a single record";
  auto [path, b] = *tok->h->begin();
  if (!path.idx.empty()) return "history record is not at a bare borrow id";
  if (c.bids != std::set<int64_t>{path.bid}) return "bids differ from {β}";
  if (!bound_to_lit(c, b, 7)) return name_of(b) + " is not bound to 7";
  if (bor->tag != Term::Wrap || bor->bcon != Bcon::Mut || bor->paths != std::vector<Path>{Path{path.bid, {}}})
    return "borrower is not Mut^β(...)";
  TermP in = bor->args[0];
  if (in->tag == Term::Var) in = chase(c, in->x);
  if (!in || in->tag != Term::RefVar || in->x != b) return "borrower does not wrap Ref b";
  return "";
}

}  // namespace

ExampleCheck check_worked_example(const Program& p, Sem sem, Scheduler& sched, size_t budget) {
  ExampleCheck r;
  Config c = initial_config(p);
  FireFn fire = fire_of(sem);
  Sym target = 0;
  for (size_t i = 0; i <= budget; ++i) {
    if (!target)
      for (auto& [x, t] : c.env)
        if (t->tag == Term::OpApp && Op(t->code) == Op::ExecBO) target = x;
    if (target) {
      TermP v = chase(c, target);
      if (v && v->tag == Term::Con && v->x == names::pair()) {
        r.step = i;
        r.detail = match_pair(c, v, sem);
        r.ok = r.detail.empty();
        if (r.ok) r.detail = "matched at step " + std::to_string(i);
        return r;
      }
    }
    auto rs = enumerate_with(c, fire);
    if (rs.empty() || root_is_value(c)) break;
    const Redex& x = rs[sched.pick(rs)];
    if (x.rule == "loop") continue;
    auto e = fire(c, x.target);
    if (!e || !e->error_kind.empty()) break;
    apply_effect_in_place(c, *e);
  }
  r.detail = "the execBO result never became a pair";
  return r;
}

}  // namespace pbo
