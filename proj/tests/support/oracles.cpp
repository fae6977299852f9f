#include "oracles.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

#include "pbo/syntax.hpp"

namespace pbo::oracle {

namespace {
int pick(Rng& r, int n) { return int(std::uniform_int_distribution<int>(0, n - 1)(r)); }
bool coin(Rng& r, double p = 0.5) { return std::bernoulli_distribution(p)(r); }

// Warshall, in place.
template <class M>
void close_transitive(M& leq, int n) {
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      if (leq[i][k])
        for (int j = 0; j < n; ++j)
          if (leq[k][j]) leq[i][j] = true;
}

const char* const kAtoms[4] = {"'a", "'b", "'c", "'d"};
const char* const kMvars[3] = {"%p", "%q", "%r"};
}  // namespace

// ---- lifetimes ----------------------------------------------------------------

LftOrder::LftOrder() {
  for (bool changed = true; changed;) {
    changed = false;
    auto add = [&](int i, int j) {
      if (!leq[i][j]) leq[i][j] = changed = true;
    };
    for (int x = 0; x < N; ++x) {
      add(x, x);
      add(x, 0);  // ≤ static
      for (int y = 0; y < N; ++y) {
        add(x | y, x);
        add(x | y, y);
        for (int z = 0; z < N; ++z)
          if (leq[z][x] && leq[z][y]) add(z, x | y);
      }
    }
    bool before[N][N];
    std::copy(&leq[0][0], &leq[0][0] + N * N, &before[0][0]);
    close_transitive(leq, N);
    if (!std::equal(&leq[0][0], &leq[0][0] + N * N, &before[0][0])) changed = true;
  }
}

const LftOrder& lft_order() {
  static LftOrder o;
  return o;
}

Lifetime lifetime_of_mask(unsigned mask) {
  Lifetime l = Lifetime::stat();
  for (int i = 0; i < 4; ++i)
    if (mask & (1u << i)) l = lft_meet(l, Lifetime::var(intern(kAtoms[i])));
  return l;
}

LftSample random_lifetime(Rng& r, int depth) {
  if (depth == 0 || coin(r, 0.4)) {
    int k = pick(r, 5);
    if (k == 4) return {Lifetime::stat(), 0, "static"};
    return {Lifetime::var(intern(kAtoms[k])), 1u << k, kAtoms[k]};
  }
  LftSample a = random_lifetime(r, depth - 1), b = random_lifetime(r, depth - 1);
  return {lft_meet(a.value, b.value), a.mask | b.mask, "(" + a.text + " & " + b.text + ")"};
}

// ---- multiplicities -------------------------------------------------------------

int MultOrder::mul(int a, int b) {
  if (a == 0) return b;
  if (b == 0) return a;
  if (a == 1 || b == 1) return 1;
  return 1 + ((a - 1) | (b - 1));
}

MultOrder::MultOrder() {
  for (bool changed = true; changed;) {
    changed = false;
    auto add = [&](int i, int j) {
      if (!leq[i][j]) leq[i][j] = changed = true;
    };
    for (int x = 0; x < N; ++x) {
      add(x, x);
      add(0, x);  // 1 ≤ m
      add(x, 1);  // m ≤ ω
      for (int y = 0; y < N; ++y) {
        add(x, mul(x, y));
        add(y, mul(x, y));
        for (int z = 0; z < N; ++z)
          if (leq[x][z] && leq[y][z]) add(mul(x, y), z);
      }
    }
    bool before[N][N];
    std::copy(&leq[0][0], &leq[0][0] + N * N, &before[0][0]);
    close_transitive(leq, N);
    if (!std::equal(&leq[0][0], &leq[0][0] + N * N, &before[0][0])) changed = true;
  }
}

const MultOrder& mult_order() {
  static MultOrder o;
  return o;
}

Mult mult_of_elem(int e) {
  if (e == 0) return Mult::one();
  if (e == 1) return Mult::many();
  Mult m = Mult::one();
  for (int i = 0; i < 3; ++i)
    if ((e - 1) & (1 << i)) m = mult_mul(m, Mult::var(intern(kMvars[i])));
  return m;
}

MultSample random_mult(Rng& r, int depth) {
  if (depth == 0 || coin(r, 0.4)) {
    int k = pick(r, 5);
    if (k == 0) return {Mult::one(), 0, "1"};
    if (k == 1) return {Mult::many(), 1, "w"};
    return {Mult::var(intern(kMvars[k - 2])), 1 + (1 << (k - 2)), kMvars[k - 2]};
  }
  MultSample a = random_mult(r, depth - 1), b = random_mult(r, depth - 1);
  return {mult_mul(a.value, b.value), MultOrder::mul(a.elem, b.elem), "(" + a.text + " * " + b.text + ")"};
}

// ---- subtyping universe ------------------------------------------------------------

namespace {

struct Desc {
  Type::Kind kind;
  int l = 0;      // lifetime mask over 'a 'b
  int mult = 0;   // 0 = 1, 1 = ω (Fun)
  Sym con = 0;    // Data
  Bcon bc = Bcon::Mut;
  std::vector<int> kids;
};

struct Builder {
  std::vector<TypeP> types;
  std::vector<Desc> desc;
  int add(TypeP t, Desc d) {
    for (size_t i = 0; i < types.size(); ++i)
      if (type_eq(types[i], t)) return int(i);
    types.push_back(std::move(t));
    desc.push_back(std::move(d));
    return int(types.size() - 1);
  }
  TypeP at(int i) const { return types[size_t(i)]; }
};

}  // namespace

SubUniverse::SubUniverse() {
  Builder b;
  const int L[4] = {0, 1, 2, 3};
  int int_ = b.add(ty::int_(), {Type::Int});
  b.add(ty::linearly(), {Type::Linearly});
  std::vector<int> ends, base{int_};
  for (int l : L) {
    ends.push_back(b.add(ty::end(lifetime_of_mask(l)), {Type::End, l}));
    b.add(ty::now(lifetime_of_mask(l)), {Type::Now, l});
  }
  base.insert(base.end(), ends.begin(), ends.end());
  size_t n0 = b.types.size();

  auto bor = [&](Bcon k, int l, int x) {
    return b.add(ty::bor(k, lifetime_of_mask(l), b.at(x)), {Type::Bor, l, 0, 0, k, {x}});
  };
  auto lend = [&](int l, int x) { return b.add(ty::lend(lifetime_of_mask(l), b.at(x)), {Type::Lend, l, 0, 0, Bcon::Mut, {x}}); };
  auto bo = [&](int l, int x) { return b.add(ty::bo(lifetime_of_mask(l), b.at(x)), {Type::BO, l, 0, 0, Bcon::Mut, {x}}); };
  auto ref = [&](int x) { return b.add(ty::ref(b.at(x)), {Type::Ref, 0, 0, 0, Bcon::Mut, {x}}); };
  auto pair = [&](int x, int y) {
    return b.add(ty::pair(b.at(x), b.at(y)), {Type::Data, 0, 0, names::pair(), Bcon::Mut, {x, y}});
  };

  for (size_t i = 0; i < n0; ++i) {
    ref(int(i));
    b.add(ty::ur(b.at(int(i))), {Type::Data, 0, 0, names::ur(), Bcon::Mut, {int(i)}});
  }
  for (int l : L)
    for (int x : base) {
      bor(Bcon::Mut, l, x);
      bor(Bcon::Share, l, x);
      lend(l, x);
      bo(l, x);
    }
  for (int x : base)
    for (int y : base) pair(x, y);
  std::vector<int> fb{int_, ends[1], ends[0]};
  for (int x : fb)
    for (int y : fb)
      for (int m = 0; m < 2; ++m)
        b.add(ty::fun(b.at(x), m ? Mult::many() : Mult::one(), b.at(y)), {Type::Fun, 0, m, 0, Bcon::Mut, {x, y}});
  // one level deeper
  for (int l : L)
    for (int e : ends) {
      int re = ref(e);
      bor(Bcon::Mut, l, re);
      bor(Bcon::Share, l, re);
      lend(l, re);
      bo(l, pair(e, int_));
    }
  for (int l : L) {
    int mi = bor(Bcon::Mut, l, int_);
    ref(mi);
    pair(mi, int_);
    for (int l2 : L) lend(l2, mi);
  }

  types = b.types;
  size_t n = types.size();
  leq.assign(n, std::vector<bool>(n, false));
  const LftOrder& lo = lft_order();
  auto structural = [&](const Desc& x, const Desc& y) -> bool {
    if (x.kind != y.kind) return false;
    auto R = [&](int i, int j) { return bool(leq[size_t(i)][size_t(j)]); };
    switch (x.kind) {
      case Type::Int: case Type::Linearly: return true;
      case Type::Now: return x.l == y.l;
      case Type::End: return lo.leq[y.l][x.l];
      case Type::Ref: return R(x.kids[0], y.kids[0]);
      case Type::Bor:
        if (x.bc != y.bc || !lo.leq[y.l][x.l] || !R(x.kids[0], y.kids[0])) return false;
        return x.bc == Bcon::Share || R(y.kids[0], x.kids[0]);
      case Type::Lend: return lo.leq[x.l][y.l] && R(x.kids[0], y.kids[0]);
      case Type::BO: return lo.leq[y.l][x.l] && R(x.kids[0], y.kids[0]);
      case Type::Data:
        if (x.con != y.con) return false;
        for (size_t i = 0; i < x.kids.size(); ++i)
          if (!R(x.kids[i], y.kids[i])) return false;
        return true;
      case Type::Fun:
        return R(y.kids[0], x.kids[0]) && R(x.kids[1], y.kids[1]) && (x.mult <= y.mult);
      default: return false;
    }
  };
  for (bool changed = true; changed;) {
    changed = false;
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j)
        if (!leq[i][j] && (i == j || structural(b.desc[i], b.desc[j]))) leq[i][j] = changed = true;
    auto before = leq;
    close_transitive(leq, int(n));
    if (before != leq) changed = true;
  }
  for (auto& row : leq) true_pairs += size_t(std::count(row.begin(), row.end(), true));
}

const SubUniverse& sub_universe() {
  static SubUniverse u;
  return u;
}

// ---- histories -----------------------------------------------------------------------

Path random_path(Rng& r) {
  Path p{1 + pick(r, 3), {}};
  int len = pick(r, 3);
  for (int i = 0; i < len; ++i) p.idx.push_back(pick(r, 2));
  return p;
}

History random_history(Rng& r, size_t max_records) {
  History h;
  size_t n = size_t(pick(r, int(max_records) + 1));
  for (size_t i = 0; i < n; ++i) h[random_path(r)] = intern("v" + std::to_string(pick(r, 6)));
  return h;
}

// ---- value trees ---------------------------------------------------------------------

std::string show(const VTree& t) {
  switch (t.kind) {
    case VTree::Lit: return std::to_string(t.n);
    case VTree::Pair: return "(" + show(t.kids[0]) + ", " + show(t.kids[1]) + ")";
    case VTree::Ref: return "Ref " + show(t.kids[0]);
    case VTree::WrapMut: return "Mut[" + show(t.kids[0]) + "]";
  }
  return "?";
}

namespace {

int depth_of(const VTree& t) {
  int d = 0;
  for (auto& k : t.kids) d = std::max(d, depth_of(k));
  return (t.kind == VTree::WrapMut ? 0 : 1) + d;
}

VTree random_tree(Rng& r, int depth) {
  VTree t;
  if (depth <= 1 || coin(r, 0.25)) {
    t.n = pick(r, 50);
    return t;
  }
  int k = pick(r, 5);
  if (k <= 1) {
    t.kind = VTree::Pair;
    t.kids = {random_tree(r, depth - 1), random_tree(r, depth - 1)};
  } else {
    t.kind = VTree::Ref;
    t.kids = {random_tree(r, depth - 1)};
  }
  if (k == 4) {  // borrower-wrapped
    VTree w;
    w.kind = VTree::WrapMut;
    w.kids = {std::move(t)};
    return w;
  }
  return t;
}

struct Emitter {
  Config& c;
  uint32_t n = 1;
  Sym fresh() { return runtime_sym(intern("v"), n++); }
  TermP core(const VTree& t) {
    switch (t.kind) {
      case VTree::Lit: return tm::lit(t.n);
      case VTree::Pair: return tm::con(names::pair(), {tm::var(emit(t.kids[0])), tm::var(emit(t.kids[1]))});
      case VTree::Ref: return tm::ref_var(emit(t.kids[0]));
      case VTree::WrapMut: return tm::wrap(Bcon::Mut, {Path{99, {}}}, core(t.kids[0]));
    }
    throw std::logic_error("bad tree");
  }
  Sym emit(const VTree& t) {
    Sym x = fresh();
    c.env[x] = core(t);
    return x;
  }
};

// References reachable in t, with their paths relative to `at`.
void refs(const VTree& t, const Path& p, std::vector<std::pair<Path, const VTree*>>& out) {
  switch (t.kind) {
    case VTree::Lit: return;
    case VTree::WrapMut: refs(t.kids[0], p, out); return;
    case VTree::Ref:
      out.push_back({p, &t});
      refs(t.kids[0], p.dot(0), out);
      return;
    case VTree::Pair:
      refs(t.kids[0], p.dot(0), out);
      refs(t.kids[1], p.dot(1), out);
      return;
  }
}

VTree* locate(VTree& t, const std::vector<int>& idx, size_t i) {
  VTree* n = &t;
  while (n->kind == VTree::WrapMut) n = &n->kids[0];
  if (i == idx.size()) return n;
  if (n->kind == VTree::Ref && idx[i] == 0) return locate(n->kids[0], idx, i + 1);
  if (n->kind == VTree::Pair && idx[i] < 2) return locate(n->kids[size_t(idx[i])], idx, i + 1);
  return nullptr;
}

}  // namespace

VTree replay(const VTree& t, const History& h, const Path& at, const std::map<Sym, VTree>& contents) {
  VTree out = t;
  std::vector<std::pair<Path, Sym>> recs(h.begin(), h.end());
  std::stable_sort(recs.begin(), recs.end(),
                   [](auto& a, auto& b) { return a.first.idx.size() < b.first.idx.size(); });
  for (auto& [p, v] : recs) {
    if (p.bid != at.bid || !p.extends(at)) continue;
    std::vector<int> rel(p.idx.begin() + long(at.idx.size()), p.idx.end());
    VTree* n = locate(out, rel, 0);
    if (!n || n->kind != VTree::Ref) throw std::logic_error("replay: record does not address a reference");
    n->kids[0] = contents.at(v);
  }
  return out;
}

VTree materialize(const Config& c, Sym v) {
  auto it = c.env.find(v);
  if (it == c.env.end()) throw std::logic_error("materialize: unbound " + name_of(v));
  std::function<VTree(const TermP&)> core = [&](const TermP& t) -> VTree {
    VTree r;
    switch (t->tag) {
      case Term::Lit: r.n = t->n; return r;
      case Term::Var: return materialize(c, t->x);
      case Term::RefVar:
        r.kind = VTree::Ref;
        r.kids = {materialize(c, t->x)};
        return r;
      case Term::Con:
        r.kind = VTree::Pair;
        for (auto& a : t->args) r.kids.push_back(materialize(c, a->x));
        return r;
      case Term::Wrap:
        r.kind = VTree::WrapMut;
        r.kids = {core(t->args[0])};
        return r;
      default: throw std::logic_error("materialize: unexpected " + pretty_print(t));
    }
  };
  return core(it->second);
}

RestoreCase random_restore_case(Rng& r, int max_depth, size_t max_records) {
  RestoreCase rc;
  rc.at = Path{1, {}};
  VTree t = random_tree(r, 1 + pick(r, max_depth));
  rc.depth = depth_of(t);
  Emitter em{rc.cfg};
  rc.root = em.emit(t);

  std::map<Sym, VTree> contents;
  VTree current = t;
  size_t want = size_t(pick(r, int(max_records) + 1));
  for (size_t tries = 0; rc.h.size() < want && tries < 40; ++tries) {
    if (coin(r, 0.1)) {  // unrelated borrow id: must be ignored
      VTree b = random_tree(r, 2);
      Sym x = em.emit(b);
      contents[x] = b;
      rc.h[Path{2 + pick(r, 2), {pick(r, 2)}}] = x;
      continue;
    }
    std::vector<std::pair<Path, const VTree*>> cand;
    refs(current, rc.at, cand);
    if (cand.empty()) break;
    Path p = cand[size_t(pick(r, int(cand.size())))].first;
    bool clash = false;
    for (auto& [q, _] : rc.h)
      if (q.extends(p)) clash = true;  // includes q == p
    if (clash) continue;
    int room = max_depth - int(p.idx.size()) - 1;
    if (room < 1) continue;
    VTree b = random_tree(r, 1 + pick(r, room));
    Sym x = em.emit(b);
    contents[x] = b;
    rc.h[p] = x;
    current = replay(t, rc.h, rc.at, contents);
  }
  rc.records = rc.h.size();
  rc.cfg.next = em.n + 1;
  rc.expected = replay(t, rc.h, rc.at, contents);
  rc.depth = std::max(rc.depth, depth_of(rc.expected));
  return rc;
}

}  // namespace pbo::oracle
