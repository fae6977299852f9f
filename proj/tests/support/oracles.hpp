#pragma once
// Random generators and brute-force oracles shared by the unit tests and the
// acceptance runner. Oracles are written against the generating rules of each
// order, not against the library's normal forms.

#include <random>
#include <string>
#include <vector>

#include "pbo/ast.hpp"
#include "pbo/history.hpp"
#include "pbo/runtime.hpp"

namespace pbo::oracle {

using Rng = std::mt19937_64;

// ---- lifetimes over four atoms 'a 'b 'c 'd ----------------------------------

// Closure of: l ≤ static; l0 ∧ l1 ≤ li; (m ≤ l0 ∧ m ≤ l1) ⇒ m ≤ l0 ∧ l1; refl; trans.
// Elements are atom masks (0 = static, meet = union of masks).
struct LftOrder {
  static constexpr int N = 16;
  bool leq[N][N] = {};
  LftOrder();
};
const LftOrder& lft_order();

struct LftSample {
  Lifetime value;  // built with lft_meet
  unsigned mask;   // oracle normal form
  std::string text;
};
LftSample random_lifetime(Rng& r, int depth = 3);
Lifetime lifetime_of_mask(unsigned mask);

// ---- multiplicities over 1, ω, p q r -----------------------------------------

// Elements: 0 = 1, 1 = ω, 1 + s for a non-empty product with variable mask s.
struct MultOrder {
  static constexpr int N = 9;
  bool leq[N][N] = {};
  static int mul(int a, int b);
  MultOrder();
};
const MultOrder& mult_order();

struct MultSample {
  Mult value;  // built with mult_mul
  int elem;
  std::string text;
};
MultSample random_mult(Rng& r, int depth = 3);
Mult mult_of_elem(int e);

// ---- subtyping over a finite, subterm-closed universe -----------------------

struct SubUniverse {
  std::vector<TypeP> types;
  std::vector<std::vector<bool>> leq;  // closure of the subtyping rules
  size_t true_pairs = 0;
  SubUniverse();
};
const SubUniverse& sub_universe();

// ---- histories ----------------------------------------------------------------

Path random_path(Rng& r);
History random_history(Rng& r, size_t max_records = 6);

// ---- value trees and the replay oracle ---------------------------------------

// A first-order value: integer, pair, reference, or a borrower-wrapped ref/pair.
struct VTree {
  enum Kind { Lit, Pair, Ref, WrapMut } kind = Lit;
  int64_t n = 0;
  std::vector<VTree> kids;  // Pair: 2, Ref: 1, WrapMut: 1 (a Ref or Pair)
  bool operator==(const VTree&) const = default;
};
std::string show(const VTree& t);

struct RestoreCase {
  Config cfg;
  Sym root = 0;
  History h;
  Path at;          // restoration starts here
  VTree expected;   // replay oracle result
  size_t records = 0;
  int depth = 0;
};
// Random tree of depth ≤ max_depth and a history of ≤ max_records updates,
// each at a reference reachable in the tree as already updated.
RestoreCase random_restore_case(Rng& r, int max_depth = 4, size_t max_records = 6);
// Read a value tree back out of an environment (throws on non-tree shapes).
VTree materialize(const Config& c, Sym v);
// Replay: apply records shallowest first onto a deep copy.
VTree replay(const VTree& t, const History& h, const Path& at, const std::map<Sym, VTree>& contents);

}  // namespace pbo::oracle
