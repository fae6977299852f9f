#pragma once
// Runtime configurations shared by both operational semantics.

#include <array>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

#include "pbo/ast.hpp"
#include "pbo/history.hpp"

namespace pbo {

enum class Sem { Mut, Den };
const char* sem_name(Sem s);

// Φ;M;x (mutative) or Ψ;x (denotational). Unused components stay empty.
struct Config {
  std::map<Sym, TermP> env;
  std::map<int64_t, Sym> mem;   // mutative memory
  std::set<int64_t> bids;       // denotational borrow ids
  Sym root = 0;
  uint32_t next = 1;            // fresh supply for names, locations and bids
};

// Root bound to the (erased) program body.
Config initial_config(const Program& p);

// A redex is identified by the variable whose binding fires; "loop" is the
// self-step of a configuration with a forcing loop.
struct Redex {
  Sym target = 0;
  std::string rule;
  bool operator==(const Redex&) const = default;
};

// Raised by a rule whose side computation fails (history overlap, restoration).
struct StepError : std::runtime_error {
  std::string kind;  // SeparationViolation | RestoreStuck
  StepError(std::string k, const std::string& msg) : std::runtime_error(msg), kind(std::move(k)) {}
};

// The effect of firing one rule: new/rebound bindings plus memory and bid updates.
struct Effect {
  std::string rule;
  std::vector<std::pair<Sym, TermP>> binds;
  std::vector<std::pair<int64_t, std::optional<Sym>>> mem;  // nullopt = free
  std::vector<int64_t> new_bids;
  uint32_t used = 0;      // fresh counter consumed
  std::string error_kind; // non-empty: the rule applies but fails
  std::string error;
};

// Builder used by rule implementations.
struct Fx {
  const Config& c;
  Effect e;
  explicit Fx(const Config& cfg, std::string rule) : c(cfg) { e.rule = std::move(rule); }
  Sym fresh(Sym base) { return runtime_sym(base, c.next + e.used++); }
  int64_t fresh_num() { return int64_t(c.next + e.used++); }
  void bind(Sym x, TermP t) { e.binds.emplace_back(x, std::move(t)); }
  // Value bound to y, or null if y is unbound or not yet a value.
  TermP val(Sym y) const;
  Effect done() { return std::move(e); }
  Effect fail(std::string kind, std::string msg) {
    e.error_kind = std::move(kind);
    e.error = std::move(msg);
    return std::move(e);
  }
};

using FireFn = std::function<std::optional<Effect>(const Config&, Sym)>;

// Rules shared verbatim by both semantics (let, denest, app, seq, case on a
// plain constructor, integer operators, par, consume, move, linearly, linear,
// withLinearly).
std::optional<Effect> fire_common(const Config& c, Sym x);

// Forced variables of a binding: the holes of its evaluation context.
std::vector<Sym> forced_vars(const TermP& t);
// First non-variable subterm in a denesting position, if any.
bool denestable(const TermP& t);

Config apply_effect(const Config& c, const Effect& e);
void apply_effect_in_place(Config& c, const Effect& e);

// Generic machinery parameterized by the rule function.
std::vector<Redex> enumerate_with(const Config& c, const FireFn& fire);
Config step_with(const Config& c, const Redex& r, const FireFn& fire);
std::optional<std::vector<Sym>> forcing_loop(const Config& c, Sym v);
bool root_is_value(const Config& c);

// Alpha-quotiented identity: canonical serialization and its 128-bit hash.
std::string canonical(const Config& c);
using Hash128 = std::array<uint64_t, 2>;
Hash128 canonical_hash(const Config& c);
struct Hash128Hasher {
  size_t operator()(const Hash128& h) const { return size_t(h[0] ^ (h[1] * 0x9e3779b97f4a7c15ULL)); }
};

// Human-readable dump.
std::string dump_config(const Config& c);

// Follow Var aliases to a value (display / outcome classification).
TermP chase(const Config& c, Sym x);

// ---- mutative semantics ----
std::optional<Effect> fire_mut(const Config& c, Sym x);
std::vector<Redex> enumerate_redexes_mut(const Config& c);
Config step_mut(const Config& c, const Redex& r);
std::optional<std::vector<Sym>> detect_forcing_loop_mut(const Config& c, Sym v);
bool is_normal_form_mut(const Config& c);

// ---- denotational semantics ----
std::optional<Effect> fire_den(const Config& c, Sym x);
std::vector<Redex> enumerate_redexes_den(const Config& c);
Config step_den(const Config& c, const Redex& r);
std::optional<std::vector<Sym>> detect_forcing_loop_den(const Config& c, Sym v);
bool is_normal_form_den(const Config& c);

// Restoration by history at path p of the value bound to v. New bindings are
// appended through fx; returns the variable of the restored version.
// Throws StepError("RestoreStuck") when no rule shape applies.
Sym restore_by_history(const History& h, const Path& p, Fx& fx, Sym v);
// Standalone form over a configuration (used by tests).
std::pair<Config, Sym> restore_by_history(const History& h, const Path& p, const Config& c, Sym v);

std::vector<Redex> enumerate_redexes(const Config& c, Sem s);
Config step(const Config& c, const Redex& r, Sem s);
bool is_normal_form(const Config& c, Sem s);

}  // namespace pbo
