#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "atoms.hpp"

namespace hpm {

// Fixed-width bitset over depositable nonempty atoms.
struct AtomBits {
  static constexpr int kWords = 4;
  static constexpr int kMaxBits = kWords * 64;
  std::array<std::uint64_t, kWords> w{};

  bool test(int i) const { return w[std::size_t(i >> 6)] >> (i & 63) & 1; }
  void set(int i) { w[std::size_t(i >> 6)] |= std::uint64_t(1) << (i & 63); }
  int popcount() const {
    int n = 0;
    for (auto x : w) n += std::popcount(x);
    return n;
  }
  bool none() const {
    for (auto x : w)
      if (x) return false;
    return true;
  }
  friend AtomBits operator|(AtomBits a, const AtomBits& b) {
    for (int i = 0; i < kWords; ++i) a.w[std::size_t(i)] |= b.w[std::size_t(i)];
    return a;
  }
  friend AtomBits operator&(AtomBits a, const AtomBits& b) {
    for (int i = 0; i < kWords; ++i) a.w[std::size_t(i)] &= b.w[std::size_t(i)];
    return a;
  }
  AtomBits and_not(const AtomBits& b) const {
    AtomBits r = *this;
    for (int i = 0; i < kWords; ++i) r.w[std::size_t(i)] &= ~b.w[std::size_t(i)];
    return r;
  }
  AtomBits diff_sym(const AtomBits& b) const {
    AtomBits r = *this;
    for (int i = 0; i < kWords; ++i) r.w[std::size_t(i)] ^= b.w[std::size_t(i)];
    return r;
  }
  bool operator==(const AtomBits&) const = default;
  auto operator<=>(const AtomBits&) const = default;
};

struct PlanStep {
  int primitive_id = 0;  // 1-based, prints as P1, P2, ...
  Mode mode = Mode::AM;
  bool operator==(const PlanStep&) const = default;
  auto operator<=>(const PlanStep&) const = default;
};

// Left-deep plan expression: P_a, then a run of (U P_i) / (^ ~P_i) steps.
// Anti-balanced (C1) by construction.
struct Expression {
  std::vector<PlanStep> steps;

  // Evaluate over an n-bit atom code (P1 at the most significant code bit).
  bool evaluate(std::uint64_t code, int n) const;
  std::string to_string() const;
};

// Parse the printed form, e.g. "(((P1 U P2) ^ ~P3) ^ ~P4)". Accepts the
// Unicode operators as printed plus ASCII "U"/"|" and "^"/"&".
Expression parse_expression(const std::string& text);

struct Dnf {
  std::set<std::uint64_t> codes;
  bool evaluate(std::uint64_t code) const { return codes.count(code) > 0; }
  std::string atoms_string(int n) const;      // "A_0100 U A_1000 U ..."
  std::string expanded_string(int n) const;   // conjunction clauses over P_i
};

enum class EquivalenceScope { Logical, Conditional };

using CodePredicate = std::function<bool(std::uint64_t)>;

// Logical scope compares over all 2^n codes; conditional only over the
// decomposition's nonempty codes.
bool equivalent(const CodePredicate& a, const CodePredicate& b, int n,
                EquivalenceScope scope, const Decomposition* d);
bool equivalent(const Expression& a, const Expression& b,
                const Decomposition& d, EquivalenceScope scope);
bool equivalent(const Expression& a, const Dnf& b, const Decomposition& d,
                EquivalenceScope scope);

struct Plan {
  std::vector<PlanStep> steps;
  std::vector<AtomBits> states;       // state after each action
  std::vector<double> step_volumes;   // volume toggled per action (mm^3)
  std::vector<double> step_costs;
  double cost = 0;
  Expression expression;
};

struct SearchOptions {
  int k_best = 1;
  int max_depth = 8;
  bool allow_unmanufacturable = false;
};

struct SearchResult {
  std::vector<Plan> plans;
  // True when the search space within max_depth was fully explored, so fewer
  // than k plans means "not found within bounds", not "proven impossible".
  bool exhausted = false;
};

// Symbolic planning index over a classified decomposition: atom bitsets,
// per-primitive action masks, volumetric costs, best-first k-best search.
class SymbolicPlanner {
 public:
  explicit SymbolicPlanner(const Decomposition& d);

  int atom_count() const { return int(atom_codes_.size()); }
  const std::vector<std::uint64_t>& atom_codes() const { return atom_codes_; }
  int primitive_count() const { return n_; }

  struct Action {
    int primitive_id;  // 1-based
    Mode mode;
    AtomBits mask;
    double rate;
    bool is_raw_stock;
  };
  const std::vector<Action>& actions() const { return actions_; }

  AtomBits target_bits() const { return target_; }
  AtomBits bits_for_codes(const std::set<std::uint64_t>& codes) const;

  AtomBits apply(const AtomBits& s, const Action& a) const;
  double action_cost(const AtomBits& s, const Action& a) const;
  double volume_of(const AtomBits& bits) const;

  SearchResult search(const SearchOptions& opt) const;

  Dnf minimal_dnf() const;
  std::vector<std::uint64_t> empty_codes() const;

  struct EnrichmentEntry {
    std::vector<std::uint64_t> added_codes;
    bool plan_found = false;
    std::string witness;  // expression string when a plan matches
  };
  struct EnrichReport {
    bool exhaustive = true;
    std::vector<EnrichmentEntry> entries;
  };
  // Small-scale sufficiency check: enumerate DNFs enriched with empty atoms
  // and report which admit a valid plan under logical equivalence.
  EnrichReport enrich_and_match(int budget, int max_depth = 8,
                                std::uint64_t seed = 0) const;

  // Canonical representative under collapsing adjacent same-mode actions with
  // disjoint effective masks; used to deduplicate near-identical plans.
  std::vector<PlanStep> canonical_steps(const std::vector<PlanStep>& steps) const;

  // Search lower bound from a state; negative when the target is provably
  // unreachable. Exposed so admissibility can be audited externally.
  double heuristic_cost(const AtomBits& s) const { return heuristic(s); }

 private:
  Plan finish_plan(const std::vector<int>& action_seq) const;
  double heuristic(const AtomBits& s) const;

  const Decomposition* d_;
  int n_ = 0;
  std::vector<std::uint64_t> atom_codes_;  // ascending, code 0 excluded
  std::vector<double> atom_volumes_;
  std::vector<Action> actions_;
  AtomBits target_;
  std::vector<double> min_am_rate_, min_sm_rate_;  // per atom; <0 if none
};

// Evaluate a plan's steps with full voxel Booleans.
VoxelSolid evaluate_steps_geometric(const std::vector<PlanStep>& steps,
                                    const Decomposition& d);

// Cross-check: the voxel evaluation equals the union of target-mask atoms.
bool verify_plan_geometric(const Plan& plan, const Decomposition& d);

}  // namespace hpm
