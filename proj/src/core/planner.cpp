#include "planner.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <random>
#include <sstream>

namespace hpm {

namespace {

bool code_bit(std::uint64_t code, int primitive_id, int n) {
  return code >> (n - primitive_id) & 1;  // 1-based id, P1 most significant
}

}  // namespace

bool Expression::evaluate(std::uint64_t code, int n) const {
  if (steps.empty()) return false;
  bool v = code_bit(code, steps[0].primitive_id, n);
  for (std::size_t i = 1; i < steps.size(); ++i) {
    bool b = code_bit(code, steps[i].primitive_id, n);
    if (steps[i].mode == Mode::AM)
      v = v || b;
    else
      v = v && !b;
  }
  return v;
}

std::string Expression::to_string() const {
  if (steps.empty()) return "()";
  std::string s = "P" + std::to_string(steps[0].primitive_id);
  for (std::size_t i = 1; i < steps.size(); ++i) {
    const PlanStep& st = steps[i];
    std::string rhs = st.mode == Mode::AM
                          ? " ∪ P" + std::to_string(st.primitive_id)
                          : " ∩ ~P" + std::to_string(st.primitive_id);
    s = "(" + s + rhs + ")";
  }
  return s;
}

namespace {

struct Lexer {
  const std::string& text;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
  }
  bool eat(const std::string& tok) {
    skip_ws();
    if (text.compare(pos, tok.size(), tok) == 0) {
      pos += tok.size();
      return true;
    }
    return false;
  }
  // Returns 'U' (union), '^' (intersect) or 0.
  char eat_op() {
    skip_ws();
    if (eat("∪") || eat("U") || eat("|") || eat("+")) return 'U';
    if (eat("∩") || eat("^") || eat("&")) return '^';
    return 0;
  }
  std::optional<int> eat_primitive() {
    skip_ws();
    if (pos >= text.size() || text[pos] != 'P') return std::nullopt;
    std::size_t p = pos + 1, start = p;
    while (p < text.size() && std::isdigit((unsigned char)text[p])) ++p;
    if (p == start) return std::nullopt;
    int id = std::stoi(text.substr(start, p - start));
    pos = p;
    return id;
  }
};

Expression parse_expr(Lexer& lx);

Expression parse_operand(Lexer& lx) {
  lx.skip_ws();
  if (lx.eat("(")) {
    Expression e = parse_expr(lx);
    char op = lx.eat_op();
    if (!op) throw Error(ErrorCode::ParseError, "expression: operator expected");
    bool neg = lx.eat("~") || lx.eat("¬");
    auto id = lx.eat_primitive();
    if (!id)
      throw Error(ErrorCode::ParseError, "expression: primitive expected");
    if (!lx.eat(")"))
      throw Error(ErrorCode::ParseError, "expression: ')' expected");
    if (op == 'U' && neg)
      throw Error(ErrorCode::ParseError,
                  "expression: union with a complemented primitive");
    if (op == '^' && !neg)
      throw Error(ErrorCode::ParseError,
                  "expression: intersection must use a complemented primitive");
    e.steps.push_back({*id, op == 'U' ? Mode::AM : Mode::SM});
    return e;
  }
  if (lx.eat("~"))
    throw Error(ErrorCode::ParseError,
                "expression: leading primitive cannot be complemented");
  auto id = lx.eat_primitive();
  if (!id) throw Error(ErrorCode::ParseError, "expression: primitive expected");
  Expression e;
  e.steps.push_back({*id, Mode::AM});
  return e;
}

Expression parse_expr(Lexer& lx) { return parse_operand(lx); }

}  // namespace

Expression parse_expression(const std::string& text) {
  Lexer lx{text};
  Expression e = parse_expr(lx);
  lx.skip_ws();
  if (lx.pos != text.size())
    throw Error(ErrorCode::ParseError, "expression: trailing input");
  return e;
}

std::string Dnf::atoms_string(int n) const {
  if (codes.empty()) return "∅";
  std::string s;
  for (std::uint64_t c : codes) {
    if (!s.empty()) s += " ∪ ";
    s += "A_" + code_string(c, n);
  }
  return s;
}

std::string Dnf::expanded_string(int n) const {
  if (codes.empty()) return "∅";
  std::string s;
  for (std::uint64_t c : codes) {
    if (!s.empty()) s += " ∪ ";
    std::string clause;
    for (int i = 1; i <= n; ++i) {
      if (!clause.empty()) clause += " ∩ ";
      if (!code_bit(c, i, n)) clause += "~";
      clause += "P" + std::to_string(i);
    }
    s += "(" + clause + ")";
  }
  return s;
}

bool equivalent(const CodePredicate& a, const CodePredicate& b, int n,
                EquivalenceScope scope, const Decomposition* d) {
  if (scope == EquivalenceScope::Logical) {
    if (n > 24)
      throw Error(ErrorCode::LimitExceeded,
                  "logical equivalence limited to 24 primitives");
    for (std::uint64_t c = 0; c < (std::uint64_t(1) << n); ++c)
      if (a(c) != b(c)) return false;
    return true;
  }
  if (!d)
    throw Error(ErrorCode::InvalidArgument,
                "conditional equivalence needs a decomposition");
  for (const auto& [code, atom] : d->atoms())
    if (a(code) != b(code)) return false;
  return true;
}

bool equivalent(const Expression& a, const Expression& b,
                const Decomposition& d, EquivalenceScope scope) {
  int n = d.primitive_count();
  return equivalent([&](std::uint64_t c) { return a.evaluate(c, n); },
                    [&](std::uint64_t c) { return b.evaluate(c, n); }, n, scope,
                    &d);
}

bool equivalent(const Expression& a, const Dnf& b, const Decomposition& d,
                EquivalenceScope scope) {
  int n = d.primitive_count();
  return equivalent([&](std::uint64_t c) { return a.evaluate(c, n); },
                    [&](std::uint64_t c) { return b.evaluate(c); }, n, scope,
                    &d);
}

SymbolicPlanner::SymbolicPlanner(const Decomposition& d) : d_(&d) {
  if (!d.classified())
    throw Error(ErrorCode::NotReady, "planner needs a classified decomposition");
  n_ = d.primitive_count();
  for (const auto& [code, atom] : d.atoms())
    if (code != 0) {  // the all-zeros atom is non-depositable
      atom_codes_.push_back(code);
      atom_volumes_.push_back(atom.volume);
    }
  if (int(atom_codes_.size()) > AtomBits::kMaxBits)
    throw Error(ErrorCode::LimitExceeded, "too many atoms for planner bitsets");

  for (int i = 0; i < int(atom_codes_.size()); ++i)
    if (d.target_mask().count(atom_codes_[std::size_t(i)])) target_.set(i);

  for (int p = 1; p <= n_; ++p) {
    const Primitive& prim = d.primitives()[std::size_t(p - 1)];
    Action a;
    a.primitive_id = p;
    a.mode = prim.mode;
    a.rate = prim.rate;
    a.is_raw_stock = prim.is_raw_stock;
    for (int i = 0; i < int(atom_codes_.size()); ++i)
      if (code_bit(atom_codes_[std::size_t(i)], p, n_)) a.mask.set(i);
    actions_.push_back(a);
  }

  min_am_rate_.assign(atom_codes_.size(), -1);
  min_sm_rate_.assign(atom_codes_.size(), -1);
  for (const Action& a : actions_)
    for (int i = 0; i < int(atom_codes_.size()); ++i) {
      if (!a.mask.test(i)) continue;
      auto& slot = a.mode == Mode::AM ? min_am_rate_[std::size_t(i)]
                                      : min_sm_rate_[std::size_t(i)];
      if (slot < 0 || a.rate < slot) slot = a.rate;
    }
}

AtomBits SymbolicPlanner::bits_for_codes(
    const std::set<std::uint64_t>& codes) const {
  AtomBits b;
  for (int i = 0; i < int(atom_codes_.size()); ++i)
    if (codes.count(atom_codes_[std::size_t(i)])) b.set(i);
  return b;
}

AtomBits SymbolicPlanner::apply(const AtomBits& s, const Action& a) const {
  return a.mode == Mode::AM ? (s | a.mask) : s.and_not(a.mask);
}

double SymbolicPlanner::volume_of(const AtomBits& bits) const {
  double v = 0;
  for (int i = 0; i < int(atom_codes_.size()); ++i)
    if (bits.test(i)) v += atom_volumes_[std::size_t(i)];
  return v;
}

double SymbolicPlanner::action_cost(const AtomBits& s, const Action& a) const {
  AtomBits flipped =
      a.mode == Mode::AM ? a.mask.and_not(s) : (s & a.mask);
  return a.rate * volume_of(flipped);
}

double SymbolicPlanner::heuristic(const AtomBits& s) const {
  double h = 0;
  for (int i = 0; i < int(atom_codes_.size()); ++i) {
    bool have = s.test(i), want = target_.test(i);
    if (have == want) continue;
    double rate = want ? min_am_rate_[std::size_t(i)] : min_sm_rate_[std::size_t(i)];
    if (rate < 0) return -1;  // unreachable
    h += rate * atom_volumes_[std::size_t(i)];
  }
  return h;
}

std::vector<PlanStep> SymbolicPlanner::canonical_steps(
    const std::vector<PlanStep>& steps) const {
  std::vector<PlanStep> s = steps;
  bool changed = true;
  while (changed) {
    changed = false;
    AtomBits st;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      if (s[i].mode == s[i + 1].mode &&
          s[i].primitive_id > s[i + 1].primitive_id) {
        // Measured from the shared predecessor state, two same-mode actions
        // commute without changing any step cost exactly when their effects
        // are disjoint; only then is the order a presentation artifact.
        const Action& a1 = actions_[std::size_t(s[i].primitive_id - 1)];
        const Action& a2 = actions_[std::size_t(s[i + 1].primitive_id - 1)];
        AtomBits e1 = st.diff_sym(apply(st, a1));
        AtomBits e2 = st.diff_sym(apply(st, a2));
        if ((e1 & e2).none()) {
          std::swap(s[i], s[i + 1]);
          changed = true;
        }
      }
      st = apply(st, actions_[std::size_t(s[i].primitive_id - 1)]);
    }
  }
  return s;
}

Plan SymbolicPlanner::finish_plan(const std::vector<int>& action_seq) const {
  Plan p;
  AtomBits st;
  for (int idx : action_seq) {
    const Action& a = actions_[std::size_t(idx)];
    AtomBits next = apply(st, a);
    AtomBits flipped = st.diff_sym(next);
    double vol = volume_of(flipped);
    p.steps.push_back({a.primitive_id, a.mode});
    p.states.push_back(next);
    p.step_volumes.push_back(vol);
    p.step_costs.push_back(a.rate * vol);
    p.cost += a.rate * vol;
    st = next;
  }
  p.expression.steps = p.steps;
  return p;
}

SearchResult SymbolicPlanner::search(const SearchOptions& opt) const {
  SearchResult result;
  if (!opt.allow_unmanufacturable) {
    auto test = d_->manufacturability_test();
    if (!test.candidate)
      throw Error(ErrorCode::NotReady,
                  "decomposition failed the manufacturability test "
                  "(use the override to search anyway)");
  }
  if (opt.k_best < 1 || opt.max_depth < 1)
    throw Error(ErrorCode::InvalidArgument, "bad search options");

  struct Node {
    double f, g;
    std::vector<int> seq;
    AtomBits state;
  };
  struct Worse {
    bool operator()(const Node& a, const Node& b) const {
      if (a.f != b.f) return a.f > b.f;
      if (a.seq.size() != b.seq.size()) return a.seq.size() > b.seq.size();
      return a.seq > b.seq;  // lower primitive ids first
    }
  };
  std::priority_queue<Node, std::vector<Node>, Worse> open;

  double h0 = heuristic(AtomBits{});
  if (h0 >= 0) open.push({h0, 0, {}, AtomBits{}});

  std::set<std::vector<PlanStep>> seen;
  while (!open.empty()) {
    Node node = open.top();
    open.pop();
    if (int(result.plans.size()) >= opt.k_best &&
        node.f > result.plans.back().cost)
      break;  // nothing left can beat the k-th plan

    if (!node.seq.empty() && node.state == target_) {
      Plan p = finish_plan(node.seq);
      auto canon = canonical_steps(p.steps);
      if (seen.insert(canon).second) {
        result.plans.push_back(std::move(p));
        std::stable_sort(result.plans.begin(), result.plans.end(),
                         [](const Plan& a, const Plan& b) {
                           return a.cost < b.cost;
                         });
        if (int(result.plans.size()) > opt.k_best) result.plans.pop_back();
      }
    }
    if (int(node.seq.size()) >= opt.max_depth) continue;

    for (int i = 0; i < int(actions_.size()); ++i) {
      const Action& a = actions_[std::size_t(i)];
      if (node.seq.empty()) {
        if (a.mode != Mode::AM) continue;  // C3
      } else if (a.is_raw_stock) {
        continue;  // C4
      }
      AtomBits next = apply(node.state, a);
      if (next == node.state) continue;  // zero-cost no-op
      double g = node.g + action_cost(node.state, a);
      double h = heuristic(next);
      if (h < 0) continue;
      if (int(result.plans.size()) >= opt.k_best &&
          g + h > result.plans.back().cost)
        continue;
      Node child;
      child.g = g;
      child.f = g + h;
      child.seq = node.seq;
      child.seq.push_back(i);
      child.state = next;
      open.push(std::move(child));
    }
  }
  result.exhausted = open.empty();
  return result;
}

Dnf SymbolicPlanner::minimal_dnf() const {
  Dnf d;
  d.codes = d_->target_mask();
  return d;
}

std::vector<std::uint64_t> SymbolicPlanner::empty_codes() const {
  if (n_ > 24)
    throw Error(ErrorCode::LimitExceeded,
                "empty-code enumeration limited to 24 primitives");
  std::vector<std::uint64_t> out;
  for (std::uint64_t c = 0; c < (std::uint64_t(1) << n_); ++c)
    if (!d_->atoms().count(c)) out.push_back(c);
  return out;
}

SymbolicPlanner::EnrichReport SymbolicPlanner::enrich_and_match(
    int budget, int max_depth, std::uint64_t seed) const {
  if (n_ > 16)
    throw Error(ErrorCode::LimitExceeded,
                "enrichment matching limited to 16 primitives");
  EnrichReport report;
  auto empties = empty_codes();

  // Truth vectors over all 2^n codes evolve pointwise under actions, so a BFS
  // over distinct truth vectors enumerates every logically distinct valid
  // expression within the depth bound.
  std::uint64_t ncodes = std::uint64_t(1) << n_;
  using Truth = std::vector<std::uint64_t>;
  std::size_t words = std::size_t((ncodes + 63) / 64);
  std::vector<Truth> membership(std::size_t(n_), Truth(words, 0));
  for (int p = 1; p <= n_; ++p)
    for (std::uint64_t c = 0; c < ncodes; ++c)
      if (code_bit(c, p, n_))
        membership[std::size_t(p - 1)][std::size_t(c >> 6)] |=
            std::uint64_t(1) << (c & 63);

  std::map<Truth, std::vector<PlanStep>> reachable;
  std::vector<std::pair<Truth, std::vector<PlanStep>>> frontier;
  frontier.push_back({Truth(words, 0), {}});
  for (int depth = 0; depth < max_depth; ++depth) {
    std::vector<std::pair<Truth, std::vector<PlanStep>>> next;
    for (const auto& [truth, steps] : frontier) {
      for (int i = 0; i < int(actions_.size()); ++i) {
        const Action& a = actions_[std::size_t(i)];
        if (steps.empty()) {
          if (a.mode != Mode::AM) continue;
        } else if (a.is_raw_stock) {
          continue;
        }
        Truth t = truth;
        const Truth& m = membership[std::size_t(a.primitive_id - 1)];
        for (std::size_t w = 0; w < words; ++w)
          t[w] = a.mode == Mode::AM ? (t[w] | m[w]) : (t[w] & ~m[w]);
        if (t == truth) continue;
        auto s = steps;
        s.push_back({a.primitive_id, a.mode});
        if (reachable.emplace(t, s).second) next.push_back({t, std::move(s)});
      }
    }
    frontier = std::move(next);
  }

  auto truth_for = [&](const std::set<std::uint64_t>& codes) {
    Truth t(words, 0);
    for (std::uint64_t c : codes)
      t[std::size_t(c >> 6)] |= std::uint64_t(1) << (c & 63);
    return t;
  };
  auto check = [&](std::vector<std::uint64_t> added) {
    EnrichmentEntry e;
    std::set<std::uint64_t> codes = d_->target_mask();
    for (std::uint64_t c : added) codes.insert(c);
    e.added_codes = std::move(added);
    auto it = reachable.find(truth_for(codes));
    if (it != reachable.end()) {
      e.plan_found = true;
      Expression ex;
      ex.steps = it->second;
      e.witness = ex.to_string();
    }
    report.entries.push_back(std::move(e));
  };

  check({});  // the minimal DNF itself
  if (empties.empty()) return report;

  if (int(empties.size()) <= budget && empties.size() <= 20) {
    std::uint64_t subsets = std::uint64_t(1) << empties.size();
    for (std::uint64_t s = 1; s < subsets; ++s) {
      std::vector<std::uint64_t> added;
      for (std::size_t i = 0; i < empties.size(); ++i)
        if (s >> i & 1) added.push_back(empties[i]);
      check(std::move(added));
    }
  } else {
    report.exhaustive = false;
    std::mt19937_64 rng(seed);
    for (int s = 0; s < budget; ++s) {
      std::vector<std::uint64_t> added;
      for (std::uint64_t c : empties)
        if (rng() & 1) added.push_back(c);
      check(std::move(added));
    }
  }
  return report;
}

VoxelSolid evaluate_steps_geometric(const std::vector<PlanStep>& steps,
                                    const Decomposition& d) {
  VoxelSolid s(d.grid());
  for (const PlanStep& st : steps) {
    if (st.primitive_id < 1 || st.primitive_id > d.primitive_count())
      throw Error(ErrorCode::InvalidArgument, "unknown primitive in plan");
    const VoxelSolid& p = d.primitives()[std::size_t(st.primitive_id - 1)].solid;
    s = st.mode == Mode::AM ? unite(s, p) : subtract(s, p);
  }
  return s;
}

bool verify_plan_geometric(const Plan& plan, const Decomposition& d) {
  return evaluate_steps_geometric(plan.steps, d) == d.mask_solid();
}

}  // namespace hpm
