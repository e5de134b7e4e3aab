// Independent brute-force verification of policies and of optimality.
//
// Nothing here shares machinery with the dynamic-programming solvers:
// policy evaluation expands the complete outcome tree and sums
// probability-weighted realized path costs, and enumerate_optimal searches
// over history-dependent decision trees without collapsing histories that
// happen to reach the same (k, c, r) state. Both are desk-scale tools guarded
// by a hard branch budget.
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <utility>

#include "delib/executor.hpp"
#include "delib/instance.hpp"
#include "delib/policy.hpp"

namespace delib {

inline constexpr std::uint64_t kDefaultEnumerationGuard = 10'000'000;

// A policy as an explicit tree over observed outcomes. A method node has one
// child per joint (resource, exec cost) support pair; interruption ends
// deliberation and needs no child. Halt nodes are leaves.
struct DecisionTreePolicy {
  struct Node {
    Action action;
    std::map<std::pair<int, int>, std::unique_ptr<Node>> children;
  };

  std::unique_ptr<Node> root;

  static DecisionTreePolicy halt_policy() {
    DecisionTreePolicy p;
    p.root = std::make_unique<Node>();
    return p;
  }
};

namespace detail {

struct EnumerationBudget {
  std::uint64_t remaining;

  void spend() {
    if (remaining == 0)
      throw GuardExceededError("enumeration guard exceeded");
    --remaining;
  }
};

inline std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  return p > ~std::uint64_t{0} ? ~std::uint64_t{0} : static_cast<std::uint64_t>(p);
}

inline std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
  const std::uint64_t s = a + b;
  return s < a ? ~std::uint64_t{0} : s;
}

// Upper bound on enumeration steps for a tree with `children_per_node`
// branching over `depth` levels: nodes * work inside one node.
inline std::uint64_t work_bound(std::uint64_t children_per_node, int depth,
                                std::uint64_t per_node) {
  std::uint64_t nodes = 0;
  std::uint64_t level = 1;
  for (int j = 0; j <= depth; ++j) {
    nodes = saturating_add(nodes, level);
    level = saturating_mul(level, children_per_node);
  }
  return saturating_mul(nodes, per_node);
}

inline void check_evaluation_guard(const ProblemInstance& inst, int depth,
                                   std::uint64_t guard) {
  std::uint64_t branching = 1;
  std::uint64_t per_node = 1;
  for (const MethodSpec& m : inst.methods) {
    const auto joint = saturating_mul(
        m.delib_cost.support().size(),
        saturating_mul(m.resource.support().size(), m.exec_cost.support().size()));
    branching = std::max(branching, joint);
    per_node = std::max(per_node, saturating_mul(2, joint));
  }
  if (work_bound(branching, depth, per_node) > guard)
    throw GuardExceededError("enumeration guard exceeded");
}

inline void check_enumeration_guard(const ProblemInstance& inst, int depth,
                                    std::uint64_t guard) {
  std::uint64_t branching = 0;
  std::uint64_t per_node = 0;
  for (const MethodSpec& m : inst.methods) {
    const auto joint = saturating_mul(m.resource.support().size(),
                                      m.exec_cost.support().size());
    branching = saturating_add(branching, joint);
    per_node = saturating_add(per_node, saturating_mul(2, joint));
  }
  if (work_bound(branching, depth, std::max<std::uint64_t>(per_node, 1)) > guard)
    throw GuardExceededError("enumeration guard exceeded");
}

// Walks every outcome path, accumulating P(path) * (delib paid + final
// incumbent). `ActionFn(k, c, r) -> Action` and `DescendFn(rho, exec)` define
// the policy being followed; DescendFn returns the ActionFn to use below.
template <class ActionFn>
void accumulate_path_costs(const ProblemInstance& inst, const ActionFn& policy,
                           int k, int c, int r, const Rational& path_prob,
                           long delib_so_far, Rational& total,
                           EnumerationBudget& budget) {
  const Action action = policy.action(k, c, r);
  if (action.is_halt()) {
    total += path_prob * (delib_so_far + c);
    return;
  }
  if (k <= 0) throw std::invalid_argument("policy deeper than its horizon");
  const MethodSpec& m = inst.method(action.method_id());
  for (const PmfEntry& d : m.delib_cost.support()) {
    for (const PmfEntry& rho : m.resource.support()) {
      budget.spend();
      const Rational branch = path_prob * d.prob * rho.prob;
      if (rho.value > r) {
        // interrupted: full deliberation cost, no solution, deliberation over
        total += branch * (delib_so_far + d.value + c);
        continue;
      }
      for (const PmfEntry& x : m.exec_cost.support()) {
        budget.spend();
        accumulate_path_costs(inst, policy.descend(rho.value, x.value), k - 1,
                              std::min(c, x.value), r - rho.value,
                              branch * x.prob, delib_so_far + d.value, total,
                              budget);
      }
    }
  }
}

struct TablePolicyView {
  const PolicyTable* table;

  Action action(int k, int c, int r) const { return table->at_state(k, c, r).action; }
  const TablePolicyView& descend(int, int) const { return *this; }
};

struct TreePolicyView {
  const DecisionTreePolicy::Node* node;

  Action action(int, int, int) const {
    if (node == nullptr) throw std::invalid_argument("policy tree has a missing node");
    return node->action;
  }

  TreePolicyView descend(int rho, int exec) const {
    const auto it = node->children.find({rho, exec});
    if (it == node->children.end())
      throw std::invalid_argument("policy tree does not cover outcome (res=" +
                                  std::to_string(rho) +
                                  ", exec=" + std::to_string(exec) + ")");
    return TreePolicyView{it->second.get()};
  }
};

}  // namespace detail

// Exact expected total cost of running `table`'s policy, by full outcome-tree
// expansion (no value recursion, no state merging).
inline Rational policy_value_exact(const ProblemInstance& inst, const PolicyTable& table,
                                   std::uint64_t guard = kDefaultEnumerationGuard) {
  detail::check_evaluation_guard(inst, table.horizon(), guard);
  detail::EnumerationBudget budget{guard};
  Rational total = 0;
  detail::accumulate_path_costs(inst, detail::TablePolicyView{&table},
                                table.horizon(), inst.alt_cost,
                                inst.resource_limit, Rational(1), 0, total,
                                budget);
  return total;
}

// Exact expected total cost of an explicit decision-tree policy of depth at
// most `k_max`.
inline Rational policy_value_exact(const ProblemInstance& inst,
                                   const DecisionTreePolicy& policy, int k_max,
                                   std::uint64_t guard = kDefaultEnumerationGuard) {
  if (!policy.root) throw std::invalid_argument("policy has no root");
  detail::check_evaluation_guard(inst, k_max, guard);
  detail::EnumerationBudget budget{guard};
  Rational total = 0;
  detail::accumulate_path_costs(inst, detail::TreePolicyView{policy.root.get()},
                                k_max, inst.alt_cost, inst.resource_limit,
                                Rational(1), 0, total, budget);
  return total;
}

struct EnumerationResult {
  Rational value;
  DecisionTreePolicy witness;
};

namespace detail {

struct BestChoice {
  Rational value;
  std::unique_ptr<DecisionTreePolicy::Node> node;
};

// Exhaustive minimization over history-dependent policies. Each recursive
// call answers for one observation history; identical (k, c, r) states
// reached along different histories are recomputed, never shared, so
// agreement with the DP also certifies that the state is sufficient.
inline BestChoice enumerate_best(const ProblemInstance& inst, bool allow_halt,
                                 int k, int c, int r, EnumerationBudget& budget) {
  if (k == 0) {
    auto leaf = std::make_unique<DecisionTreePolicy::Node>();
    return BestChoice{Rational(c), std::move(leaf)};
  }

  BestChoice best{Rational(c), nullptr};
  bool have_best = false;
  if (allow_halt) {
    best.node = std::make_unique<DecisionTreePolicy::Node>();
    have_best = true;
  }

  for (const MethodSpec& m : inst.methods) {
    auto node = std::make_unique<DecisionTreePolicy::Node>();
    node->action = Action::method(m.id);
    Rational after_delib = 0;  // expected cost once the deliberation fee is paid
    for (const PmfEntry& rho : m.resource.support()) {
      budget.spend();
      if (rho.value > r) {
        after_delib += rho.prob * c;
        continue;
      }
      Rational completed = 0;
      for (const PmfEntry& x : m.exec_cost.support()) {
        budget.spend();
        BestChoice child = enumerate_best(inst, allow_halt, k - 1,
                                          std::min(c, x.value), r - rho.value,
                                          budget);
        completed += x.prob * child.value;
        node->children.emplace(std::make_pair(rho.value, x.value),
                               std::move(child.node));
      }
      after_delib += rho.prob * completed;
    }
    Rational value = 0;
    for (const PmfEntry& d : m.delib_cost.support())
      value += d.prob * (d.value + after_delib);
    if (!have_best || value < best.value) {
      best.value = std::move(value);
      best.node = std::move(node);
      have_best = true;
    }
  }
  return best;
}

}  // namespace detail

// Exact optimum over all history-dependent generate-and-test policies of
// depth at most k_max (exactly k_max method steps when the instance is
// basic, where halting early cannot help). Returns the optimal value and a
// witness policy attaining it.
inline EnumerationResult enumerate_optimal(const ProblemInstance& inst, int k_max,
                                           std::uint64_t guard = kDefaultEnumerationGuard) {
  if (k_max < 0) throw std::invalid_argument("horizon must be nonnegative");
  detail::check_enumeration_guard(inst, k_max, guard);
  detail::EnumerationBudget budget{guard};
  const bool allow_halt = inst.variant != Variant::Basic;
  detail::BestChoice best = detail::enumerate_best(inst, allow_halt, k_max,
                                                   inst.alt_cost,
                                                   inst.resource_limit, budget);
  DecisionTreePolicy witness;
  witness.root = std::move(best.node);
  return EnumerationResult{std::move(best.value), std::move(witness)};
}

}  // namespace delib
