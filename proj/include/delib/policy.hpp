// Optimal deliberation policies by backward stochastic dynamic programming.
//
// A policy table stores, for every state (k steps left, incumbent cost c, and
// remaining resource r when the instance consumes resource), the exact optimal
// expected remaining total cost and the action attaining it. Layer k is built
// from layer k-1; the base layer pays the incumbent.
//
// Tie-breaking is deterministic: basic tables prefer the lowest method index;
// cost/full tables prefer halting, then the lowest method index.
#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "delib/errors.hpp"
#include "delib/instance.hpp"
#include "delib/rational.hpp"

namespace delib {

// Halt (execute the incumbent now, id 0) or estimate one more method.
class Action {
 public:
  Action() = default;  // halt

  static Action halt() { return Action(); }

  static Action method(int id) {
    if (id < 1) throw std::invalid_argument("method id must be >= 1");
    Action a;
    a.id_ = id;
    return a;
  }

  bool is_halt() const { return id_ == 0; }

  int method_id() const {
    if (id_ == 0) throw std::logic_error("halt action has no method id");
    return id_;
  }

  // "H" or "M<i>"
  std::string label() const {
    return id_ == 0 ? "H" : "M" + std::to_string(id_);
  }

  friend bool operator==(const Action& a, const Action& b) { return a.id_ == b.id_; }

 private:
  int id_ = 0;
};

struct PolicyCell {
  Rational value;
  Action action;
};

// Dense (k, c[, r]) grid of optimal expected remaining cost plus the
// minimizing action. Immutable once constructed.
class PolicyTable {
 public:
  PolicyTable(Variant variant, int horizon, int alt_cost, int resource_limit,
              std::vector<PolicyCell> cells)
      : variant_(variant),
        horizon_(horizon),
        alt_cost_(alt_cost),
        resource_limit_(resource_limit),
        rdim_(variant == Variant::Full ? resource_limit + 1 : 1),
        cells_(std::move(cells)) {
    const size_t expected = static_cast<size_t>(horizon_ + 1) *
                            static_cast<size_t>(alt_cost_ + 1) *
                            static_cast<size_t>(rdim_);
    if (horizon_ < 0 || alt_cost_ < 0 || resource_limit_ < 0 ||
        cells_.size() != expected)
      throw std::invalid_argument("policy table dimensions do not match cells");
  }

  Variant variant() const { return variant_; }
  int horizon() const { return horizon_; }
  int alt_cost() const { return alt_cost_; }
  int resource_limit() const { return resource_limit_; }
  bool has_resource_axis() const { return variant_ == Variant::Full; }

  const PolicyCell& at(int k, int c) const {
    if (has_resource_axis())
      throw std::invalid_argument("table has a resource axis; lookup needs r");
    return cell_checked(k, c, 0);
  }

  const PolicyCell& at(int k, int c, int r) const {
    if (!has_resource_axis())
      throw std::invalid_argument("table has no resource axis");
    return cell_checked(k, c, r);
  }

  // State lookup that ignores the resource coordinate when the table has no
  // resource axis (the controller tracks r even for cost-only instances).
  const PolicyCell& at_state(int k, int c, int r) const {
    return cell_checked(k, c, has_resource_axis() ? r : 0);
  }

  const PolicyCell& root() const {
    return cell_checked(horizon_, alt_cost_, rdim_ - 1);
  }

 private:
  const PolicyCell& cell_checked(int k, int c, int r) const {
    if (k < 0 || k > horizon_ || c < 0 || c > alt_cost_ || r < 0 || r >= rdim_)
      throw std::out_of_range("state (k=" + std::to_string(k) +
                              ", c=" + std::to_string(c) +
                              ", r=" + std::to_string(r) + ") outside table axes");
    return cells_[(static_cast<size_t>(k) * static_cast<size_t>(alt_cost_ + 1) +
                   static_cast<size_t>(c)) *
                      static_cast<size_t>(rdim_) +
                  static_cast<size_t>(r)];
  }

  Variant variant_;
  int horizon_;
  int alt_cost_;
  int resource_limit_;
  int rdim_;
  std::vector<PolicyCell> cells_;
};

namespace detail {

// P(exec cost > c) per method, for c = 0..alt_cost.
inline std::vector<std::vector<Rational>> exec_tails(const ProblemInstance& inst) {
  std::vector<std::vector<Rational>> tails;
  tails.reserve(inst.methods.size());
  for (const MethodSpec& m : inst.methods) {
    std::vector<Rational> row(static_cast<size_t>(inst.alt_cost) + 1);
    for (int c = 0; c <= inst.alt_cost; ++c)
      row[static_cast<size_t>(c)] = m.exec_cost.tail_above(c);
    tails.push_back(std::move(row));
  }
  return tails;
}

// Expected cost of one estimation step over layer values `prev`:
//   P(X > c) * prev[c] + sum_{x <= c} P(X = x) * prev[x]
// computed for all c in one ascending sweep.
inline std::vector<Rational> completed_step_values(const DiscreteDistribution& exec,
                                                   const std::vector<Rational>& tail,
                                                   const std::vector<Rational>& prev) {
  const int alt = static_cast<int>(prev.size()) - 1;
  std::vector<Rational> out(prev.size());
  size_t sp = 0;
  Rational prefix = 0;
  const auto& support = exec.support();
  for (int c = 0; c <= alt; ++c) {
    while (sp < support.size() && support[sp].value <= c) {
      prefix += support[sp].prob * prev[static_cast<size_t>(support[sp].value)];
      ++sp;
    }
    out[static_cast<size_t>(c)] = tail[static_cast<size_t>(c)] * prev[static_cast<size_t>(c)] + prefix;
  }
  return out;
}

}  // namespace detail

// No deliberation cost, no resource: exactly-k-step tables minimizing over
// the methods alone (halting appears only in the base layer).
inline PolicyTable solve_basic(const ProblemInstance& inst, int k_max) {
  if (inst.variant != Variant::Basic)
    throw std::invalid_argument("solve_basic requires a basic-variant instance");
  if (k_max < 0) throw std::invalid_argument("horizon must be nonnegative");

  const int alt = inst.alt_cost;
  const int methods = inst.method_count();
  const auto tails = detail::exec_tails(inst);

  std::vector<PolicyCell> cells(static_cast<size_t>(k_max + 1) *
                                static_cast<size_t>(alt + 1));
  std::vector<Rational> prev(static_cast<size_t>(alt) + 1);
  for (int c = 0; c <= alt; ++c) {
    prev[static_cast<size_t>(c)] = c;
    cells[static_cast<size_t>(c)] = PolicyCell{Rational(c), Action::halt()};
  }

  for (int k = 1; k <= k_max; ++k) {
    std::vector<Rational> next(static_cast<size_t>(alt) + 1);
    std::vector<std::vector<Rational>> candidate(static_cast<size_t>(methods));
    for (int i = 0; i < methods; ++i)
      candidate[static_cast<size_t>(i)] = detail::completed_step_values(
          inst.methods[static_cast<size_t>(i)].exec_cost,
          tails[static_cast<size_t>(i)], prev);
    for (int c = 0; c <= alt; ++c) {
      Rational best = candidate[0][static_cast<size_t>(c)];
      Action act = Action::method(1);
      for (int i = 1; i < methods; ++i) {
        const Rational& v = candidate[static_cast<size_t>(i)][static_cast<size_t>(c)];
        if (v < best) {
          best = v;
          act = Action::method(i + 1);
        }
      }
      next[static_cast<size_t>(c)] = best;
      cells[static_cast<size_t>(k) * static_cast<size_t>(alt + 1) +
            static_cast<size_t>(c)] = PolicyCell{best, act};
    }
    prev = std::move(next);
  }
  return PolicyTable(Variant::Basic, k_max, alt, inst.resource_limit,
                     std::move(cells));
}

// Deliberation cost, no resource: each method candidate adds its expected
// deliberation cost, and halting (pay the incumbent now) competes at every
// state, so tables carry at-most-k semantics.
inline PolicyTable solve_with_cost(const ProblemInstance& inst, int k_max) {
  if (inst.variant == Variant::Full)
    throw std::invalid_argument("solve_with_cost rejects full-variant instances");
  if (k_max < 0) throw std::invalid_argument("horizon must be nonnegative");

  const int alt = inst.alt_cost;
  const int methods = inst.method_count();
  const auto tails = detail::exec_tails(inst);
  std::vector<Rational> delib_mean;
  for (const MethodSpec& m : inst.methods)
    delib_mean.push_back(m.delib_cost.expected_value());

  std::vector<PolicyCell> cells(static_cast<size_t>(k_max + 1) *
                                static_cast<size_t>(alt + 1));
  std::vector<Rational> prev(static_cast<size_t>(alt) + 1);
  for (int c = 0; c <= alt; ++c) {
    prev[static_cast<size_t>(c)] = c;
    cells[static_cast<size_t>(c)] = PolicyCell{Rational(c), Action::halt()};
  }

  for (int k = 1; k <= k_max; ++k) {
    std::vector<Rational> next(static_cast<size_t>(alt) + 1);
    std::vector<std::vector<Rational>> candidate(static_cast<size_t>(methods));
    for (int i = 0; i < methods; ++i)
      candidate[static_cast<size_t>(i)] = detail::completed_step_values(
          inst.methods[static_cast<size_t>(i)].exec_cost,
          tails[static_cast<size_t>(i)], prev);
    for (int c = 0; c <= alt; ++c) {
      Rational best(c);
      Action act = Action::halt();
      for (int i = 0; i < methods; ++i) {
        Rational v = candidate[static_cast<size_t>(i)][static_cast<size_t>(c)] +
                     delib_mean[static_cast<size_t>(i)];
        if (v < best) {
          best = std::move(v);
          act = Action::method(i + 1);
        }
      }
      next[static_cast<size_t>(c)] = best;
      cells[static_cast<size_t>(k) * static_cast<size_t>(alt + 1) +
            static_cast<size_t>(c)] = PolicyCell{best, act};
    }
    prev = std::move(next);
  }
  return PolicyTable(Variant::Cost, k_max, alt, inst.resource_limit,
                     std::move(cells));
}

// Deliberation cost and resource consumption. A method whose sampled
// consumption exceeds the remaining resource is interrupted: it yields no
// solution, charges its full deliberation cost, and ends deliberation, so the
// interrupted branch pays the incumbent. Consuming exactly the remaining
// resource still completes.
inline PolicyTable solve_full(const ProblemInstance& inst, int k_max) {
  if (k_max < 0) throw std::invalid_argument("horizon must be nonnegative");

  const int alt = inst.alt_cost;
  const int rbar = inst.resource_limit;
  const int methods = inst.method_count();
  const size_t cdim = static_cast<size_t>(alt) + 1;
  const size_t rdim = static_cast<size_t>(rbar) + 1;
  const auto tails = detail::exec_tails(inst);

  std::vector<Rational> delib_mean;
  std::vector<std::vector<Rational>> res_tail;  // P(resource > r), r = 0..rbar
  for (const MethodSpec& m : inst.methods) {
    delib_mean.push_back(m.delib_cost.expected_value());
    std::vector<Rational> row(rdim);
    for (int r = 0; r <= rbar; ++r)
      row[static_cast<size_t>(r)] = m.resource.tail_above(r);
    res_tail.push_back(std::move(row));
  }

  const auto idx = [cdim, rdim](int c, int r) {
    return static_cast<size_t>(c) * rdim + static_cast<size_t>(r);
  };

  std::vector<PolicyCell> cells(static_cast<size_t>(k_max + 1) * cdim * rdim);
  std::vector<Rational> prev(cdim * rdim);
  for (int c = 0; c <= alt; ++c)
    for (int r = 0; r <= rbar; ++r) {
      prev[idx(c, r)] = c;
      cells[idx(c, r)] = PolicyCell{Rational(c), Action::halt()};
    }

  std::vector<Rational> ladder(cdim * rdim);  // completed-step values, per method
  std::vector<Rational> column(cdim);
  std::vector<Rational> tail_col(cdim);
  for (int k = 1; k <= k_max; ++k) {
    const size_t layer = static_cast<size_t>(k) * cdim * rdim;
    std::vector<Rational> next(cdim * rdim);
    for (int c = 0; c <= alt; ++c)
      for (int r = 0; r <= rbar; ++r) {
        next[idx(c, r)] = c;
        cells[layer + idx(c, r)] = PolicyCell{Rational(c), Action::halt()};
      }
    for (int i = 0; i < methods; ++i) {
      const MethodSpec& m = inst.methods[static_cast<size_t>(i)];
      for (int r2 = 0; r2 <= rbar; ++r2) {
        for (int c = 0; c <= alt; ++c) column[static_cast<size_t>(c)] = prev[idx(c, r2)];
        tail_col = detail::completed_step_values(m.exec_cost,
                                                 tails[static_cast<size_t>(i)], column);
        for (int c = 0; c <= alt; ++c) ladder[idx(c, r2)] = tail_col[static_cast<size_t>(c)];
      }
      for (int r = 0; r <= rbar; ++r) {
        const Rational& interrupted = res_tail[static_cast<size_t>(i)][static_cast<size_t>(r)];
        for (int c = 0; c <= alt; ++c) {
          Rational v = interrupted * c + delib_mean[static_cast<size_t>(i)];
          for (const PmfEntry& rho : m.resource.support()) {
            if (rho.value > r) break;
            v += rho.prob * ladder[idx(c, r - rho.value)];
          }
          PolicyCell& cell = cells[layer + idx(c, r)];
          if (v < cell.value) {
            cell.value = std::move(v);
            cell.action = Action::method(i + 1);
            next[idx(c, r)] = cell.value;
          }
        }
      }
    }
    prev = std::move(next);
  }
  return PolicyTable(Variant::Full, k_max, alt, rbar, std::move(cells));
}

inline PolicyTable solve(const ProblemInstance& inst, int k_max) {
  switch (inst.variant) {
    case Variant::Basic: return solve_basic(inst, k_max);
    case Variant::Cost: return solve_with_cost(inst, k_max);
    case Variant::Full: return solve_full(inst, k_max);
  }
  throw std::logic_error("unreachable");
}

// Step bound equivalent to solving with no predefined limit: once the surely
// paid deliberation cost exceeds the alternative cost, extra steps cannot
// help. Requires every method to surely pay at least 1 per step.
inline int horizon_bound(const ProblemInstance& inst) {
  if (inst.methods.empty()) throw std::invalid_argument("instance has no methods");
  int cheapest = 0;
  bool first = true;
  for (const MethodSpec& m : inst.methods) {
    const int lo = m.delib_cost.min_value();
    if (lo == 0)
      throw UnboundedHorizonError("unbounded horizon: method '" + m.name +
                                  "' can deliberate at zero cost");
    if (first || lo < cheapest) cheapest = lo;
    first = false;
  }
  return (inst.alt_cost + cheapest - 1) / cheapest;
}

// Header k,c[,r],value_exact,value_decimal,action; rows sorted by
// (k desc, c desc, r desc). value_exact is always num/den.
inline std::string to_csv(const PolicyTable& table) {
  std::string out = table.has_resource_axis()
                        ? "k,c,r,value_exact,value_decimal,action\n"
                        : "k,c,value_exact,value_decimal,action\n";
  for (int k = table.horizon(); k >= 0; --k)
    for (int c = table.alt_cost(); c >= 0; --c) {
      if (table.has_resource_axis()) {
        for (int r = table.resource_limit(); r >= 0; --r) {
          const PolicyCell& cell = table.at(k, c, r);
          out += std::to_string(k) + "," + std::to_string(c) + "," +
                 std::to_string(r) + "," + fraction_string(cell.value) + "," +
                 decimal_string(cell.value) + "," + cell.action.label() + "\n";
        }
      } else {
        const PolicyCell& cell = table.at(k, c);
        out += std::to_string(k) + "," + std::to_string(c) + "," +
               fraction_string(cell.value) + "," + decimal_string(cell.value) +
               "," + cell.action.label() + "\n";
      }
    }
  return out;
}

}  // namespace delib
