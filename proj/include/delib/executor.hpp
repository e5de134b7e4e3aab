// Online deliberation control: policy-driven stepping against observed or
// sampled outcomes, plus a seeded Monte Carlo simulator.
//
// Sampling contract: run j of simulate() uses std::mt19937_64 seeded with
// (seed XOR j). Each pmf sample consumes exactly one 64-bit draw U and picks
// the first support value whose cumulative probability F satisfies
// U / 2^64 < F. Per step the order is: deliberation cost, resource, then the
// execution cost only if the step completes. Any implementation honoring this
// contract reproduces traces bit for bit.
#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "delib/instance.hpp"
#include "delib/policy.hpp"
#include "delib/rational.hpp"

namespace delib {

// Where the incumbent solution came from.
struct SolutionSource {
  int method_id = 0;   // 0: the externally supplied alternative
  int step_index = 0;  // 1-based deliberation step that produced it; 0 for the alternative

  bool is_alternative() const { return method_id == 0; }
  std::string label() const {
    return method_id == 0 ? "Alt" : "M" + std::to_string(method_id);
  }

  friend bool operator==(const SolutionSource&, const SolutionSource&) = default;
};

struct DeliberationState {
  int k_remaining = 0;
  int incumbent_cost = 0;
  SolutionSource incumbent_source;
  int resource_remaining = 0;
  int delib_cost_accrued = 0;
  int steps_taken = 0;
  bool interrupted = false;  // once set, deliberation is over

  friend bool operator==(const DeliberationState&, const DeliberationState&) = default;
};

inline DeliberationState initial_state(const ProblemInstance& inst, int k) {
  DeliberationState st;
  st.k_remaining = k;
  st.incumbent_cost = inst.alt_cost;
  st.resource_remaining = inst.resource_limit;
  return st;
}

inline DeliberationState initial_state(const ProblemInstance& inst,
                                       const PolicyTable& table) {
  return initial_state(inst, table.horizon());
}

// Pure lookup of the table action for the current state. External changes to
// incumbent cost or remaining resource need no recomputation: the next lookup
// already answers for the shocked state.
inline Action next_action(const PolicyTable& table, const DeliberationState& st) {
  if (st.interrupted) return Action::halt();
  return table.at_state(st.k_remaining, st.incumbent_cost, st.resource_remaining)
      .action;
}

// One observed/sampled outcome of estimating a method. exec_cost is ignored
// when the step is interrupted (an interrupted method yields no solution).
struct StepOutcome {
  int delib_cost = 0;
  int resource = 0;
  int exec_cost = 0;
};

inline DeliberationState apply_outcome(const ProblemInstance& inst,
                                       const DeliberationState& st, Action action,
                                       const StepOutcome& outcome) {
  if (action.is_halt())
    throw std::invalid_argument("halt action has no outcome to apply");
  if (st.k_remaining <= 0)
    throw std::invalid_argument("no deliberation steps remaining");
  if (st.interrupted)
    throw std::invalid_argument("deliberation already interrupted");
  const MethodSpec& m = inst.method(action.method_id());
  if (!m.delib_cost.contains(outcome.delib_cost))
    throw std::invalid_argument("delib cost " + std::to_string(outcome.delib_cost) +
                                " outside support of method '" + m.name + "'");
  if (!m.resource.contains(outcome.resource))
    throw std::invalid_argument("resource " + std::to_string(outcome.resource) +
                                " outside support of method '" + m.name + "'");

  DeliberationState next = st;
  next.k_remaining -= 1;
  next.steps_taken += 1;
  next.delib_cost_accrued += outcome.delib_cost;
  if (outcome.resource > st.resource_remaining) {
    next.interrupted = true;
    next.resource_remaining = 0;
    return next;
  }
  if (!m.exec_cost.contains(outcome.exec_cost))
    throw std::invalid_argument("exec cost " + std::to_string(outcome.exec_cost) +
                                " outside support of method '" + m.name + "'");
  next.resource_remaining -= outcome.resource;
  if (outcome.exec_cost <= st.incumbent_cost) {  // ties adopt the new solution
    next.incumbent_cost = outcome.exec_cost;
    next.incumbent_source = SolutionSource{m.id, next.steps_taken};
  }
  return next;
}

// next_action composed with apply_outcome; the outcome is ignored when the
// recommendation is to halt.
inline std::pair<Action, DeliberationState> advise_step(const ProblemInstance& inst,
                                                        const PolicyTable& table,
                                                        const DeliberationState& st,
                                                        const StepOutcome& outcome) {
  const Action action = next_action(table, st);
  if (action.is_halt()) return {action, st};
  return {action, apply_outcome(inst, st, action, outcome)};
}

struct StepRecord {
  DeliberationState before;
  Action action;
  int delib_cost = 0;
  int resource = 0;
  bool completed = false;
  std::optional<int> exec_cost;  // empty when interrupted
  DeliberationState after;
};

struct TraceTerminal {
  SolutionSource source;
  int exec_cost = 0;
  int total_delib = 0;
  int total_cost = 0;
};

struct ExecutionTrace {
  std::vector<StepRecord> steps;
  TraceTerminal terminal;
};

// Inverse-CDF sampler. Thresholds are exact: U/2^64 < F holds iff
// U < ceil(F * 2^64), so one 128-bit compare per entry decides the draw.
class DistributionSampler {
 public:
  explicit DistributionSampler(const DiscreteDistribution& d) {
    Rational cumulative = 0;
    for (const PmfEntry& e : d.support()) {
      cumulative += e.prob;
      values_.push_back(e.value);
      BigInt scaled = cumulative.get_num();
      scaled <<= 64;
      BigInt threshold = scaled + cumulative.get_den() - 1;
      threshold /= cumulative.get_den();
      const BigInt high = threshold >> 64;
      const BigInt low = threshold - (high << 64);
      thresholds_.push_back(
          (static_cast<unsigned __int128>(high.get_ui()) << 64) | low.get_ui());
    }
  }

  int sample(std::mt19937_64& rng) const {
    const unsigned __int128 u = rng();
    for (size_t j = 0; j + 1 < values_.size(); ++j)
      if (u < thresholds_[j]) return values_[j];
    return values_.back();
  }

 private:
  std::vector<int> values_;
  std::vector<unsigned __int128> thresholds_;
};

struct SimulationStats {
  std::uint64_t n_runs = 0;
  Rational mean;
  Rational variance;  // sample variance (n-1 denominator), 0 for n = 1
  double std_error = 0.0;
  ExecutionTrace first_trace;
};

// Deterministic rollout of the table's policy. Runs are independent; exact
// integer totals are aggregated so the mean and variance are exact rationals.
inline SimulationStats simulate(const ProblemInstance& inst, const PolicyTable& table,
                                std::uint64_t seed, std::uint64_t n_runs) {
  if (n_runs == 0) throw std::invalid_argument("n_runs must be positive");

  struct MethodSamplers {
    DistributionSampler delib, resource, exec;
  };
  std::vector<MethodSamplers> samplers;
  samplers.reserve(inst.methods.size());
  for (const MethodSpec& m : inst.methods)
    samplers.push_back(MethodSamplers{DistributionSampler(m.delib_cost),
                                      DistributionSampler(m.resource),
                                      DistributionSampler(m.exec_cost)});

  BigInt sum = 0;
  BigInt sum_squares = 0;
  SimulationStats stats;
  stats.n_runs = n_runs;

  for (std::uint64_t run = 0; run < n_runs; ++run) {
    std::mt19937_64 rng(seed ^ run);
    DeliberationState st = initial_state(inst, table);
    const bool record = run == 0;
    while (true) {
      const Action action = next_action(table, st);
      if (action.is_halt()) break;
      const MethodSamplers& ms = samplers[static_cast<size_t>(action.method_id()) - 1];
      StepOutcome outcome;
      outcome.delib_cost = ms.delib.sample(rng);
      outcome.resource = ms.resource.sample(rng);
      const bool completes = outcome.resource <= st.resource_remaining;
      if (completes) outcome.exec_cost = ms.exec.sample(rng);
      const DeliberationState after = apply_outcome(inst, st, action, outcome);
      if (record)
        stats.first_trace.steps.push_back(
            StepRecord{st, action, outcome.delib_cost, outcome.resource, completes,
                       completes ? std::optional<int>(outcome.exec_cost) : std::nullopt,
                       after});
      st = after;
    }
    const long total = st.delib_cost_accrued + st.incumbent_cost;
    if (record)
      stats.first_trace.terminal = TraceTerminal{
          st.incumbent_source, st.incumbent_cost, st.delib_cost_accrued,
          static_cast<int>(total)};
    sum += total;
    sum_squares += BigInt(total) * total;
  }

  const BigInt n(static_cast<unsigned long>(n_runs));
  stats.mean = Rational(sum, n);
  stats.mean.canonicalize();
  if (n_runs > 1) {
    stats.variance = Rational(BigInt(n * sum_squares - sum * sum), BigInt(n * (n - 1)));
    stats.variance.canonicalize();
  } else {
    stats.variance = 0;
  }
  const Rational mean_square_error = stats.variance / Rational(n);
  stats.std_error = std::sqrt(mean_square_error.get_d());
  return stats;
}

// One tab-separated line per step plus a TOTAL terminal line.
inline std::string format_trace(const ExecutionTrace& trace) {
  std::string out = "step\tk\tc\tr\taction\tdelib\tres\tstatus\texec\tc_after\n";
  int index = 1;
  for (const StepRecord& s : trace.steps) {
    out += std::to_string(index++) + "\t" + std::to_string(s.before.k_remaining) +
           "\t" + std::to_string(s.before.incumbent_cost) + "\t" +
           std::to_string(s.before.resource_remaining) + "\t" + s.action.label() +
           "\t" + std::to_string(s.delib_cost) + "\t" + std::to_string(s.resource) +
           "\t" + (s.completed ? "completed" : "interrupted") + "\t" +
           (s.exec_cost ? std::to_string(*s.exec_cost) : std::string("NONE")) +
           "\t" + std::to_string(s.after.incumbent_cost) + "\n";
  }
  out += "TOTAL delib=" + std::to_string(trace.terminal.total_delib) +
         " exec=" + std::to_string(trace.terminal.exec_cost) +
         " total=" + std::to_string(trace.terminal.total_cost) +
         " source=" + trace.terminal.source.label() + "\n";
  return out;
}

}  // namespace delib
