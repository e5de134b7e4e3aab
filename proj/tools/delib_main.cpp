// Command-line front end: solve instances, export tables, run seeded
// simulations, step through advised deliberation, and certify tables against
// the brute-force oracle.
//
// Exit codes: 0 success/PASS, 1 failure or oracle FAIL, 2 parse error,
// 3 unbounded horizon, 4 enumeration guard exceeded.
#include <unistd.h>

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "delib/executor.hpp"
#include "delib/oracle.hpp"
#include "delib/parse.hpp"
#include "delib/policy.hpp"

namespace {

struct Options {
  std::string instance_path;
  std::string horizon;  // empty: use the instance file; "inf"; or an integer
  std::uint64_t seed = 0;
  std::uint64_t runs = 100000;
  std::string out;
  std::string script;
  std::string format = "csv";
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw delib::ParseError("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
}

delib::ProblemInstance load_instance(const Options& opt) {
  return delib::parse_instance(read_file(opt.instance_path));
}

struct ResolvedHorizon {
  int k = 0;
  bool from_infinite = false;  // k was derived as the bound K'
};

ResolvedHorizon resolve_horizon(const delib::ProblemInstance& inst,
                                const Options& opt) {
  std::optional<int> finite = inst.horizon;
  if (!opt.horizon.empty()) {
    if (opt.horizon == "inf") {
      finite.reset();
    } else {
      int value = 0;
      const char* first = opt.horizon.data();
      const char* last = first + opt.horizon.size();
      const auto [ptr, ec] = std::from_chars(first, last, value);
      if (ec != std::errc() || ptr != last || value < 1)
        throw delib::ParseError("--horizon must be a positive integer or 'inf'");
      finite = value;
    }
  }
  if (finite) return ResolvedHorizon{*finite, false};
  return ResolvedHorizon{delib::horizon_bound(inst), true};
}

std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.9g", value);
  return buffer;
}

// Aligned grid, rows by incumbent cost (descending), columns by remaining
// steps (descending); full-variant tables print one grid per resource level.
std::string render_text(const delib::PolicyTable& table) {
  const auto grid = [&table](int r) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> header{"c\\k"};
    for (int k = table.horizon(); k >= 0; --k) header.push_back(std::to_string(k));
    rows.push_back(header);
    for (int c = table.alt_cost(); c >= 0; --c) {
      std::vector<std::string> row{std::to_string(c)};
      for (int k = table.horizon(); k >= 0; --k) {
        const delib::PolicyCell& cell = table.has_resource_axis()
                                            ? table.at(k, c, r)
                                            : table.at(k, c);
        row.push_back(delib::decimal_string(cell.value) + " " + cell.action.label());
      }
      rows.push_back(row);
    }
    std::vector<size_t> width(rows[0].size(), 0);
    for (const auto& row : rows)
      for (size_t j = 0; j < row.size(); ++j)
        width[j] = std::max(width[j], row[j].size());
    std::string out;
    for (const auto& row : rows) {
      for (size_t j = 0; j < row.size(); ++j) {
        if (j > 0) out += "  ";
        out += row[j];
        out += std::string(width[j] - row[j].size(), ' ');
      }
      while (!out.empty() && out.back() == ' ') out.pop_back();
      out += "\n";
    }
    return out;
  };

  if (!table.has_resource_axis()) return grid(0);
  std::string out;
  for (int r = table.resource_limit(); r >= 0; --r) {
    out += "r=" + std::to_string(r) + "\n";
    out += grid(r);
    if (r > 0) out += "\n";
  }
  return out;
}

int cmd_solve(const Options& opt) {
  const delib::ProblemInstance inst = load_instance(opt);
  const ResolvedHorizon horizon = resolve_horizon(inst, opt);
  const delib::PolicyTable table = delib::solve(inst, horizon.k);
  if (horizon.from_infinite) std::cout << "K'=" << horizon.k << "\n";
  if (!opt.out.empty())
    write_file(opt.out, opt.format == "text" ? render_text(table)
                                             : delib::to_csv(table));
  const delib::PolicyCell& root = table.root();
  std::cout << "value=" << delib::fraction_string(root.value) << " ("
            << delib::decimal_string(root.value) << ") action="
            << root.action.label() << " K=" << horizon.k << "\n";
  return 0;
}

int cmd_simulate(const Options& opt) {
  const delib::ProblemInstance inst = load_instance(opt);
  const ResolvedHorizon horizon = resolve_horizon(inst, opt);
  const delib::PolicyTable table = delib::solve(inst, horizon.k);
  const delib::SimulationStats stats =
      delib::simulate(inst, table, opt.seed, opt.runs);
  if (!opt.out.empty()) write_file(opt.out, delib::format_trace(stats.first_trace));
  std::cout << "runs=" << stats.n_runs << " seed=" << opt.seed << " mean="
            << delib::decimal_string(stats.mean) << " ("
            << delib::fraction_string(stats.mean) << ") var="
            << delib::decimal_string(stats.variance) << " se="
            << format_double(stats.std_error) << "\n";
  return 0;
}

int cmd_oracle_check(const Options& opt) {
  const delib::ProblemInstance inst = load_instance(opt);
  const ResolvedHorizon horizon = resolve_horizon(inst, opt);
  const delib::PolicyTable table = delib::solve(inst, horizon.k);
  const delib::EnumerationResult best = delib::enumerate_optimal(inst, horizon.k);
  const bool pass = table.root().value == best.value;
  std::cout << "dp=" << delib::fraction_string(table.root().value) << " oracle="
            << delib::fraction_string(best.value) << " "
            << (pass ? "PASS" : "FAIL") << "\n";
  return pass ? 0 : 1;
}

std::string state_line(const delib::DeliberationState& st, delib::Variant variant) {
  std::string out = "k=" + std::to_string(st.k_remaining) +
                    " c=" + std::to_string(st.incumbent_cost);
  if (variant == delib::Variant::Full)
    out += " r=" + std::to_string(st.resource_remaining);
  if (variant != delib::Variant::Basic)
    out += " delib_spent=" + std::to_string(st.delib_cost_accrued);
  if (st.interrupted) out += " interrupted";
  return out;
}

// Reads key=value outcome tokens; which keys are required depends on which
// outcome components are actually random for the variant.
delib::StepOutcome parse_outcome_line(const std::string& line, delib::Variant variant) {
  std::optional<int> exec, delib_cost, res;
  std::istringstream in(line);
  std::string token;
  while (in >> token) {
    const size_t eq = token.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("expected key=value, got '" + token + "'");
    const std::string key = token.substr(0, eq);
    const std::string text = token.substr(eq + 1);
    int value = 0;
    const char* first = text.data();
    const auto [ptr, ec] = std::from_chars(first, first + text.size(), value);
    if (ec != std::errc() || ptr != first + text.size())
      throw std::invalid_argument("value of '" + key + "' must be an integer");
    auto assign = [&](std::optional<int>& slot) {
      if (slot) throw std::invalid_argument("duplicate key '" + key + "'");
      slot = value;
    };
    if (key == "exec") assign(exec);
    else if (key == "delib") assign(delib_cost);
    else if (key == "res") assign(res);
    else throw std::invalid_argument("unknown key '" + key + "'");
  }
  if (!exec) throw std::invalid_argument("missing exec=<int>");
  if (variant != delib::Variant::Basic && !delib_cost)
    throw std::invalid_argument("missing delib=<int>");
  if (variant == delib::Variant::Full && !res)
    throw std::invalid_argument("missing res=<int>");
  if (variant == delib::Variant::Basic && delib_cost)
    throw std::invalid_argument("basic instances take exec=<int> only");
  if (variant != delib::Variant::Full && res)
    throw std::invalid_argument("res=<int> applies to full instances only");
  return delib::StepOutcome{delib_cost.value_or(0), res.value_or(0), *exec};
}

int cmd_advise(const Options& opt) {
  const delib::ProblemInstance inst = load_instance(opt);
  const ResolvedHorizon horizon = resolve_horizon(inst, opt);
  const delib::PolicyTable table = delib::solve(inst, horizon.k);

  std::ifstream script;
  if (!opt.script.empty()) {
    script.open(opt.script);
    if (!script) throw delib::ParseError("cannot open '" + opt.script + "'");
  }
  std::istream& outcomes = opt.script.empty() ? std::cin : script;
  const bool prompt = opt.script.empty() && isatty(0);

  delib::DeliberationState st = delib::initial_state(inst, table);
  while (true) {
    const delib::Action action = delib::next_action(table, st);
    if (action.is_halt()) {
      std::cout << "HALT " << state_line(st, inst.variant) << "\n";
      std::cout << "EXECUTE source=" << st.incumbent_source.label()
                << " cost=" << st.incumbent_cost << "\n";
      return 0;
    }
    std::cout << "STEP " << state_line(st, inst.variant)
              << " action=" << action.label() << "\n";
    while (true) {
      if (prompt) std::cout << "> " << std::flush;
      std::string line;
      if (!std::getline(outcomes, line)) {
        std::cerr << "error: outcome stream ended before deliberation halted\n";
        return 2;
      }
      if (const size_t hash = line.find('#'); hash != std::string::npos)
        line.resize(hash);
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        const delib::StepOutcome outcome = parse_outcome_line(line, inst.variant);
        st = delib::apply_outcome(inst, st, action, outcome);
        break;
      } catch (const std::invalid_argument& e) {
        std::cout << "ERROR " << e.what() << "\n";
      }
    }
    std::cout << "STATE " << state_line(st, inst.variant) << "\n";
  }
}

constexpr std::string_view kDemoInstanceText =
    R"(alt_cost 2
resource_limit 0
horizon 3
variant basic
method M1
  exec 0:2/5 1:1/2 2:1/10
  delib 0:1
  res 0:1
end
method M2
  exec 0:1/2 1:1/10 2:2/5
  delib 0:1
  res 0:1
end
)";

int cmd_demo() {
  const delib::ProblemInstance inst = delib::parse_instance(kDemoInstanceText);
  const delib::PolicyTable table = delib::solve_basic(inst, *inst.horizon);
  std::cout << "# instance\n" << kDemoInstanceText << "# optimal policy\n"
            << delib::to_csv(table);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact optimal deliberation scheduling for generate-and-test "
               "method selection under cost and resource budgets"};
  app.require_subcommand(1);

  Options opt;
  const auto add_instance = [&opt](CLI::App* sub) {
    sub->add_option("instance", opt.instance_path, "instance file")->required();
    sub->add_option("--horizon", opt.horizon,
                    "override the instance horizon (positive integer or 'inf')");
  };

  CLI::App* solve = app.add_subcommand("solve", "compute the optimal policy table");
  add_instance(solve);
  solve->add_option("--out", opt.out, "write the full table to this path");
  solve->add_option("--format", opt.format, "table file format")
      ->check(CLI::IsMember({"csv", "text"}));

  CLI::App* simulate = app.add_subcommand(
      "simulate", "roll out the optimal policy with sampled outcomes");
  add_instance(simulate);
  simulate->add_option("--runs", opt.runs, "number of runs");
  simulate->add_option("--seed", opt.seed, "RNG seed");
  simulate->add_option("--out", opt.out, "write the first run's trace to this path");

  CLI::App* advise = app.add_subcommand(
      "advise", "step through deliberation against observed outcomes");
  add_instance(advise);
  advise->add_option("--script", opt.script,
                     "read outcome lines from this file instead of stdin");

  CLI::App* oracle = app.add_subcommand(
      "oracle-check", "compare the table against brute-force enumeration");
  add_instance(oracle);

  CLI::App* demo = app.add_subcommand("demo", "print the built-in example and its policy");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (solve->parsed()) return cmd_solve(opt);
    if (simulate->parsed()) return cmd_simulate(opt);
    if (advise->parsed()) return cmd_advise(opt);
    if (oracle->parsed()) return cmd_oracle_check(opt);
    if (demo->parsed()) return cmd_demo();
  } catch (const delib::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const delib::UnboundedHorizonError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const delib::GuardExceededError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
