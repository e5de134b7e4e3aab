// Instance file parsing and serialization.
//
// Format (UTF-8 text, '#' starts a comment running to end of line):
//
//   alt_cost 2
//   resource_limit 10        # optional; default 0; required for variant full
//   horizon 3                # positive integer, or the word "inf"
//   variant basic            # optional: basic | cost | full
//   method M1
//     exec  0:2/5 1:1/2 2:1/10
//     delib 0:1
//     res   0:1
//   end
//
// Each pmf entry is value:probability with the probability an integer or
// num/den fraction. delib/res lines may be omitted and default to 0:1.
#pragma once

#include <charconv>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "delib/errors.hpp"
#include "delib/instance.hpp"

namespace delib {
namespace detail {

struct Token {
  std::string text;
  int column = 0;  // 1-based
};

struct SourceLine {
  int number = 0;  // 1-based
  std::vector<Token> tokens;
};

inline std::vector<SourceLine> tokenize_instance(std::string_view text) {
  std::vector<SourceLine> lines;
  int number = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    const size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    ++number;
    if (const size_t hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    SourceLine out{number, {}};
    size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r'))
        ++i;
      const size_t start = i;
      while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r')
        ++i;
      if (i > start)
        out.tokens.push_back(
            Token{std::string(line.substr(start, i - start)), static_cast<int>(start) + 1});
    }
    if (!out.tokens.empty()) lines.push_back(std::move(out));
    if (eol == std::string_view::npos) break;
    pos = eol + 1;
  }
  return lines;
}

inline long long parse_integer(const Token& tok, int line, const char* what) {
  long long value = 0;
  const char* first = tok.text.data();
  const char* last = first + tok.text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last)
    throw ParseError(std::string(what) + " expects an integer, got '" + tok.text + "'",
                     line, tok.column);
  return value;
}

inline PmfEntry parse_pmf_entry(const Token& tok, int line) {
  const size_t colon = tok.text.find(':');
  if (colon == std::string::npos || tok.text.find(':', colon + 1) != std::string::npos)
    throw ParseError("malformed pmf entry '" + tok.text +
                     "' (expected value:probability)",
                     line, tok.column);
  Token value_tok{tok.text.substr(0, colon), tok.column};
  const long long value = parse_integer(value_tok, line, "pmf value");
  if (value < 0)
    throw ParseError("negative value " + std::to_string(value) + " in pmf entry",
                     line, tok.column);
  Rational prob;
  try {
    prob = parse_rational(tok.text.substr(colon + 1));
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what(), line, tok.column);
  }
  return PmfEntry{static_cast<int>(value), prob};
}

inline DiscreteDistribution parse_pmf(const SourceLine& line) {
  std::vector<PmfEntry> entries;
  for (size_t i = 1; i < line.tokens.size(); ++i)
    entries.push_back(parse_pmf_entry(line.tokens[i], line.number));
  if (entries.empty())
    throw ParseError("distribution '" + line.tokens[0].text + "' has no entries",
                     line.number, line.tokens[0].column);
  try {
    return DiscreteDistribution(std::move(entries));
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what(), line.number, line.tokens[1].column);
  }
}

inline std::string pmf_string(const DiscreteDistribution& d) {
  std::string out;
  for (const PmfEntry& e : d.support()) {
    if (!out.empty()) out += ' ';
    out += std::to_string(e.value);
    out += ':';
    out += e.prob.get_num().get_str();
    if (e.prob.get_den() != 1) {
      out += '/';
      out += e.prob.get_den().get_str();
    }
  }
  return out;
}

}  // namespace detail

inline ProblemInstance parse_instance(std::string_view text) {
  const auto lines = detail::tokenize_instance(text);

  std::optional<int> alt_cost;
  std::optional<int> resource_limit;
  std::optional<std::optional<int>> horizon;  // outer: seen; inner: finite K
  std::optional<Variant> declared_variant;
  std::vector<MethodSpec> methods;

  size_t li = 0;
  auto expect_tokens = [](const detail::SourceLine& line, size_t count) {
    if (line.tokens.size() != count)
      throw ParseError("expected " + std::to_string(count - 1) +
                       " argument(s) after '" + line.tokens[0].text + "'",
                       line.number, line.tokens[0].column);
  };

  while (li < lines.size()) {
    const detail::SourceLine& line = lines[li];
    const std::string& keyword = line.tokens[0].text;
    if (keyword == "alt_cost") {
      expect_tokens(line, 2);
      if (alt_cost) throw ParseError("duplicate alt_cost", line.number, line.tokens[0].column);
      const long long v = detail::parse_integer(line.tokens[1], line.number, "alt_cost");
      if (v < 0) throw ParseError("alt_cost must be nonnegative", line.number, line.tokens[1].column);
      alt_cost = static_cast<int>(v);
      ++li;
    } else if (keyword == "resource_limit") {
      expect_tokens(line, 2);
      if (resource_limit)
        throw ParseError("duplicate resource_limit", line.number, line.tokens[0].column);
      const long long v = detail::parse_integer(line.tokens[1], line.number, "resource_limit");
      if (v < 0)
        throw ParseError("resource_limit must be nonnegative", line.number, line.tokens[1].column);
      resource_limit = static_cast<int>(v);
      ++li;
    } else if (keyword == "horizon") {
      expect_tokens(line, 2);
      if (horizon) throw ParseError("duplicate horizon", line.number, line.tokens[0].column);
      if (line.tokens[1].text == "inf") {
        horizon = std::optional<int>{};
      } else {
        const long long v = detail::parse_integer(line.tokens[1], line.number, "horizon");
        if (v < 1)
          throw ParseError("horizon must be a positive integer or 'inf'",
                           line.number, line.tokens[1].column);
        horizon = std::optional<int>{static_cast<int>(v)};
      }
      ++li;
    } else if (keyword == "variant") {
      expect_tokens(line, 2);
      if (declared_variant)
        throw ParseError("duplicate variant", line.number, line.tokens[0].column);
      const std::string& name = line.tokens[1].text;
      if (name == "basic") declared_variant = Variant::Basic;
      else if (name == "cost") declared_variant = Variant::Cost;
      else if (name == "full") declared_variant = Variant::Full;
      else
        throw ParseError("unknown variant '" + name + "'", line.number,
                         line.tokens[1].column);
      ++li;
    } else if (keyword == "method") {
      expect_tokens(line, 2);
      const std::string name = line.tokens[1].text;
      for (const MethodSpec& m : methods)
        if (m.name == name)
          throw ParseError("duplicate method name '" + name + "'", line.number,
                           line.tokens[1].column);
      ++li;
      std::optional<DiscreteDistribution> exec, delib, res;
      bool closed = false;
      while (li < lines.size()) {
        const detail::SourceLine& inner = lines[li];
        const std::string& field = inner.tokens[0].text;
        if (field == "end") {
          expect_tokens(inner, 1);
          closed = true;
          ++li;
          break;
        }
        if (field == "exec" || field == "delib" || field == "res") {
          auto& slot = field == "exec" ? exec : field == "delib" ? delib : res;
          if (slot)
            throw ParseError("duplicate '" + field + "' in method '" + name + "'",
                             inner.number, inner.tokens[0].column);
          slot = detail::parse_pmf(inner);
          ++li;
        } else {
          throw ParseError("unexpected keyword '" + field + "' inside method '" +
                           name + "' (expected exec, delib, res, or end)",
                           inner.number, inner.tokens[0].column);
        }
      }
      if (!closed)
        throw ParseError("method '" + name + "' not closed with 'end'",
                         line.number, line.tokens[0].column);
      if (!exec)
        throw ParseError("method '" + name + "' missing exec distribution",
                         line.number, line.tokens[0].column);
      MethodSpec m{static_cast<int>(methods.size()) + 1, name, std::move(*exec),
                   delib ? std::move(*delib) : DiscreteDistribution::point_mass(0),
                   res ? std::move(*res) : DiscreteDistribution::point_mass(0)};
      methods.push_back(std::move(m));
    } else {
      throw ParseError("unexpected keyword '" + keyword + "'", line.number,
                       line.tokens[0].column);
    }
  }

  if (!alt_cost) throw ParseError("missing alt_cost");
  if (!horizon) throw ParseError("missing horizon");
  if (methods.empty()) throw ParseError("empty method list");

  ProblemInstance inst;
  inst.methods = std::move(methods);
  inst.alt_cost = *alt_cost;
  inst.resource_limit = resource_limit.value_or(0);
  inst.horizon = *horizon;
  const Variant inferred = infer_variant(inst.methods);
  inst.variant = declared_variant.value_or(inferred);
  if (inst.variant == Variant::Full && !resource_limit)
    throw ParseError("resource_limit required for variant full");
  validate_instance(inst);
  return inst;
}

// Canonical text form; parse(serialize(x)) == x.
inline std::string serialize_instance(const ProblemInstance& inst) {
  std::string out;
  out += "alt_cost " + std::to_string(inst.alt_cost) + "\n";
  out += "resource_limit " + std::to_string(inst.resource_limit) + "\n";
  out += "horizon " + (inst.horizon ? std::to_string(*inst.horizon) : std::string("inf")) + "\n";
  out += "variant " + to_string(inst.variant) + "\n";
  for (const MethodSpec& m : inst.methods) {
    out += "method " + m.name + "\n";
    out += "  exec " + detail::pmf_string(m.exec_cost) + "\n";
    out += "  delib " + detail::pmf_string(m.delib_cost) + "\n";
    out += "  res " + detail::pmf_string(m.resource) + "\n";
    out += "end\n";
  }
  return out;
}

}  // namespace delib
