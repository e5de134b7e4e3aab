// Problem instances: a set of solution methods plus the deliberation budget.
#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "delib/distribution.hpp"
#include "delib/errors.hpp"

namespace delib {

// basic: free deliberation, no resource. cost: deliberation costs but
// consumes no resource. full: deliberation costs and consumes resource.
enum class Variant { Basic, Cost, Full };

inline std::string to_string(Variant v) {
  switch (v) {
    case Variant::Basic: return "basic";
    case Variant::Cost: return "cost";
    case Variant::Full: return "full";
  }
  return "?";
}

// One solution method: pmf of the execution cost of the solution it produces,
// and pmfs of the cost and resource consumed while estimating it.
struct MethodSpec {
  int id = 0;  // 1-based index within the instance
  std::string name;
  DiscreteDistribution exec_cost;
  DiscreteDistribution delib_cost;
  DiscreteDistribution resource;

  friend bool operator==(const MethodSpec& a, const MethodSpec& b) {
    return a.id == b.id && a.name == b.name && a.exec_cost == b.exec_cost &&
           a.delib_cost == b.delib_cost && a.resource == b.resource;
  }
};

struct ProblemInstance {
  std::vector<MethodSpec> methods;
  int alt_cost = 0;
  int resource_limit = 0;
  std::optional<int> horizon;  // nullopt: no predefined step bound
  Variant variant = Variant::Basic;

  int method_count() const { return static_cast<int>(methods.size()); }

  const MethodSpec& method(int id) const {
    if (id < 1 || id > method_count())
      throw std::out_of_range("method id " + std::to_string(id) +
                              " outside 1.." + std::to_string(method_count()));
    return methods[static_cast<size_t>(id) - 1];
  }

  friend bool operator==(const ProblemInstance& a, const ProblemInstance& b) {
    return a.methods == b.methods && a.alt_cost == b.alt_cost &&
           a.resource_limit == b.resource_limit && a.horizon == b.horizon &&
           a.variant == b.variant;
  }
};

inline Variant infer_variant(const std::vector<MethodSpec>& methods) {
  bool delib_free = true;
  bool resource_free = true;
  for (const MethodSpec& m : methods) {
    delib_free = delib_free && m.delib_cost.is_point_mass_at(0);
    resource_free = resource_free && m.resource.is_point_mass_at(0);
  }
  if (delib_free && resource_free) return Variant::Basic;
  if (resource_free) return Variant::Cost;
  return Variant::Full;
}

// Enforces every structural invariant. Throws ParseError for a malformed
// instance and UnboundedHorizonError for an unbounded-horizon one.
inline void validate_instance(const ProblemInstance& inst) {
  if (inst.methods.empty()) throw ParseError("instance has no methods");
  if (inst.alt_cost < 0) throw ParseError("alt_cost must be nonnegative");
  if (inst.resource_limit < 0)
    throw ParseError("resource_limit must be nonnegative");
  if (inst.horizon && *inst.horizon < 1)
    throw ParseError("horizon must be a positive integer or 'inf'");
  for (int i = 0; i < inst.method_count(); ++i) {
    if (inst.methods[static_cast<size_t>(i)].id != i + 1)
      throw ParseError("method ids must be 1..M in declaration order");
  }
  for (const MethodSpec& m : inst.methods) {
    switch (inst.variant) {
      case Variant::Basic:
        if (!m.delib_cost.is_point_mass_at(0) || !m.resource.is_point_mass_at(0))
          throw ParseError("variant basic requires method '" + m.name +
                           "' to have zero deliberation cost and resource");
        break;
      case Variant::Cost:
        if (!m.resource.is_point_mass_at(0))
          throw ParseError("variant cost requires method '" + m.name +
                           "' to consume no resource");
        break;
      case Variant::Full:
        break;
    }
  }
  if (!inst.horizon) {
    for (const MethodSpec& m : inst.methods) {
      if (m.delib_cost.min_value() == 0)
        throw UnboundedHorizonError("unbounded horizon: method '" + m.name +
                                    "' can deliberate at zero cost");
    }
  }
}

}  // namespace delib
