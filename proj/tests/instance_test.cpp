#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "delib/parse.hpp"
#include "support/fixtures.hpp"
#include "support/instance_gen.hpp"

using delib::parse_instance;
using delib::ParseError;
using delib::ProblemInstance;
using delib::rat;
using delib::serialize_instance;
using delib::UnboundedHorizonError;
using delib::Variant;

TEST_CASE("demo instance parses", "[instance]") {
  const ProblemInstance inst = testsupport::load_instance("instances/demo.inst");
  CHECK(inst.variant == Variant::Basic);
  CHECK(inst.alt_cost == 2);
  CHECK(inst.resource_limit == 0);
  REQUIRE(inst.horizon.has_value());
  CHECK(*inst.horizon == 3);
  REQUIRE(inst.method_count() == 2);
  CHECK(inst.method(1).name == "M1");
  CHECK(inst.method(1).exec_cost.prob_of(0) == rat(2, 5));
  CHECK(inst.method(1).exec_cost.prob_of(1) == rat(1, 2));
  CHECK(inst.method(1).exec_cost.prob_of(2) == rat(1, 10));
  CHECK(inst.method(2).exec_cost.prob_of(2) == rat(2, 5));
  CHECK(inst.method(2).delib_cost.is_point_mass_at(0));
  CHECK_THROWS_AS(inst.method(3), std::out_of_range);
  CHECK_THROWS_AS(inst.method(0), std::out_of_range);
}

TEST_CASE("variant is inferred from the distributions", "[instance]") {
  const char* base =
      "alt_cost 2\nhorizon 2\n"
      "method M1\n  exec 0:1/2 1:1/2\n  delib {D}\n  res {R}\nend\n";
  auto build = [&](const std::string& delib_pmf, const std::string& res_pmf) {
    std::string text = base;
    text.replace(text.find("{D}"), 3, delib_pmf);
    text.replace(text.find("{R}"), 3, res_pmf);
    return text;
  };
  CHECK(parse_instance(build("0:1", "0:1")).variant == Variant::Basic);
  CHECK(parse_instance(build("1:1", "0:1")).variant == Variant::Cost);
  CHECK(parse_instance("resource_limit 3\n" + build("1:1", "1:1")).variant ==
        Variant::Full);
  // delib/res lines default to the zero point mass
  CHECK(parse_instance("alt_cost 2\nhorizon 2\nmethod M1\n  exec 0:1\nend\n").variant ==
        Variant::Basic);
}

TEST_CASE("explicit variant is validated against the distributions", "[instance]") {
  CHECK_THROWS_AS(
      parse_instance("alt_cost 2\nhorizon 2\nvariant basic\n"
                     "method M1\n  exec 0:1\n  delib 1:1\nend\n"),
      ParseError);
  CHECK_THROWS_AS(
      parse_instance("alt_cost 2\nresource_limit 1\nhorizon 2\nvariant cost\n"
                     "method M1\n  exec 0:1\n  res 1:1\nend\n"),
      ParseError);
  // cost with zero deliberation cost is the embedded special case, allowed
  CHECK(parse_instance("alt_cost 2\nhorizon 2\nvariant cost\n"
                       "method M1\n  exec 0:1\nend\n")
            .variant == Variant::Cost);
}

TEST_CASE("full variant requires a resource_limit line", "[instance]") {
  const char* text =
      "alt_cost 2\nhorizon 2\n"
      "method M1\n  exec 0:1\n  res 1:1\nend\n";
  CHECK_THROWS_WITH(parse_instance(text),
                    Catch::Matchers::ContainsSubstring("resource_limit required"));
  CHECK(parse_instance("resource_limit 0\n" + std::string(text)).variant ==
        Variant::Full);
}

TEST_CASE("parse errors carry source locations", "[instance]") {
  const char* text =
      "alt_cost 2\n"
      "horizon 2\n"
      "method M1\n"
      "  exec 0:1/2 1:1/3\n"
      "end\n";
  try {
    parse_instance(text);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 4);
    CHECK_THAT(e.what(), Catch::Matchers::ContainsSubstring("probabilities sum to 5/6"));
  }
}

TEST_CASE("malformed inputs are rejected", "[instance]") {
  const auto rejects = [](const std::string& text, const std::string& fragment) {
    CHECK_THROWS_WITH(parse_instance(text),
                      Catch::Matchers::ContainsSubstring(fragment));
  };
  rejects("horizon 2\nmethod M1\n  exec 0:1\nend\n", "missing alt_cost");
  rejects("alt_cost 2\nmethod M1\n  exec 0:1\nend\n", "missing horizon");
  rejects("alt_cost 2\nhorizon 2\n", "empty method list");
  rejects("alt_cost 2\nhorizon 2\nmethod M1\n  exec -1:1\nend\n", "negative value");
  rejects("alt_cost 2\nhorizon 2\nmethod M1\n  exec 0:1/2 0:1/2\nend\n",
          "duplicate support value");
  rejects("alt_cost 2\nhorizon 2\nmethod M1\n  exec 0:1\nend\nbogus 3\n",
          "unexpected keyword 'bogus'");
  rejects("alt_cost 2\nhorizon 2\nmethod M1\n  exec 0:1\n", "not closed");
  rejects("alt_cost 2\nhorizon 2\nmethod M1\n  delib 0:1\nend\n", "missing exec");
  rejects("alt_cost 2\nhorizon 2\nmethod M1\n  exec 0:1\nend\n"
          "method M1\n  exec 0:1\nend\n",
          "duplicate method name");
  rejects("alt_cost 2\nhorizon 2\nmethod M1\n  exec 0:1 0\nend\n", "malformed pmf");
  rejects("alt_cost 2\nhorizon 0\nmethod M1\n  exec 0:1\nend\n",
          "horizon must be a positive integer");
  rejects("alt_cost 2\nalt_cost 2\nhorizon 1\nmethod M1\n  exec 0:1\nend\n",
          "duplicate alt_cost");
  rejects("alt_cost -1\nhorizon 1\nmethod M1\n  exec 0:1\nend\n",
          "alt_cost must be nonnegative");
}

TEST_CASE("infinite horizon needs surely-positive deliberation cost", "[instance]") {
  CHECK_THROWS_AS(
      parse_instance("alt_cost 2\nhorizon inf\n"
                     "method M1\n  exec 0:1\n  delib 0:1/2 1:1/2\nend\n"),
      UnboundedHorizonError);
  const ProblemInstance inst = parse_instance(
      "alt_cost 2\nhorizon inf\nmethod M1\n  exec 0:1\n  delib 1:1\nend\n");
  CHECK_FALSE(inst.horizon.has_value());
  CHECK(inst.variant == Variant::Cost);
}

TEST_CASE("comments and spacing are ignored", "[instance]") {
  const ProblemInstance inst = parse_instance(
      "# header\n\n  alt_cost 2   # trailing\n\thorizon 1\n"
      "method M1 # two methods? no\n  exec 0:1\nend\n");
  CHECK(inst.alt_cost == 2);
  CHECK(inst.method_count() == 1);
}

TEST_CASE("serialize then parse is identity", "[instance][property]") {
  const ProblemInstance demo = testsupport::load_instance("instances/demo.inst");
  CHECK(parse_instance(serialize_instance(demo)) == demo);

  std::mt19937_64 rng(415926);
  for (int trial = 0; trial < 60; ++trial) {
    const auto variant = static_cast<Variant>(trial % 3);
    const ProblemInstance inst = testsupport::random_instance(rng, variant);
    const std::string text = serialize_instance(inst);
    CHECK(parse_instance(text) == inst);
    CHECK(serialize_instance(parse_instance(text)) == text);
  }
}

TEST_CASE("sample instances on disk parse", "[instance]") {
  CHECK(testsupport::load_instance("instances/pointmass.inst").variant ==
        Variant::Basic);
  CHECK(testsupport::load_instance("instances/inf_horizon.inst").variant ==
        Variant::Cost);
  CHECK(testsupport::load_instance("instances/spacestation.inst").variant ==
        Variant::Full);
  CHECK_THROWS_AS(testsupport::load_instance("instances/zero_delib_inf.inst"),
                  UnboundedHorizonError);
}
