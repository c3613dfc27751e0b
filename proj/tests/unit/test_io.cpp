#include <doctest.h>

#include <cstdio>
#include <string>

#include "starlocal/errors.hpp"
#include "starlocal/io.hpp"
#include "starlocal/states.hpp"

using namespace starlocal;

namespace {

RunMetadata meta() {
  RunMetadata m;
  m.command = "test";
  m.params["alpha"] = 0.75;
  m.has_seed = true;
  m.seed = 42;
  return m;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("state round trip is exact") {
  const DensityMatrix rho = rho_family({0.66, 0.37});
  const nlohmann::json j = state_to_json(rho, meta());
  const DensityMatrix back = state_from_json(j);
  REQUIRE(back.dims() == rho.dims());
  CHECK(back.matrix().max_abs_diff(rho.matrix()) == 0.0);
  CHECK(j["metadata"]["tool"] == "starlocal");
  CHECK(j["metadata"]["seed"] == 42);
  CHECK(j["metadata"]["params"]["alpha"] == 0.75);
  CHECK(j["metadata"].contains("tolerances"));
  CHECK(j["metadata"].contains("version"));
}

TEST_CASE("state loading checks its fields") {
  nlohmann::json j = state_to_json(rho_family({0.5, 0.5}), meta());
  nlohmann::json wrong_type = j;
  wrong_type["type"] = "behavior";
  CHECK_THROWS_AS(state_from_json(wrong_type), ArgumentError);

  nlohmann::json missing = j;
  missing.erase("entries");
  CHECK_THROWS_AS(state_from_json(missing), ArgumentError);

  nlohmann::json short_entries = j;
  short_entries["entries"].erase(0);
  CHECK_THROWS_AS(state_from_json(short_entries), ArgumentError);
}

TEST_CASE("behavior round trip is exact") {
  const Behavior b = Behavior::uniform(Scenario::uniform(2, 3, 2));
  const nlohmann::json j = behavior_to_json(b);
  const Behavior back = behavior_from_json(j);
  CHECK(back.scenario() == b.scenario());
  CHECK(back.table() == b.table());

  nlohmann::json bad_layout = j;
  bad_layout["layout"] = "output-major";
  CHECK_THROWS_AS(behavior_from_json(bad_layout), ArgumentError);
}

TEST_CASE("certificate serialization carries the functional") {
  LPCertificate c;
  c.visibility = 0.5;
  c.feasible_at_1 = false;
  c.has_functional = true;
  c.functional = {1.0, -2.0};
  c.bound = 0.25;
  const nlohmann::json j = certificate_to_json(c, "local", meta());
  CHECK(j["type"] == "certificate");
  CHECK(j["mode"] == "local");
  CHECK(j["visibility"] == 0.5);
  CHECK(j["functional"].size() == 2);
  CHECK(j["bound"] == 0.25);

  LPCertificate feasible;
  feasible.visibility = 1.0;
  feasible.feasible_at_1 = true;
  const nlohmann::json j2 = certificate_to_json(feasible, "local", meta());
  CHECK(j2["functional"].is_null());
  CHECK(j2["bound"].is_null());
}

TEST_CASE("file round trip through disk") {
  const std::string path = "io_test_state.json";
  const DensityMatrix rho = rho_family({0.9, 0.2});
  write_json_file(path, state_to_json(rho, meta()));
  const DensityMatrix back = state_from_json(read_json_file(path));
  CHECK(back.matrix().max_abs_diff(rho.matrix()) == 0.0);
  std::remove(path.c_str());

  CHECK_THROWS_AS(read_json_file("definitely_missing_file.json"), ArgumentError);
}

TEST_CASE("model descriptions load") {
  nlohmann::json j{{"model", "builtin-werner"}, {"validation_samples", 50000}};
  const auto m = lhs_model_from_json(j);
  CHECK(m->arm_state().dims().size() == 2);

  CHECK_THROWS_AS(lhs_model_from_json(nlohmann::json{{"model", "nope"}}), ArgumentError);
  CHECK_THROWS_AS(lhs_model_from_json(nlohmann::json::object()), ArgumentError);
}

TEST_CASE("doubles render with full precision") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(1.0) == "1");
  const double v = 0.12345678901234567;
  CHECK(std::stod(format_double(v)) == v);
}

}  // TEST_SUITE
