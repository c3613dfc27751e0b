#include <doctest.h>

#include <cmath>

#include "starlocal/errors.hpp"
#include "starlocal/locality.hpp"
#include "starlocal/states.hpp"

using namespace starlocal;

namespace {

constexpr double kPi4 = 0.78539816339744831;

Behavior chsh_quantum_behavior() {
  const double r = 1.0 / std::sqrt(2.0);
  const MeasurementAssignment m = assignment_from_bloch(
      {{{0.0, 0.0, 1.0}, {1.0, 0.0, 0.0}}, {{r, 0.0, r}, {-r, 0.0, r}}});
  return quantum_behavior(rho_family({1.0, kPi4}), m);
}

Behavior ghz_svetlichny_behavior() {
  const DensityMatrix ghz = DensityMatrix::pure(ghz_ket(3), {2, 2, 2});
  return quantum_behavior(ghz, assignment_from_bloch(ghz_svetlichny_directions()));
}

}  // namespace

TEST_SUITE("locality") {

TEST_CASE("vertex enumeration counts") {
  CHECK(enumerate_vertices(Scenario::uniform(2, 2, 2), ModelClass::full_local).vertices.size() ==
        16);
  CHECK(enumerate_vertices(Scenario::uniform(3, 2, 2), ModelClass::full_local).vertices.size() ==
        64);
  CHECK(enumerate_vertices(Scenario::uniform(3, 2, 2), ModelClass::hybrid).vertices.size() ==
        3072);
  // Two parties: every bipartition is the trivial one, so the hybrid
  // set coincides with the local one.
  CHECK(enumerate_vertices(Scenario::uniform(2, 2, 2), ModelClass::hybrid).vertices.size() == 16);
}

TEST_CASE("vertices are deterministic behaviors") {
  const VertexSet vs = enumerate_vertices(Scenario::uniform(2, 3, 2), ModelClass::full_local);
  const Scenario& s = vs.scenario;
  for (const auto& v : vs.vertices) {
    REQUIRE(v.size() == s.cells());
    for (double p : v) CHECK((p == 0.0 || p == 1.0));
    for (std::size_t x = 0; x < s.joint_inputs(); ++x) {
      double sum = 0.0;
      for (std::size_t a = 0; a < s.joint_outputs(); ++a) sum += v[x * s.joint_outputs() + a];
      CHECK(sum == 1.0);
    }
  }
}

TEST_CASE("vertex enumeration refuses absurd scenarios") {
  CHECK_THROWS_AS(enumerate_vertices(Scenario::uniform(10, 2, 2), ModelClass::full_local),
                  SizeError);
}

TEST_CASE("every local vertex certifies as local") {
  const VertexSet vs = enumerate_vertices(Scenario::uniform(2, 2, 2), ModelClass::full_local);
  for (const auto& v : vs.vertices) {
    const LPCertificate c = certify(Behavior(vs.scenario, v), vs);
    CHECK(c.feasible_at_1);
    CHECK(c.visibility >= 1.0 - 1e-9);
  }
}

TEST_CASE("uniform behavior is deep inside") {
  const LPCertificate c =
      certify(Behavior::uniform(Scenario::uniform(2, 2, 2)), ModelClass::full_local);
  CHECK(c.feasible_at_1);
}

TEST_CASE("quantum chsh behavior has visibility 1/sqrt(2)") {
  const Behavior b = chsh_quantum_behavior();
  const LPCertificate c = certify(b, ModelClass::full_local);
  CHECK_FALSE(c.feasible_at_1);
  CHECK(c.visibility == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-9));
  REQUIRE(c.has_functional);
  // The returned functional must separate: value above the validated
  // vertex bound.
  double fp = 0.0;
  for (std::size_t i = 0; i < b.table().size(); ++i) fp += c.functional[i] * b.table()[i];
  CHECK(fp > c.bound + 1e-6);
  const VertexSet vs = enumerate_vertices(b.scenario(), ModelClass::full_local);
  CHECK(max_over_vertices(vs, c.functional) <= c.bound + 1e-9);
}

TEST_CASE("visibility is invariant under relabelings") {
  const Behavior b = chsh_quantum_behavior();
  const double ref = certify(b, ModelClass::full_local).visibility;

  // Swap the two parties.
  const Scenario& s = b.scenario();
  std::vector<double> swapped(s.cells());
  for (std::size_t x0 = 0; x0 < 2; ++x0)
    for (std::size_t x1 = 0; x1 < 2; ++x1)
      for (std::size_t a0 = 0; a0 < 2; ++a0)
        for (std::size_t a1 = 0; a1 < 2; ++a1)
          swapped[(x1 * 2 + x0) * 4 + (a1 * 2 + a0)] = b.prob(x0 * 2 + x1, a0 * 2 + a1);
  CHECK(certify(Behavior(s, std::move(swapped)), ModelClass::full_local).visibility ==
        doctest::Approx(ref).epsilon(1e-9));

  // Flip the second party's outcome.
  std::vector<double> flipped(s.cells());
  for (std::size_t x = 0; x < 4; ++x)
    for (std::size_t a = 0; a < 4; ++a) flipped[x * 4 + (a ^ 1)] = b.prob(x, a);
  CHECK(certify(Behavior(s, std::move(flipped)), ModelClass::full_local).visibility ==
        doctest::Approx(ref).epsilon(1e-9));
}

TEST_CASE("hybrid polytope contains the local one") {
  const Behavior b = ghz_svetlichny_behavior();
  const double vis_local = certify(b, ModelClass::full_local).visibility;
  const double vis_hybrid = certify(b, ModelClass::hybrid).visibility;
  CHECK(vis_local <= vis_hybrid + 1e-12);
  CHECK(vis_hybrid == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("hybrid bound of the three-party functional") {
  CHECK(svetlichny_hybrid_bound() == 4.0);  // exact by enumeration
}

TEST_CASE("ghz value of the three-party functional") {
  CHECK(svetlichny_value(ghz_svetlichny_behavior()) ==
        doctest::Approx(4.0 * std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("alternating optimization finds the ghz optimum") {
  const DensityMatrix ghz = DensityMatrix::pure(ghz_ket(3), {2, 2, 2});
  const SvetlichnyOptimum opt = optimize_svetlichny(ghz, 2, 5);
  CHECK(opt.value == doctest::Approx(4.0 * std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("alternating optimization respects the bound on product states") {
  const DensityMatrix zzz = DensityMatrix::pure(Ket::basis(8, 0), {2, 2, 2});
  const SvetlichnyOptimum opt = optimize_svetlichny(zzz, 3, 11);
  CHECK(opt.value <= 4.0 + 1e-9);
}

TEST_CASE("filtered network state at alpha 0.99 clears the hybrid bound") {
  const DensityMatrix filt = analytic_filtered_state(3, {0.99, 0.3}).to_density();
  const SvetlichnyOptimum opt = optimize_svetlichny(filt);
  CHECK(opt.value == doctest::Approx(5.488840021428208).epsilon(1e-9));
  CHECK(opt.value > svetlichny_hybrid_bound());
}

TEST_CASE("vertex maximization is identical under both policies") {
  const VertexSet vs = enumerate_vertices(Scenario::uniform(3, 2, 2), ModelClass::hybrid);
  std::vector<double> f(vs.scenario.cells());
  for (std::size_t c = 0; c < f.size(); ++c) f[c] = std::cos(1.7 * static_cast<double>(c));
  CHECK(max_over_vertices(vs, f, ExecPolicy::serial) ==
        max_over_vertices(vs, f, ExecPolicy::parallel));
}

}  // TEST_SUITE
