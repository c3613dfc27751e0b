#include <doctest.h>

#include <cmath>

#include "starlocal/correlations.hpp"
#include "starlocal/errors.hpp"
#include "starlocal/states.hpp"

using namespace starlocal;

namespace {

MeasurementAssignment chsh_assignment() {
  const double r = 1.0 / std::sqrt(2.0);
  return assignment_from_bloch(
      {{{0.0, 0.0, 1.0}, {1.0, 0.0, 0.0}}, {{r, 0.0, r}, {-r, 0.0, r}}});
}

}  // namespace

TEST_SUITE("correlations") {

TEST_CASE("scenario bookkeeping") {
  const Scenario s = Scenario::uniform(3, 2, 4);
  CHECK(s.joint_inputs() == 8);
  CHECK(s.joint_outputs() == 64);
  CHECK(s.cells() == 512);
  Scenario bad = s;
  bad.inputs[1] = 0;
  CHECK_THROWS_AS(validate_scenario(bad), ArgumentError);
}

TEST_CASE("projective qubit pairs") {
  const auto pz = projective_qubit({0.0, 0.0, 1.0});
  CHECK(pz[0](0, 0).real() == doctest::Approx(1.0));
  CHECK(pz[1](1, 1).real() == doctest::Approx(1.0));
  const auto px = projective_qubit({1.0, 0.0, 0.0});
  CHECK(px[0](0, 1).real() == doctest::Approx(0.5));
  const auto sum = px[0] + px[1];
  CHECK(sum.max_abs_diff(ComplexMatrix::identity(2)) < 1e-15);
  CHECK_THROWS_AS(projective_qubit({0.0, 0.0, 0.5}), ArgumentError);
}

TEST_CASE("povm validation") {
  const Scenario s = Scenario::uniform(1, 1, 2);
  // Incomplete: two copies of the same projector.
  const auto pz = projective_qubit({0.0, 0.0, 1.0});
  CHECK_THROWS_AS(MeasurementAssignment(s, {{{pz[0], pz[0]}}}), ArgumentError);
  // Negative "effect".
  ComplexMatrix neg = ComplexMatrix::identity(2) * cplx(2.0, 0.0);
  ComplexMatrix comp = ComplexMatrix::identity(2) * cplx(-1.0, 0.0);
  CHECK_THROWS_AS(MeasurementAssignment(s, {{{neg, comp}}}), ArgumentError);
  // A genuine POVM (not projective) passes.
  ComplexMatrix half = ComplexMatrix::identity(2) * cplx(0.5, 0.0);
  CHECK_NOTHROW(MeasurementAssignment(s, {{{half, half}}}));
}

TEST_CASE("singlet-family behavior reaches the quantum CHSH value") {
  const DensityMatrix phi = rho_family({1.0, 0.78539816339744831});
  const Behavior b = quantum_behavior(phi, chsh_assignment());
  const double s = correlator(b, 0) + correlator(b, 1) + correlator(b, 2) - correlator(b, 3);
  CHECK(s == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("behavior for a product state factorizes") {
  // |0><0| (x) |+><+| with z/x measurements on both sides.
  const Ket zero = Ket::basis(2, 0);
  std::vector<cplx> pa{cplx(1.0 / std::sqrt(2.0), 0.0), cplx(1.0 / std::sqrt(2.0), 0.0)};
  const ComplexMatrix joint = kron(zero.outer(), Ket(pa).outer());
  const DensityMatrix rho(joint, {2, 2});
  const MeasurementAssignment m = assignment_from_bloch(
      {{{0.0, 0.0, 1.0}, {1.0, 0.0, 0.0}}, {{0.0, 0.0, 1.0}, {1.0, 0.0, 0.0}}});
  const Behavior b = quantum_behavior(rho, m);
  // x = (z, z): party 0 answers 0 surely, party 1 is 50/50.
  CHECK(b.prob(0, 0) == doctest::Approx(0.5));
  CHECK(b.prob(0, 1) == doctest::Approx(0.5));
  CHECK(std::abs(b.prob(0, 2)) < 1e-14);
  // x = (z, x): both deterministic.
  CHECK(b.prob(1, 0) == doctest::Approx(1.0));
  // x = (x, x): party 0 is 50/50, party 1 answers 0 surely.
  CHECK(b.prob(3, 0) == doctest::Approx(0.5));
  CHECK(b.prob(3, 2) == doctest::Approx(0.5));
  CHECK(std::abs(b.prob(3, 1)) < 1e-14);
}

TEST_CASE("quantum behaviors are normalized and non-signalling") {
  const FamilyParams p{0.8, 0.6};
  const StarState star =
      star_network_state(NetworkSpec::uniform(2, rho_family(p), ghz_projector_map(2)));
  const MeasurementAssignment m = assignment_from_bloch(random_bloch_directions(2, 3, 17));
  const Behavior b = quantum_behavior(star.state, m);  // constructor checks rows sum to 1
  const Scenario& s = b.scenario();
  // Marginal of party 0 must not depend on party 1's setting.
  for (std::size_t x0 = 0; x0 < 3; ++x0) {
    for (std::size_t a0 = 0; a0 < 2; ++a0) {
      double ref = 0.0;
      for (std::size_t x1 = 0; x1 < 3; ++x1) {
        double marg = 0.0;
        for (std::size_t a1 = 0; a1 < 2; ++a1) marg += b.prob(x0 * 3 + x1, a0 * 2 + a1);
        if (x1 == 0)
          ref = marg;
        else
          CHECK(marg == doctest::Approx(ref).epsilon(1e-11));
      }
      (void)s;
    }
  }
}

TEST_CASE("behavior is linear in the state") {
  const MeasurementAssignment m = chsh_assignment();
  const DensityMatrix r1 = rho_family({0.9, 0.5});
  const DensityMatrix r2 = rho_family({0.2, 0.1});
  const ComplexMatrix mix = r1.matrix() * cplx(0.3, 0.0) + r2.matrix() * cplx(0.7, 0.0);
  const Behavior b1 = quantum_behavior(r1, m);
  const Behavior b2 = quantum_behavior(r2, m);
  const Behavior bm = quantum_behavior(DensityMatrix(mix, {2, 2}), m);
  for (std::size_t c = 0; c < bm.table().size(); ++c)
    CHECK(bm.table()[c] == doctest::Approx(0.3 * b1.table()[c] + 0.7 * b2.table()[c])
                               .epsilon(1e-12));
}

TEST_CASE("serial and parallel behavior evaluation are bit-identical") {
  const FamilyParams p{0.75, 0.4};
  const StarState star =
      star_network_state(NetworkSpec::uniform(3, rho_family(p), ghz_projector_map(3)));
  const MeasurementAssignment m = assignment_from_bloch(random_bloch_directions(3, 4, 23));
  const Behavior bs = quantum_behavior(star.state, m, ExecPolicy::serial);
  const Behavior bp = quantum_behavior(star.state, m, ExecPolicy::parallel);
  REQUIRE(bs.table().size() == bp.table().size());
  for (std::size_t c = 0; c < bs.table().size(); ++c) CHECK(bs.table()[c] == bp.table()[c]);
}

TEST_CASE("behavior validation") {
  const Scenario s = Scenario::uniform(2, 2, 2);
  std::vector<double> bad(s.cells(), 1.0 / 4.0);
  bad[0] = 0.5;  // breaks normalization of the first setting
  CHECK_THROWS_AS(Behavior(s, std::move(bad)), ArgumentError);
  std::vector<double> neg(s.cells(), 1.0 / 4.0);
  neg[0] = -0.1;
  neg[1] = 0.6;
  CHECK_THROWS_AS(Behavior(s, std::move(neg)), ArgumentError);
  CHECK_NOTHROW(Behavior::uniform(s));
}

TEST_CASE("correlator needs binary outcomes") {
  const Scenario s = Scenario::uniform(1, 1, 3);
  std::vector<double> t{0.2, 0.3, 0.5};
  const Behavior b(s, std::move(t));
  CHECK_THROWS_AS(correlator(b, 0), ArgumentError);
}

TEST_CASE("random directions depend only on seed and party") {
  const auto d1 = random_bloch_directions(3, 5, 9);
  const auto d2 = random_bloch_directions(3, 5, 9);
  const auto d3 = random_bloch_directions(3, 5, 10);
  CHECK(d1 == d2);
  CHECK(d1 != d3);
  // Growing the party count must not disturb earlier parties.
  const auto d4 = random_bloch_directions(2, 5, 9);
  CHECK(d4[0] == d1[0]);
  CHECK(d4[1] == d1[1]);
}

}  // TEST_SUITE
