#include <doctest.h>

#include <cmath>

#include "starlocal/errors.hpp"
#include "starlocal/gme.hpp"

using namespace starlocal;

namespace {
constexpr double kPi4 = 0.78539816339744831;
}

TEST_SUITE("gme") {

TEST_CASE("margin constant at n=2, alpha=3/4") {
  // alpha^2 + ((1+alpha)/2)^2 + ((1-alpha)/2)^2 = 9/16 + 49/64 + 1/64 = 43/32.
  CHECK(gme_margin(2, 0.75) == doctest::Approx(11.0 / 32.0).epsilon(1e-15));
}

TEST_CASE("margin grows along alpha = 1 - 1/n^2") {
  for (std::size_t n = 3; n <= 8; ++n) {
    const double a = 1.0 - 1.0 / static_cast<double>(n * n);
    // Bernoulli lower bound used in the chain of estimates.
    CHECK(gme_margin(n, a) > 2.0 * (1.0 - 1.0 / static_cast<double>(n)) - 1.0);
  }
}

TEST_CASE("ghz state scores a full unit") {
  const DensityMatrix ghz = DensityMatrix::pure(ghz_ket(4), {2, 2, 2, 2});
  const GMEReport r = gme_score(ghz);
  CHECK(r.score == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.certified);
  CHECK(r.witness_index == 1);
}

TEST_CASE("maximally mixed state is not certified") {
  const DensityMatrix mixed =
      DensityMatrix(ComplexMatrix::identity(8) * cplx(0.125, 0.0), {2, 2, 2});
  const GMEReport r = gme_score(mixed);
  CHECK(r.score < 0.0);
  CHECK_FALSE(r.certified);
}

TEST_CASE("product state scores nonpositive") {
  // |+>^3: every antidiagonal pair has |z| = sqrt(c d), so the cross
  // terms win.
  std::vector<cplx> amp(8, cplx(1.0 / std::sqrt(8.0), 0.0));
  const DensityMatrix plus = DensityMatrix::pure(Ket(amp), {2, 2, 2});
  CHECK(gme_score(plus).score <= 1e-12);
}

TEST_CASE("network state score matches the closed form") {
  for (std::size_t n : {2, 3, 5}) {
    for (double a : {0.4, 0.75, 0.97}) {
      for (double t : {0.1, kPi4}) {
        const FamilyParams p{a, t};
        const GMEReport r = gme_score(x_matrix_state(n, p).to_density());
        CHECK(std::abs(r.score - analytic_concurrence(n, p)) < 1e-12);
      }
    }
  }
}

TEST_CASE("closed form at the frozen reference point") {
  const double t = saturating_theta(0.75);
  CHECK(analytic_concurrence(2, {0.75, t}) ==
        doctest::Approx(0.0116243961352657).epsilon(1e-10));
}

TEST_CASE("score rejects non-qubit input, projection handles it") {
  const FamilyParams p{0.9, 0.5};
  const DensityMatrix qutrit = rho_gme_qutrit(3, p);
  CHECK_THROWS_AS(gme_score(qutrit), ArgumentError);
  const GMEReport via = gme_score_via_projection(qutrit);
  const GMEReport direct = gme_score(x_matrix_state(3, p).to_density());
  CHECK(via.score == doctest::Approx(direct.score).epsilon(1e-12));
}

TEST_CASE("witness index prefers the smallest maximizer") {
  // Symmetric X state: every pair ties; index must be 1.
  const XMatrixState xs(2, {0.25, 0.25, 0.25, 0.25}, cplx(0.25, 0.0));
  const GMEReport r = gme_score(xs.to_density());
  CHECK(r.witness_index == 1);
  CHECK(r.score == doctest::Approx(0.0).epsilon(1e-14));
}

}  // TEST_SUITE
