#include "starlocal/gme.hpp"

#include <cmath>
#include <vector>

#include "starlocal/errors.hpp"

namespace starlocal {

GMEReport gme_score(const DensityMatrix& rho) {
  for (std::size_t d : rho.dims())
    if (d != 2) throw ArgumentError("gme_score: defined for qubit states only");
  const std::size_t dim = rho.side();
  const std::size_t half = dim / 2;
  const ComplexMatrix& m = rho.matrix();

  std::vector<double> root(half);  // sqrt(c_i d_i)
  std::vector<double> zabs(half);
  double root_sum = 0.0;
  for (std::size_t i = 1; i <= half; ++i) {
    const double c = std::max(0.0, m(i - 1, i - 1).real());
    const double d = std::max(0.0, m(dim - i, dim - i).real());
    root[i - 1] = std::sqrt(c * d);
    zabs[i - 1] = std::abs(m(i - 1, dim - i));
    root_sum += root[i - 1];
  }

  GMEReport rep;
  bool first = true;
  for (std::size_t i = 1; i <= half; ++i) {
    const double w = root_sum - root[i - 1];
    const double score = 2.0 * (zabs[i - 1] - w);
    if (first || score > rep.score) {
      rep.score = score;
      rep.witness_index = i;
      rep.z_abs = zabs[i - 1];
      rep.w_i = w;
      first = false;
    }
  }
  rep.certified = rep.score > 0.0;
  return rep;
}

double analytic_concurrence(std::size_t n, const FamilyParams& p) {
  if (n < 2) throw ArgumentError("analytic_concurrence: need at least 2 qubits");
  validate_family(p);
  const double nn = static_cast<double>(n);
  const double s2t = std::sin(2.0 * p.theta);
  const double ac2 = p.alpha * std::cos(2.0 * p.theta);
  const double denom = std::pow(1.0 + ac2, nn) + std::pow(1.0 - ac2, nn);
  return 2.0 * std::pow(s2t, nn) * gme_margin(n, p.alpha) / denom;
}

double gme_margin(std::size_t n, double alpha) {
  if (n < 2) throw ArgumentError("gme_margin: need at least 2 qubits");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ArgumentError("gme_margin: alpha outside [0, 1]");
  const double nn = static_cast<double>(n);
  return std::pow(alpha, nn) + std::pow(0.5 * (1.0 + alpha), nn) +
         std::pow(0.5 * (1.0 - alpha), nn) - 1.0;
}

GMEReport gme_score_via_projection(const DensityMatrix& rho) {
  return gme_score(project_qubit_subspace(rho).state);
}

}  // namespace starlocal
