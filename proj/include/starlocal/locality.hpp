#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "starlocal/correlations.hpp"
#include "starlocal/exec.hpp"

namespace starlocal {

// The two hidden-variable model classes certified here.  full_local:
// every party is separated.  hybrid: the parties split into two groups;
// within a group the joint response is unrestricted (may signal), the
// groups themselves share only the hidden variable.  Behaviors outside
// the hybrid set are genuinely multipartite nonlocal.
enum class ModelClass { full_local, hybrid };

struct VertexSet {
  Scenario scenario;
  ModelClass model_class = ModelClass::full_local;
  std::vector<std::vector<double>> vertices;  // each a 0/1 behavior table
};

// Deterministic extreme points.  full_local: product strategies, count
// prod_i outputs_i^inputs_i.  hybrid: for each unordered bipartition,
// joint-deterministic strategies per group (signalling within the group
// allowed), concatenated over bipartitions.
VertexSet enumerate_vertices(const Scenario& s, ModelClass model_class);

struct LPCertificate {
  double visibility = 0.0;    // max v with v p + (1-v) uniform inside
  bool feasible_at_1 = false;
  bool has_functional = false;
  std::vector<double> functional;  // over (x, a) cells, same layout as Behavior
  double bound = 0.0;              // max of functional over the vertex set
  std::size_t lp_pivots = 0;
};

// Critical visibility of `b` against the polytope spanned by `vs` via
// one LP; when the behavior itself lies outside (visibility < 1) the
// separating Bell functional is extracted from the duals and validated
// against every vertex before being returned.
LPCertificate certify(const Behavior& b, const VertexSet& vs,
                      ExecPolicy policy = ExecPolicy::parallel);
LPCertificate certify(const Behavior& b, ModelClass model_class,
                      ExecPolicy policy = ExecPolicy::parallel);

// max over vertices of sum_cell functional[cell] * vertex[cell].
double max_over_vertices(const VertexSet& vs, const std::vector<double>& functional,
                         ExecPolicy policy = ExecPolicy::parallel);

// Three-party Svetlichny functional sum_x (-1)^{x1 x2 + x1 x3 + x2 x3} E(x)
// for binary inputs/outputs.  The first call verifies, by exhaustive
// maximization over the enumerated hybrid vertices, that the hybrid bound
// of this sign convention equals 4, and caches the result.
double svetlichny_value(const Behavior& b);

// That hybrid bound, computed by enumeration (not assumed).
double svetlichny_hybrid_bound();

// Bloch directions per party (two settings each) achieving the GHZ
// quantum optimum 4*sqrt(2): equatorial angles -pi/4, pi/4 for party 1
// and 0, pi/2 for the others.
std::vector<std::vector<std::array<double, 3>>> ghz_svetlichny_directions();

struct SvetlichnyOptimum {
  double value = 0.0;
  std::vector<std::vector<std::array<double, 3>>> directions;  // [party][input]
  std::size_t sweeps = 0;
};

// Maximize the Svetlichny value of a 3-qubit state over projective
// measurement directions by alternating optimization (each party's
// optimal observable given the others is the Bloch vector of a partial
// contraction), with seeded random restarts.
SvetlichnyOptimum optimize_svetlichny(const DensityMatrix& rho, std::size_t restarts = 8,
                                      std::uint64_t seed = 7);

}  // namespace starlocal
