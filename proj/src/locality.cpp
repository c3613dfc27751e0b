#include "starlocal/locality.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <mutex>
#include <string>

#include "starlocal/errors.hpp"
#include "starlocal/indexing.hpp"
#include "starlocal/rng.hpp"
#include "starlocal/simplex.hpp"

namespace starlocal {

namespace {

// Number of joint-deterministic strategies for a party group:
// (product of outputs)^(product of inputs), with overflow/cap guard.
std::size_t group_strategies(std::size_t joint_outputs, std::size_t joint_inputs,
                             std::size_t cap) {
  std::size_t count = 1;
  for (std::size_t i = 0; i < joint_inputs; ++i) {
    if (count > cap / joint_outputs + 1) return cap + 1;
    count *= joint_outputs;
    if (count > cap) return cap + 1;
  }
  return count;
}

}  // namespace

VertexSet enumerate_vertices(const Scenario& s, ModelClass model_class) {
  validate_scenario(s);
  const std::size_t cap = tolerances().max_vertices;
  const std::size_t n = s.n_parties;
  const std::size_t jx = s.joint_inputs();
  const std::size_t ja = s.joint_outputs();
  const std::size_t cells = jx * ja;

  VertexSet vs;
  vs.scenario = s;
  vs.model_class = model_class;

  std::vector<std::size_t> xdig(n);

  if (model_class == ModelClass::full_local) {
    // Per-party strategy counts k_i^{m_i}.
    std::vector<std::size_t> strat(n);
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i) {
      strat[i] = group_strategies(s.outputs[i], s.inputs[i], cap);
      if (strat[i] > cap || total > cap / strat[i] + 1) {
        total = cap + 1;
        break;
      }
      total *= strat[i];
      if (total > cap) break;
    }
    if (total > cap)
      throw SizeError("enumerate_vertices: full-local vertex count exceeds cap");

    vs.vertices.reserve(total);
    std::vector<std::size_t> choice(n, 0);  // per-party strategy index
    std::vector<std::size_t> adig(n);
    for (std::size_t v = 0; v < total; ++v) {
      std::vector<double> table(cells, 0.0);
      for (std::size_t x = 0; x < jx; ++x) {
        digits_of(x, s.inputs, xdig);
        // Strategy index decoded as a base-outputs_i number over inputs;
        // digit x_i (most significant first) is the forced outcome.
        for (std::size_t i = 0; i < n; ++i) {
          std::size_t c = choice[i];
          for (std::size_t skip = xdig[i] + 1; skip < s.inputs[i]; ++skip) c /= s.outputs[i];
          adig[i] = c % s.outputs[i];
        }
        table[x * ja + index_of(adig, s.outputs)] = 1.0;
      }
      vs.vertices.push_back(std::move(table));
      for (std::size_t i = n; i-- > 0;) {
        if (++choice[i] < strat[i]) break;
        choice[i] = 0;
      }
    }
    return vs;
  }

  // Hybrid: unordered bipartitions, tagged by membership of party 0 in
  // the first group.
  if (n < 2) throw ArgumentError("enumerate_vertices: hybrid needs >= 2 parties");
  std::size_t total = 0;
  std::vector<std::size_t> masks;
  for (std::size_t mask = 1; mask + 1 < (std::size_t{1} << n); ++mask) {
    if (!(mask & 1)) continue;  // party 0 stays in group 1
    std::size_t cnt = 1;
    bool over = false;
    for (int g = 0; g < 2 && !over; ++g) {
      std::size_t ji = 1, jo = 1;
      for (std::size_t i = 0; i < n; ++i) {
        const bool in_first = (mask >> i) & 1;
        if (in_first != (g == 0)) continue;
        ji *= s.inputs[i];
        jo *= s.outputs[i];
      }
      const std::size_t gs = group_strategies(jo, ji, cap);
      if (gs > cap || cnt > cap / gs + 1) over = true;
      else cnt *= gs;
      if (cnt > cap) over = true;
    }
    if (over || total > cap - cnt)
      throw SizeError("enumerate_vertices: hybrid vertex count exceeds cap (" +
                      std::to_string(total) + "+ so far)");
    total += cnt;
    masks.push_back(mask);
  }

  vs.vertices.reserve(total);
  std::vector<std::size_t> adig(n);
  for (std::size_t mask : masks) {
    std::vector<std::size_t> g1, g2;
    for (std::size_t i = 0; i < n; ++i) ((mask >> i) & 1 ? g1 : g2).push_back(i);
    auto joint = [&](const std::vector<std::size_t>& g, const std::vector<std::size_t>& per) {
      std::size_t p = 1;
      for (std::size_t i : g) p *= per[i];
      return p;
    };
    const std::size_t ji1 = joint(g1, s.inputs), jo1 = joint(g1, s.outputs);
    const std::size_t ji2 = joint(g2, s.inputs), jo2 = joint(g2, s.outputs);
    const std::size_t n1 = group_strategies(jo1, ji1, cap);
    const std::size_t n2 = group_strategies(jo2, ji2, cap);

    // Group strategy = base-jo number with ji digits (most significant
    // digit = group input combo 0); returns the joint group outcome.
    auto outcome_of = [](std::size_t strategy, std::size_t gx, std::size_t ji, std::size_t jo) {
      for (std::size_t skip = gx + 1; skip < ji; ++skip) strategy /= jo;
      return strategy % jo;
    };
    auto group_index = [&](const std::vector<std::size_t>& g, const std::vector<std::size_t>& dig,
                           const std::vector<std::size_t>& radix) {
      std::size_t idx = 0;
      for (std::size_t i : g) idx = idx * radix[i] + dig[i];
      return idx;
    };
    auto spread = [&](const std::vector<std::size_t>& g, std::size_t joint_val,
                      const std::vector<std::size_t>& radix) {
      for (std::size_t i = g.size(); i-- > 0;) {
        adig[g[i]] = joint_val % radix[g[i]];
        joint_val /= radix[g[i]];
      }
    };

    for (std::size_t s1 = 0; s1 < n1; ++s1) {
      for (std::size_t s2 = 0; s2 < n2; ++s2) {
        std::vector<double> table(cells, 0.0);
        for (std::size_t x = 0; x < jx; ++x) {
          digits_of(x, s.inputs, xdig);
          const std::size_t o1 = outcome_of(s1, group_index(g1, xdig, s.inputs), ji1, jo1);
          const std::size_t o2 = outcome_of(s2, group_index(g2, xdig, s.inputs), ji2, jo2);
          spread(g1, o1, s.outputs);
          spread(g2, o2, s.outputs);
          table[x * ja + index_of(adig, s.outputs)] = 1.0;
        }
        vs.vertices.push_back(std::move(table));
      }
    }
  }
  return vs;
}

double max_over_vertices(const VertexSet& vs, const std::vector<double>& functional,
                         ExecPolicy policy) {
  const std::size_t cells = vs.scenario.cells();
  if (functional.size() != cells)
    throw ArgumentError("max_over_vertices: functional length mismatch");
  const long long nv = static_cast<long long>(vs.vertices.size());
  if (nv == 0) throw ArgumentError("max_over_vertices: empty vertex set");
  double best = -std::numeric_limits<double>::infinity();
  const bool par = policy == ExecPolicy::parallel;
#pragma omp parallel for schedule(static) reduction(max : best) if (par)
  for (long long v = 0; v < nv; ++v) {
    const std::vector<double>& t = vs.vertices[static_cast<std::size_t>(v)];
    double s = 0.0;
    for (std::size_t c = 0; c < cells; ++c)
      if (t[c] != 0.0) s += functional[c] * t[c];
    if (s > best) best = s;
  }
  return best;
}

LPCertificate certify(const Behavior& b, const VertexSet& vs, ExecPolicy policy) {
  if (!(b.scenario() == vs.scenario))
    throw ArgumentError("certify: behavior and vertex set scenarios differ");
  const std::size_t cells = b.scenario().cells();
  const std::size_t nv = vs.vertices.size();
  const std::size_t ja = b.scenario().joint_outputs();
  const double u = 1.0 / static_cast<double>(ja);  // white noise cell value

  // Variables: w_0..w_{nv-1}, v, slack s.  Constraints: per-cell mixture
  // match, sum w = 1, v + s = 1.
  LinearProgram lp;
  lp.rows = cells + 2;
  lp.cols = nv + 2;
  lp.a.assign(lp.rows * lp.cols, 0.0);
  lp.b.assign(lp.rows, 0.0);
  lp.c.assign(lp.cols, 0.0);
  const std::size_t vcol = nv, scol = nv + 1;

  for (std::size_t c = 0; c < cells; ++c) {
    for (std::size_t k = 0; k < nv; ++k) lp.a[c * lp.cols + k] = vs.vertices[k][c];
    lp.a[c * lp.cols + vcol] = -(b.table()[c] - u);
    lp.b[c] = u;
  }
  for (std::size_t k = 0; k < nv; ++k) lp.a[cells * lp.cols + k] = 1.0;
  lp.b[cells] = 1.0;
  lp.a[(cells + 1) * lp.cols + vcol] = 1.0;
  lp.a[(cells + 1) * lp.cols + scol] = 1.0;
  lp.b[cells + 1] = 1.0;
  lp.c[vcol] = -1.0;  // maximize v

  const LpSolution sol = solve_lp(lp, tolerances().lp_feasibility);
  if (sol.status != LpStatus::optimal)
    throw SolverError("certify: LP did not reach an optimum (status " +
                      std::to_string(static_cast<int>(sol.status)) + ")");

  LPCertificate cert;
  cert.visibility = sol.x[vcol];
  cert.lp_pivots = sol.pivots;
  cert.feasible_at_1 = cert.visibility >= 1.0 - tolerances().lp_feasibility;
  if (cert.feasible_at_1) return cert;

  // Separating functional from the equality duals: f = y_cells,
  // bound = -y of the sum-w row.  Validate before returning.
  std::vector<double> f(b.table().size());
  for (std::size_t c = 0; c < cells; ++c) f[c] = sol.y[c];
  double bound = -sol.y[cells];
  double fp = 0.0;
  for (std::size_t c = 0; c < cells; ++c) fp += f[c] * b.table()[c];
  if (fp < bound) {  // orientation depends on the sign convention of y
    for (double& v : f) v = -v;
    bound = -bound;
    fp = -fp;
  }
  const double vmax = max_over_vertices(vs, f, policy);
  if (vmax > bound + tolerances().lp_feasibility || fp <= bound)
    throw SolverError("certify: dual functional failed validation");
  cert.has_functional = true;
  cert.functional = std::move(f);
  cert.bound = bound;
  return cert;
}

LPCertificate certify(const Behavior& b, ModelClass model_class, ExecPolicy policy) {
  return certify(b, enumerate_vertices(b.scenario(), model_class), policy);
}

namespace {

int svetlichny_sign(std::size_t x) {
  const std::size_t x1 = (x >> 2) & 1, x2 = (x >> 1) & 1, x3 = x & 1;
  return (x1 * x2 + x1 * x3 + x2 * x3) % 2 ? -1 : 1;
}

void require_three_party_binary(const Scenario& s, const char* who) {
  if (s.n_parties != 3 || s.inputs != std::vector<std::size_t>{2, 2, 2} ||
      s.outputs != std::vector<std::size_t>{2, 2, 2})
    throw ArgumentError(std::string(who) + ": needs 3 parties, binary inputs and outputs");
}

}  // namespace

double svetlichny_hybrid_bound() {
  static std::once_flag flag;
  static double bound = 0.0;
  std::call_once(flag, [] {
    const Scenario s = Scenario::uniform(3, 2, 2);
    const VertexSet vs = enumerate_vertices(s, ModelClass::hybrid);
    // The functional in cell form: f(x, a) = sign(x) * (-1)^{sum a}.
    std::vector<double> f(s.cells());
    for (std::size_t x = 0; x < 8; ++x)
      for (std::size_t a = 0; a < 8; ++a)
        f[x * 8 + a] = svetlichny_sign(x) * (std::popcount(a) % 2 ? -1.0 : 1.0);
    bound = max_over_vertices(vs, f, ExecPolicy::serial);
    if (std::abs(bound - 4.0) > 1e-9)
      throw SolverError("svetlichny_hybrid_bound: enumerated bound is not 4; "
                        "sign convention rejected");
  });
  return bound;
}

double svetlichny_value(const Behavior& b) {
  require_three_party_binary(b.scenario(), "svetlichny_value");
  svetlichny_hybrid_bound();  // convention self-check (cached)
  double s = 0.0;
  for (std::size_t x = 0; x < 8; ++x) s += svetlichny_sign(x) * correlator(b, x);
  return s;
}

std::vector<std::vector<std::array<double, 3>>> ghz_svetlichny_directions() {
  auto equatorial = [](double phi) {
    return std::array<double, 3>{std::cos(phi), std::sin(phi), 0.0};
  };
  return {{equatorial(-M_PI / 4.0), equatorial(M_PI / 4.0)},
          {equatorial(0.0), equatorial(M_PI / 2.0)},
          {equatorial(0.0), equatorial(M_PI / 2.0)}};
}

namespace {

// n . sigma for a Bloch direction n.
ComplexMatrix observable(const std::array<double, 3>& n) {
  ComplexMatrix a(2, 2);
  a(0, 0) = n[2];
  a(1, 1) = -n[2];
  a(0, 1) = cplx(n[0], -n[1]);
  a(1, 0) = cplx(n[0], n[1]);
  return a;
}

}  // namespace

SvetlichnyOptimum optimize_svetlichny(const DensityMatrix& rho, std::size_t restarts,
                                      std::uint64_t seed) {
  if (rho.dims() != std::vector<std::size_t>{2, 2, 2})
    throw ArgumentError("optimize_svetlichny: needs a 3-qubit state");
  if (restarts == 0) throw ArgumentError("optimize_svetlichny: needs at least 1 restart");

  SvetlichnyOptimum best;
  best.value = -std::numeric_limits<double>::infinity();

  for (std::size_t run = 0; run < restarts; ++run) {
    std::vector<std::vector<std::array<double, 3>>> dirs(3);
    if (run == 0) {
      dirs = ghz_svetlichny_directions();  // warm start at the GHZ optimum
    } else {
      RngStream rng(seed, run);
      for (auto& party : dirs) {
        party.resize(2);
        for (auto& d : party) d = rng.unit_vector();
      }
    }

    double value = -std::numeric_limits<double>::infinity();
    std::size_t sweeps = 0;
    for (; sweeps < 200; ++sweeps) {
      double prev = value;
      for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t xi = 0; xi < 2; ++xi) {
          // Partial contraction: R[v,u] = sum over other settings of
          // sign * Tr[rho (A (x) |u><v| (x) A)]; the optimal observable
          // for this slot is the normalized Bloch vector of R.
          ComplexMatrix r(2, 2);
          for (std::size_t x = 0; x < 8; ++x) {
            const std::size_t xd[3] = {(x >> 2) & 1, (x >> 1) & 1, x & 1};
            if (xd[i] != xi) continue;
            const double sgn = svetlichny_sign(x);
            for (std::size_t u = 0; u < 2; ++u)
              for (std::size_t v = 0; v < 2; ++v) {
                ComplexMatrix e(2, 2);
                e(u, v) = 1.0;
                ComplexMatrix m = i == 0 ? e : observable(dirs[0][xd[0]]);
                m = kron(m, i == 1 ? e : observable(dirs[1][xd[1]]));
                m = kron(m, i == 2 ? e : observable(dirs[2][xd[2]]));
                r(v, u) += sgn * (rho.matrix() * m).trace();
              }
          }
          const std::array<double, 3> blo = {(r(0, 1) + r(1, 0)).real(),
                                             (cplx(0.0, 1.0) * (r(0, 1) - r(1, 0))).real(),
                                             (r(0, 0) - r(1, 1)).real()};
          const double norm = std::sqrt(blo[0] * blo[0] + blo[1] * blo[1] + blo[2] * blo[2]);
          if (norm > 1e-15)
            dirs[i][xi] = {blo[0] / norm, blo[1] / norm, blo[2] / norm};
        }
      }
      // Evaluate the functional at the current directions.
      value = 0.0;
      for (std::size_t x = 0; x < 8; ++x) {
        const std::size_t xd[3] = {(x >> 2) & 1, (x >> 1) & 1, x & 1};
        ComplexMatrix m = observable(dirs[0][xd[0]]);
        m = kron(m, observable(dirs[1][xd[1]]));
        m = kron(m, observable(dirs[2][xd[2]]));
        value += svetlichny_sign(x) * (rho.matrix() * m).trace().real();
      }
      if (value - prev < 1e-12) break;
    }
    if (value > best.value) {
      best.value = value;
      best.directions = dirs;
      best.sweeps = sweeps;
    }
  }
  return best;
}

}  // namespace starlocal
