// Times the parallel kernels against their serial reference and checks
// the outputs agree bit for bit.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>

#include "starlocal/correlations.hpp"
#include "starlocal/exec.hpp"
#include "starlocal/lhvnet.hpp"
#include "starlocal/locality.hpp"
#include "starlocal/states.hpp"

using namespace starlocal;

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

bool bits_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() &&
         (a.empty() || std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
}

bool bits_equal_mat(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c)
      if (std::memcmp(&a(r, c), &b(r, c), sizeof(cplx)) != 0) return false;
  return true;
}

void report(const char* name, double serial_ms, double parallel_ms, bool identical) {
  std::printf("%-22s serial %9.2f ms   parallel %9.2f ms   speedup %5.2fx   %s\n", name,
              serial_ms, parallel_ms, serial_ms / parallel_ms,
              identical ? "bit-identical" : "MISMATCH");
}

}  // namespace

int main() {
  std::printf("threads available: %d\n\n", max_threads());
  int bad = 0;

  {
    const FamilyParams p{0.8, 0.5};
    const NetworkSpec spec = NetworkSpec::uniform(11, rho_family(p), ghz_projector_map(11));
    auto t0 = std::chrono::steady_clock::now();
    const StarState a = star_network_state(spec, ExecPolicy::serial);
    const double ts = ms_since(t0);
    t0 = std::chrono::steady_clock::now();
    const StarState b = star_network_state(spec, ExecPolicy::parallel);
    const double tp = ms_since(t0);
    const bool same = bits_equal_mat(a.state.matrix(), b.state.matrix());
    bad += !same;
    report("star_network_state", ts, tp, same);
  }

  {
    const FamilyParams p{0.9, M_PI / 6.0};
    const NetworkSpec spec = NetworkSpec::uniform(3, rho_family(p), ghz_projector_map(3));
    const StarState star = star_network_state(spec);
    const MeasurementAssignment m = assignment_from_bloch(random_bloch_directions(3, 12, 99));
    auto t0 = std::chrono::steady_clock::now();
    const Behavior a = quantum_behavior(star.state, m, ExecPolicy::serial);
    const double ts = ms_since(t0);
    t0 = std::chrono::steady_clock::now();
    const Behavior b = quantum_behavior(star.state, m, ExecPolicy::parallel);
    const double tp = ms_since(t0);
    const bool same = bits_equal(a.table(), b.table());
    bad += !same;
    report("quantum_behavior", ts, tp, same);
  }

  {
    const VertexSet vs = enumerate_vertices(Scenario::uniform(3, 2, 2), ModelClass::hybrid);
    std::vector<double> f(vs.scenario.cells());
    for (std::size_t c = 0; c < f.size(); ++c) f[c] = std::sin(0.37 * static_cast<double>(c));
    double va = 0.0, vb = 0.0;
    auto t0 = std::chrono::steady_clock::now();
    for (int rep = 0; rep < 200; ++rep) va = max_over_vertices(vs, f, ExecPolicy::serial);
    const double ts = ms_since(t0);
    t0 = std::chrono::steady_clock::now();
    for (int rep = 0; rep < 200; ++rep) vb = max_over_vertices(vs, f, ExecPolicy::parallel);
    const double tp = ms_since(t0);
    const bool same = std::memcmp(&va, &vb, sizeof(double)) == 0;
    bad += !same;
    report("max_over_vertices", ts, tp, same);
  }

  {
    auto arm = builtin_werner_lhs(100000);
    const LiftedModel lifted({arm, arm, arm}, ghz_projector_map(3));
    const MeasurementAssignment m = assignment_from_bloch(random_bloch_directions(3, 4, 7));
    auto t0 = std::chrono::steady_clock::now();
    const SimulationResult a = simulate_behavior(lifted, m, 200000, 7, 64, ExecPolicy::serial);
    const double ts = ms_since(t0);
    t0 = std::chrono::steady_clock::now();
    const SimulationResult b = simulate_behavior(lifted, m, 200000, 7, 64, ExecPolicy::parallel);
    const double tp = ms_since(t0);
    const bool same = bits_equal(a.behavior.table(), b.behavior.table()) &&
                      bits_equal(a.stderr_table, b.stderr_table);
    bad += !same;
    report("simulate_behavior", ts, tp, same);
  }

  return bad == 0 ? 0 : 1;
}
