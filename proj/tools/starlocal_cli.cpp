// starlocal command-line tool: build network states, certify
// entanglement / (non)locality, sweep parameter grids to CSV, and run
// the hidden-variable simulator against the quantum prediction.
#include <cmath>
#include <cstdint>
#include <iostream>
#include <map>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "starlocal/errors.hpp"
#include "starlocal/exec.hpp"
#include "starlocal/gme.hpp"
#include "starlocal/io.hpp"
#include "starlocal/lhvnet.hpp"
#include "starlocal/locality.hpp"
#include "starlocal/states.hpp"
#include "starlocal/tolerances.hpp"
#include "starlocal/version.hpp"

using namespace starlocal;

namespace {

struct GlobalOpts {
  std::vector<std::string> tol_overrides;
  long long cap = -1;
  bool serial = false;
  std::string command_line;

  ExecPolicy policy() const { return serial ? ExecPolicy::serial : ExecPolicy::parallel; }
};

void apply_global(const GlobalOpts& g) {
  Tolerances& t = tolerances();
  if (g.cap > 0) t.max_matrix_side = static_cast<std::size_t>(g.cap);
  for (const std::string& kv : g.tol_overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ArgumentError("--tol expects key=value, got '" + kv + "'");
    const std::string key = kv.substr(0, eq);
    const double val = std::stod(kv.substr(eq + 1));
    if (key == "hermiticity") t.hermiticity = val;
    else if (key == "unit_trace") t.unit_trace = val;
    else if (key == "psd_floor") t.psd_floor = val;
    else if (key == "ket_norm") t.ket_norm = val;
    else if (key == "trace_preserve") t.trace_preserve = val;
    else if (key == "map_weight_floor") t.map_weight_floor = val;
    else if (key == "entry_match") t.entry_match = val;
    else if (key == "jacobi_offdiag") t.jacobi_offdiag = val;
    else if (key == "povm_check") t.povm_check = val;
    else if (key == "behavior_norm") t.behavior_norm = val;
    else if (key == "behavior_nonneg") t.behavior_nonneg = val;
    else if (key == "lp_feasibility") t.lp_feasibility = val;
    else if (key == "bisect_tol") t.bisect_tol = val;
    else if (key == "unsteerable_slack") t.unsteerable_slack = val;
    else if (key == "min_effective_samples") t.min_effective_samples = val;
    else throw ArgumentError("unknown tolerance '" + key + "'");
  }
}

double parse_theta(const std::string& s, double alpha) {
  if (s == "auto") return saturating_theta(alpha);
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ArgumentError("--theta expects a number or 'auto', got '" + s + "'");
  }
}

double parse_eps(const std::string& s, double theta) {
  if (s == "tan-theta") return std::tan(theta);
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ArgumentError("--eps expects a number or 'tan-theta', got '" + s + "'");
  }
}

// Integer grids: "3", "2,4,6", or an inclusive range "2:6".
std::vector<std::size_t> parse_int_grid(const std::string& s) {
  std::vector<std::size_t> out;
  const auto colon = s.find(':');
  if (colon != std::string::npos) {
    const long long lo = std::stoll(s.substr(0, colon));
    const long long hi = std::stoll(s.substr(colon + 1));
    if (lo < 0 || hi < lo) throw ArgumentError("bad integer range '" + s + "'");
    for (long long v = lo; v <= hi; ++v) out.push_back(static_cast<std::size_t>(v));
    return out;
  }
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const long long v = std::stoll(item);
    if (v < 0) throw ArgumentError("bad integer list '" + s + "'");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

// Real grids: "0.5", "0.1,0.5,0.9", or a linspace "start:stop:count".
std::vector<double> parse_real_grid(const std::string& s) {
  std::vector<double> out;
  const auto c1 = s.find(':');
  if (c1 != std::string::npos) {
    const auto c2 = s.find(':', c1 + 1);
    if (c2 == std::string::npos) throw ArgumentError("real ranges are start:stop:count, got '" + s + "'");
    const double lo = std::stod(s.substr(0, c1));
    const double hi = std::stod(s.substr(c1 + 1, c2 - c1 - 1));
    const long long count = std::stoll(s.substr(c2 + 1));
    if (count < 0) throw ArgumentError("negative grid count");
    for (long long i = 0; i < count; ++i)
      out.push_back(count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (count - 1.0));
    return out;
  }
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw ArgumentError("cannot open '" + path + "' for writing");
  out << text;
}

void emit_json(const std::string& path, const nlohmann::json& j) {
  if (path == "-")
    std::cout << j.dump(2) << '\n';
  else
    write_json_file(path, j);
}

// ---- state ----------------------------------------------------------

int cmd_state(const GlobalOpts& g, const std::string& kind, std::size_t n, double alpha,
              const std::string& theta_arg, const std::string& eps_arg, const std::string& out) {
  const double theta = parse_theta(theta_arg, alpha);
  const FamilyParams p{alpha, theta};
  RunMetadata meta;
  meta.command = g.command_line;
  meta.params = {{"n", static_cast<double>(n)}, {"alpha", alpha}, {"theta", theta}};

  if (kind == "family") {
    if (n != 2) throw ArgumentError("state family: the family is bipartite (--n 2)");
    emit_json(out, state_to_json(rho_family(p), meta));
  } else if (kind == "star") {
    const NetworkSpec spec = NetworkSpec::uniform(n, rho_family(p), ghz_projector_map(n));
    const StarState star = star_network_state(spec, g.policy());
    meta.params["normalization"] = star.normalization;
    emit_json(out, state_to_json(star.state, meta));
  } else if (kind == "xmatrix") {
    emit_json(out, state_to_json(x_matrix_state(n, p).to_density(), meta));
  } else if (kind == "gme-qutrit") {
    emit_json(out, state_to_json(rho_gme_qutrit(n, p), meta));
  } else if (kind == "filtered") {
    const double eps = parse_eps(eps_arg, theta);
    meta.params["eps"] = eps;
    const FilterResult f = apply_local_filter(rho_gme_qutrit(n, p), eps);
    meta.params["success_probability"] = f.success_probability;
    emit_json(out, state_to_json(f.state, meta));
  } else {
    throw ArgumentError("unknown state kind '" + kind + "'");
  }
  return 0;
}

// ---- certify --------------------------------------------------------

Behavior behavior_from_inputs(const GlobalOpts& g, const std::string& behavior_path,
                              const std::string& state_path, const std::string& preset) {
  if (!behavior_path.empty()) return behavior_from_json(read_json_file(behavior_path));
  if (state_path.empty())
    throw ArgumentError("certify: need --behavior, or --in with --preset");
  const DensityMatrix rho = state_from_json(read_json_file(state_path));
  std::vector<std::vector<std::array<double, 3>>> dirs;
  if (preset == "chsh") {
    const double r = 1.0 / std::sqrt(2.0);
    dirs = {{{0.0, 0.0, 1.0}, {1.0, 0.0, 0.0}}, {{r, 0.0, r}, {-r, 0.0, r}}};
  } else if (preset == "svetlichny") {
    dirs = ghz_svetlichny_directions();
  } else if (preset.empty()) {
    throw ArgumentError("certify: a state input needs --preset chsh|svetlichny");
  } else {
    throw ArgumentError("unknown preset '" + preset + "'");
  }
  if (rho.n_subsystems() != dirs.size())
    throw ArgumentError("certify: preset party count does not match the state");
  return quantum_behavior(rho, assignment_from_bloch(dirs), g.policy());
}

int cmd_certify(const GlobalOpts& g, const std::string& mode, const std::string& state_path,
                const std::string& behavior_path, const std::string& preset,
                const std::string& out) {
  RunMetadata meta;
  meta.command = g.command_line;

  if (mode == "gme") {
    if (state_path.empty()) throw ArgumentError("certify gme: needs --in state file");
    const DensityMatrix rho = state_from_json(read_json_file(state_path));
    bool all_qubits = true;
    for (std::size_t d : rho.dims()) all_qubits = all_qubits && d == 2;
    const GMEReport r = all_qubits ? gme_score(rho) : gme_score_via_projection(rho);
    emit_json(out, gme_report_to_json(r, meta));
    std::cerr << "gme score " << format_double(r.score)
              << (r.certified ? " (certified)" : " (not certified)") << '\n';
    return 0;
  }

  if (mode != "local" && mode != "gmnl")
    throw ArgumentError("certify: mode must be gme, local, or gmnl");
  const Behavior b = behavior_from_inputs(g, behavior_path, state_path, preset);
  const ModelClass cls = mode == "local" ? ModelClass::full_local : ModelClass::hybrid;
  const LPCertificate cert = certify(b, cls, g.policy());
  emit_json(out, certificate_to_json(cert, mode, meta));
  std::cerr << "visibility " << format_double(cert.visibility)
            << (cert.feasible_at_1 ? " (inside polytope)" : " (outside polytope)") << '\n';
  return 0;
}

// ---- sweep ----------------------------------------------------------

int cmd_sweep(const GlobalOpts& g, const std::string& n_arg, const std::string& alpha_arg,
              const std::string& theta_arg, bool with_numeric, bool with_svetlichny,
              const std::string& out) {
  const std::vector<std::size_t> ns = parse_int_grid(n_arg);
  const std::vector<double> alphas = parse_real_grid(alpha_arg);
  const bool theta_auto = theta_arg == "auto";
  const std::vector<double> thetas = theta_auto ? std::vector<double>{0.0} : parse_real_grid(theta_arg);

  const std::size_t total = ns.size() * alphas.size() * thetas.size();
  if (total > 1000000) throw ArgumentError("sweep: grid exceeds 10^6 points");

  std::vector<std::string> rows(total);
  std::string first_error;
  const bool par = !g.serial;

#pragma omp parallel for schedule(dynamic) if (par)
  for (long long idx = 0; idx < static_cast<long long>(total); ++idx) {
    const std::size_t ti = idx % thetas.size();
    const std::size_t ai = (idx / thetas.size()) % alphas.size();
    const std::size_t ni = idx / (thetas.size() * alphas.size());
    try {
      const std::size_t n = ns[ni];
      const double alpha = alphas[ai];
      const double theta = theta_auto ? saturating_theta(alpha) : thetas[ti];
      const FamilyParams p{alpha, theta};
      std::string row = std::to_string(n) + "," + format_double(alpha) + "," +
                        format_double(theta) + "," +
                        (is_unsteerable_family(p) ? "1" : "0") + "," +
                        format_double(analytic_concurrence(n, p)) + ",";
      if (with_numeric && n <= 8) {
        const NetworkSpec spec = NetworkSpec::uniform(n, rho_family(p), ghz_projector_map(n));
        const StarState star = star_network_state(spec, ExecPolicy::serial);
        row += format_double(gme_score(star.state).score);
      }
      row += "," + format_double(analytic_filtered_fidelity(n, alpha)) + ",";
      if (with_svetlichny && n == 3)
        row += format_double(
            optimize_svetlichny(analytic_filtered_state(n, p).to_density()).value);
      rows[idx] = std::move(row);
    } catch (const std::exception& e) {
#pragma omp critical
      if (first_error.empty()) first_error = e.what();
    }
  }
  if (!first_error.empty()) throw ArgumentError("sweep: " + first_error);

  std::string csv = "n,alpha,theta,unsteerable,c_analytic,c_numeric,fidelity,svetlichny\n";
  for (const std::string& r : rows) csv += r + "\n";
  write_text(out, csv);
  return 0;
}

// ---- simulate -------------------------------------------------------

int cmd_simulate(const GlobalOpts& g, std::size_t n, std::size_t settings, std::size_t samples,
                 std::uint64_t seed, std::size_t chunks, const std::string& model_arg,
                 const std::string& out) {
  std::shared_ptr<const LHSModel> arm;
  if (model_arg == "builtin-werner")
    arm = builtin_werner_lhs();
  else
    arm = lhs_model_from_json(read_json_file(model_arg));

  std::vector<std::shared_ptr<const LHSModel>> arms(n, arm);
  const LiftedModel lifted(arms, ghz_projector_map(n));
  const MeasurementAssignment assignment =
      assignment_from_bloch(random_bloch_directions(n, settings, seed));

  const SimulationResult sim =
      simulate_behavior(lifted, assignment, samples, seed, chunks, g.policy());

  const NetworkSpec spec = NetworkSpec::uniform(n, arm->arm_state(), ghz_projector_map(n));
  const StarState star = star_network_state(spec, g.policy());
  const Behavior quantum = quantum_behavior(star.state, assignment, g.policy());
  const BehaviorComparison cmp = compare_behaviors(sim, quantum);

  RunMetadata meta;
  meta.command = g.command_line;
  meta.params = {{"n", static_cast<double>(n)},
                 {"settings", static_cast<double>(settings)},
                 {"samples", static_cast<double>(samples)},
                 {"chunks", static_cast<double>(chunks)}};
  meta.has_seed = true;
  meta.seed = seed;

  nlohmann::json j = report_to_json(sim, meta);
  j["comparison"] = {{"max_cell_deviation", cmp.max_cell_deviation},
                     {"max_cell_sigma", cmp.max_cell_sigma},
                     {"cell_threshold_sigma", cmp.cell_threshold_sigma},
                     {"cells_beyond_3se", cmp.cells_beyond_3se},
                     {"tv_distance", cmp.tv_distance},
                     {"tv_budget", cmp.tv_budget},
                     {"weight_sigma", cmp.weight_sigma},
                     {"pass", cmp.all_ok}};
  emit_json(out, j);

  std::cerr << "weight mean " << format_double(sim.weight_mean) << " vs normalization "
            << format_double(sim.normalization) << " (" << format_double(cmp.weight_sigma)
            << " sigma)\n"
            << "cells beyond 3 SE: " << cmp.cells_beyond_3se << ", worst "
            << format_double(cmp.max_cell_sigma) << " sigma (familywise gate "
            << format_double(cmp.cell_threshold_sigma) << ")\n"
            << "TV distance " << format_double(cmp.tv_distance) << " vs budget 3 x "
            << format_double(cmp.tv_budget) << '\n';
  if (sim.precision_warning)
    std::cerr << "warning: effective sample size " << format_double(sim.ess)
              << " is too small for reliable errors\n";
  std::cerr << (cmp.all_ok ? "PASS" : "WARN") << ": simulated vs quantum agreement\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  GlobalOpts g;
  for (int i = 0; i < argc; ++i) {
    if (i) g.command_line += ' ';
    g.command_line += argv[i];
  }

  CLI::App app{"star-network states, entanglement and locality certification"};
  app.set_version_flag("--version", kVersionString);
  app.require_subcommand(1);
  app.add_option("--tol", g.tol_overrides, "tolerance override key=value (repeatable)");
  app.add_option("--cap", g.cap, "max dense matrix side");
  app.add_flag("--serial", g.serial, "disable parallel execution");

  // state
  auto* st = app.add_subcommand("state", "build a state and write it as JSON");
  std::string st_kind, st_theta = "auto", st_eps = "tan-theta", st_out = "-";
  std::size_t st_n = 2;
  double st_alpha = 0.0;
  st->add_option("kind", st_kind, "family|star|xmatrix|gme-qutrit|filtered")->required();
  st->add_option("--n", st_n, "number of parties");
  st->add_option("--alpha", st_alpha, "family mixing weight in [0,1]")->required();
  st->add_option("--theta", st_theta, "family angle in [0,pi/4], or 'auto'");
  st->add_option("--eps", st_eps, "filter strength, or 'tan-theta'");
  st->add_option("--out", st_out, "output path ('-' = stdout)");

  // certify
  auto* ce = app.add_subcommand("certify", "score entanglement or run the LP membership test");
  std::string ce_mode, ce_in, ce_behavior, ce_preset, ce_out = "-";
  ce->add_option("mode", ce_mode, "gme|local|gmnl")->required();
  ce->add_option("--in", ce_in, "state JSON file");
  ce->add_option("--behavior", ce_behavior, "behavior JSON file");
  ce->add_option("--preset", ce_preset, "measurements for a state input: chsh|svetlichny");
  ce->add_option("--out", ce_out, "output path ('-' = stdout)");

  // sweep
  auto* sw = app.add_subcommand("sweep", "evaluate the closed forms over a parameter grid (CSV)");
  std::string sw_n = "2:6", sw_alpha = "0.5:1:6", sw_theta = "auto", sw_out = "-";
  bool sw_numeric = false, sw_svet = false;
  sw->add_option("--n", sw_n, "party grid: single, list, or lo:hi");
  sw->add_option("--alpha", sw_alpha, "alpha grid: single, list, or start:stop:count");
  sw->add_option("--theta", sw_theta, "theta grid, or 'auto' for the saturating angle");
  sw->add_flag("--with-numeric", sw_numeric, "add the network-built score column (n <= 8)");
  sw->add_flag("--with-svetlichny", sw_svet, "add the filtered-state optimum column (n = 3)");
  sw->add_option("--out", sw_out, "output path ('-' = stdout)");

  // simulate
  auto* si = app.add_subcommand("simulate", "hidden-variable simulation vs quantum prediction");
  std::size_t si_n = 2, si_settings = 10, si_chunks = 64, si_samples = 100000;
  std::uint64_t si_seed = 1;
  std::string si_model = "builtin-werner", si_out = "-";
  si->add_option("--n", si_n, "number of arms/parties");
  si->add_option("--settings", si_settings, "random projective settings per party");
  si->add_option("--samples", si_samples, "Monte-Carlo samples");
  si->add_option("--seed", si_seed, "generator seed");
  si->add_option("--chunks", si_chunks, "independent sampling chunks");
  si->add_option("--model", si_model, "'builtin-werner' or a model JSON file");
  si->add_option("--out", si_out, "output path ('-' = stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    apply_global(g);
    if (st->parsed()) return cmd_state(g, st_kind, st_n, st_alpha, st_theta, st_eps, st_out);
    if (ce->parsed()) return cmd_certify(g, ce_mode, ce_in, ce_behavior, ce_preset, ce_out);
    if (sw->parsed()) return cmd_sweep(g, sw_n, sw_alpha, sw_theta, sw_numeric, sw_svet, sw_out);
    if (si->parsed())
      return cmd_simulate(g, si_n, si_settings, si_samples, si_seed, si_chunks, si_model, si_out);
    return 2;
  } catch (const ArgumentError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const SizeError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const DegenerateError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const SolverError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
