#include "starlocal/io.hpp"

#include <cstdio>
#include <fstream>

#include "starlocal/errors.hpp"
#include "starlocal/tolerances.hpp"
#include "starlocal/version.hpp"

namespace starlocal {

namespace {

const char* kBehaviorLayout = "input-major/first-party-most-significant";

nlohmann::json tolerances_to_json() {
  const Tolerances& t = tolerances();
  return {{"hermiticity", t.hermiticity},
          {"unit_trace", t.unit_trace},
          {"psd_floor", t.psd_floor},
          {"ket_norm", t.ket_norm},
          {"trace_preserve", t.trace_preserve},
          {"map_weight_floor", t.map_weight_floor},
          {"entry_match", t.entry_match},
          {"jacobi_offdiag", t.jacobi_offdiag},
          {"povm_check", t.povm_check},
          {"behavior_norm", t.behavior_norm},
          {"behavior_nonneg", t.behavior_nonneg},
          {"lp_feasibility", t.lp_feasibility},
          {"bisect_tol", t.bisect_tol},
          {"unsteerable_slack", t.unsteerable_slack},
          {"max_matrix_side", t.max_matrix_side},
          {"max_vertices", t.max_vertices},
          {"min_effective_samples", t.min_effective_samples}};
}

const nlohmann::json& require(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw ArgumentError(std::string("missing field '") + key + "'");
  return *it;
}

void require_type(const nlohmann::json& j, const char* expected) {
  if (require(j, "type").get<std::string>() != expected)
    throw ArgumentError(std::string("file is not of type '") + expected + "'");
}

std::vector<std::size_t> dims_from_json(const nlohmann::json& j) {
  std::vector<std::size_t> dims;
  for (const auto& d : j) {
    const long long v = d.get<long long>();
    if (v < 1) throw ArgumentError("invalid subsystem dimension");
    dims.push_back(static_cast<std::size_t>(v));
  }
  return dims;
}

Scenario scenario_from_json(const nlohmann::json& j) {
  Scenario s;
  s.n_parties = require(j, "parties").get<std::size_t>();
  for (const auto& v : require(j, "inputs")) s.inputs.push_back(v.get<std::size_t>());
  for (const auto& v : require(j, "outputs")) s.outputs.push_back(v.get<std::size_t>());
  validate_scenario(s);
  return s;
}

}  // namespace

nlohmann::json metadata_to_json(const RunMetadata& meta) {
  nlohmann::json params = nlohmann::json::object();
  for (const auto& [k, v] : meta.params) params[k] = v;
  nlohmann::json j{{"tool", "starlocal"},
                   {"version", kVersionString},
                   {"command", meta.command},
                   {"params", params},
                   {"tolerances", tolerances_to_json()}};
  if (meta.has_seed) j["seed"] = meta.seed;
  return j;
}

nlohmann::json entries_to_json(const ComplexMatrix& m) {
  nlohmann::json arr = nlohmann::json::array();
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c)
      arr.push_back({m(r, c).real(), m(r, c).imag()});
  return arr;
}

ComplexMatrix entries_from_json(const nlohmann::json& j, std::size_t rows, std::size_t cols) {
  if (!j.is_array() || j.size() != rows * cols)
    throw ArgumentError("matrix entry count does not match its dimensions");
  ComplexMatrix m(rows, cols);
  std::size_t k = 0;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c, ++k) {
      const auto& e = j[k];
      if (!e.is_array() || e.size() != 2) throw ArgumentError("matrix entry is not a [re, im] pair");
      m(r, c) = cplx(e[0].get<double>(), e[1].get<double>());
    }
  return m;
}

nlohmann::json state_to_json(const DensityMatrix& state, const RunMetadata& meta) {
  return {{"type", "state"},
          {"dims", state.dims()},
          {"entries", entries_to_json(state.matrix())},
          {"metadata", metadata_to_json(meta)}};
}

DensityMatrix state_from_json(const nlohmann::json& j) {
  require_type(j, "state");
  const std::vector<std::size_t> dims = dims_from_json(require(j, "dims"));
  std::size_t d = 1;
  for (std::size_t v : dims) d *= v;
  return DensityMatrix(entries_from_json(require(j, "entries"), d, d), dims);
}

nlohmann::json behavior_to_json(const Behavior& b) {
  const Scenario& s = b.scenario();
  return {{"type", "behavior"},
          {"scenario",
           {{"parties", s.n_parties}, {"inputs", s.inputs}, {"outputs", s.outputs}}},
          {"layout", kBehaviorLayout},
          {"probabilities", b.table()}};
}

Behavior behavior_from_json(const nlohmann::json& j) {
  require_type(j, "behavior");
  if (require(j, "layout").get<std::string>() != kBehaviorLayout)
    throw ArgumentError("unsupported behavior layout tag");
  const Scenario s = scenario_from_json(require(j, "scenario"));
  std::vector<double> table;
  for (const auto& v : require(j, "probabilities")) table.push_back(v.get<double>());
  return Behavior(s, std::move(table));
}

nlohmann::json certificate_to_json(const LPCertificate& c, const std::string& mode,
                                   const RunMetadata& meta) {
  nlohmann::json j{{"type", "certificate"},
                   {"mode", mode},
                   {"visibility", c.visibility},
                   {"feasible", c.feasible_at_1},
                   {"metadata", metadata_to_json(meta)}};
  if (c.has_functional) {
    j["functional"] = c.functional;
    j["bound"] = c.bound;
  } else {
    j["functional"] = nullptr;
    j["bound"] = nullptr;
  }
  return j;
}

nlohmann::json gme_report_to_json(const GMEReport& r, const RunMetadata& meta) {
  return {{"type", "certificate"},
          {"mode", "gme"},
          {"score", r.score},
          {"certified", r.certified},
          {"witness_index", r.witness_index},
          {"witness_offdiagonal", r.z_abs},
          {"witness_cross_term", r.w_i},
          {"metadata", metadata_to_json(meta)}};
}

nlohmann::json report_to_json(const SimulationResult& r, const RunMetadata& meta) {
  return {{"type", "report"},
          {"behavior", behavior_to_json(r.behavior)},
          {"stderr_table", r.stderr_table},
          {"weight_mean", r.weight_mean},
          {"weight_se", r.weight_se},
          {"normalization", r.normalization},
          {"effective_samples", r.ess},
          {"precision_warning", r.precision_warning},
          {"samples", r.samples},
          {"chunks", r.chunks},
          {"seed", r.seed},
          {"metadata", metadata_to_json(meta)}};
}

std::shared_ptr<const LHSModel> lhs_model_from_json(const nlohmann::json& j) {
  const std::string kind = require(j, "model").get<std::string>();
  if (kind == "builtin-werner") {
    std::size_t samples = 1000000;
    if (j.contains("validation_samples")) samples = j["validation_samples"].get<std::size_t>();
    return builtin_werner_lhs(samples);
  }
  if (kind != "discrete") throw ArgumentError("unknown hidden-variable model '" + kind + "'");

  DensityMatrix arm = state_from_json(require(j, "arm_state"));
  std::vector<double> q;
  for (const auto& v : require(j, "q")) q.push_back(v.get<double>());

  std::vector<ComplexMatrix> sigmas;
  for (const auto& v : require(j, "sigmas")) sigmas.push_back(entries_from_json(v, 2, 2));

  std::vector<std::vector<std::vector<double>>> tables;
  for (const auto& per_k : require(j, "response_tables")) {
    std::vector<std::vector<double>> rows;
    for (const auto& per_x : per_k) {
      std::vector<double> row;
      for (const auto& p : per_x) row.push_back(p.get<double>());
      rows.push_back(std::move(row));
    }
    tables.push_back(std::move(rows));
  }

  const std::size_t d_a = arm.dims()[0];
  std::vector<std::vector<ComplexMatrix>> inputs;
  for (const auto& per_x : require(j, "inputs")) {
    std::vector<ComplexMatrix> ops;
    for (const auto& op : per_x) ops.push_back(entries_from_json(op, d_a, d_a));
    inputs.push_back(std::move(ops));
  }

  return discrete_lhs_model(std::move(arm), std::move(q), std::move(sigmas), std::move(tables),
                            std::move(inputs));
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw ArgumentError("cannot open '" + path + "' for writing");
  out << j.dump(2) << '\n';
  if (!out) throw ArgumentError("failed writing '" + path + "'");
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError("invalid JSON in '" + path + "': " + e.what());
  }
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace starlocal
