#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>

#include <json.hpp>

#include "starlocal/correlations.hpp"
#include "starlocal/gme.hpp"
#include "starlocal/lhvnet.hpp"
#include "starlocal/linalg.hpp"
#include "starlocal/locality.hpp"

namespace starlocal {

// Provenance block embedded in every emitted file: tool + version,
// the command, the exact numeric parameter set, the seed when one was
// used, and the active tolerances.
struct RunMetadata {
  std::string command;
  std::map<std::string, double> params;
  bool has_seed = false;
  std::uint64_t seed = 0;
};

nlohmann::json metadata_to_json(const RunMetadata& meta);

// Matrix payload helpers: flat row-major [re, im] pairs.
nlohmann::json entries_to_json(const ComplexMatrix& m);
ComplexMatrix entries_from_json(const nlohmann::json& j, std::size_t rows, std::size_t cols);

// State files: {type, dims, entries, metadata}.
nlohmann::json state_to_json(const DensityMatrix& state, const RunMetadata& meta);
DensityMatrix state_from_json(const nlohmann::json& j);

// Behavior files: {type, scenario, layout, probabilities}.  The layout
// tag names the flat index convention (joint input major, then joint
// outcome; first party most significant) and is checked on load.
nlohmann::json behavior_to_json(const Behavior& b);
Behavior behavior_from_json(const nlohmann::json& j);

// Certificates: {type, mode, visibility, functional, bound, ...}.
nlohmann::json certificate_to_json(const LPCertificate& c, const std::string& mode,
                                   const RunMetadata& meta);
nlohmann::json gme_report_to_json(const GMEReport& r, const RunMetadata& meta);

// Simulation reports: {type, behavior, stderr_table, seed, ...}.
nlohmann::json report_to_json(const SimulationResult& r, const RunMetadata& meta);

// Hidden-variable model descriptions: {"model": "builtin-werner"} or a
// declarative finite mixture {"model": "discrete", arm_state, q,
// sigmas, response_tables, inputs}.
std::shared_ptr<const LHSModel> lhs_model_from_json(const nlohmann::json& j);

void write_json_file(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json_file(const std::string& path);

// Full-precision decimal rendering (17 significant digits), shared by
// the CSV writers.
std::string format_double(double v);

}  // namespace starlocal
