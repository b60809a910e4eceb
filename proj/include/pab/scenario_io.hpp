#pragma once

#include <string>

#include <json.hpp>

#include "pab/equilibrium.hpp"
#include "pab/market.hpp"

namespace pab {

inline constexpr const char* kScenarioSchema = "pab.scenario/1";
inline constexpr const char* kResultSchema = "pab.result/1";

/// A scenario plus the solver settings carried in its file. Files without a
/// solver section get the library defaults.
struct ScenarioFile {
  Scenario scenario;
  SolverOptions solver;
};

/// Parses the versioned scenario schema. Unknown keys are rejected with the
/// offending key and location in the message.
ScenarioFile parse_scenario_json(const nlohmann::json& doc);

nlohmann::ordered_json scenario_to_json(const ScenarioFile& file);

/// Reads and parses a scenario file. Missing files raise IoError; malformed
/// JSON or schema violations raise ValidationError.
ScenarioFile load_scenario_file(const std::string& path);

/// Machine-readable command output: inputs echoed next to outputs, full
/// double precision, lossless round trip through from_json.
struct ResultRecord {
  std::string schema_version = kResultSchema;
  std::string command;
  nlohmann::ordered_json inputs;
  nlohmann::ordered_json outputs;
  nlohmann::ordered_json diagnostics;

  nlohmann::ordered_json to_json() const;
  static ResultRecord from_json(const nlohmann::ordered_json& doc);

  friend bool operator==(const ResultRecord&, const ResultRecord&) = default;
};

}  // namespace pab
