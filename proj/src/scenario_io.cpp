#include "pab/scenario_io.hpp"

#include <fstream>
#include <initializer_list>

namespace pab {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const char* where,
                         std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw ValidationError("unknown key '" + item.key() + "' in " + where);
    }
  }
}

const json& require(const json& obj, const char* where, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    throw ValidationError(std::string("missing key '") + key + "' in " + where);
  }
  return *it;
}

double as_number(const json& value, const char* where, const char* key) {
  if (!value.is_number()) {
    throw ValidationError(std::string("key '") + key + "' in " + where + " must be a number");
  }
  return value.get<double>();
}

}  // namespace

ScenarioFile parse_scenario_json(const json& doc) {
  if (!doc.is_object()) {
    throw ValidationError("scenario document must be a JSON object");
  }
  reject_unknown_keys(doc, "scenario", {"schema_version", "demand", "firms", "K", "solver"});

  const json& version = require(doc, "scenario", "schema_version");
  if (!version.is_string() || version.get<std::string>() != kScenarioSchema) {
    throw ValidationError(std::string("schema_version must be \"") + kScenarioSchema + "\"");
  }

  const json& demand_obj = require(doc, "scenario", "demand");
  if (!demand_obj.is_object()) {
    throw ValidationError("'demand' must be an object");
  }
  reject_unknown_keys(demand_obj, "demand", {"N", "gamma"});
  const Demand demand(as_number(require(demand_obj, "demand", "N"), "demand", "N"),
                      as_number(require(demand_obj, "demand", "gamma"), "demand", "gamma"));

  const json& firms_arr = require(doc, "scenario", "firms");
  if (!firms_arr.is_array() || firms_arr.empty()) {
    throw ValidationError("'firms' must be a non-empty array");
  }
  std::vector<Firm> firms;
  firms.reserve(firms_arr.size());
  for (std::size_t i = 0; i < firms_arr.size(); ++i) {
    const json& f = firms_arr[i];
    const std::string where = "firms[" + std::to_string(i) + "]";
    if (!f.is_object()) {
      throw ValidationError(where + " must be an object");
    }
    reject_unknown_keys(f, where.c_str(), {"c"});
    firms.push_back({as_number(require(f, where.c_str(), "c"), where.c_str(), "c")});
  }

  const double k = as_number(require(doc, "scenario", "K"), "scenario", "K");

  SolverOptions solver;
  if (doc.contains("solver")) {
    const json& s = doc["solver"];
    if (!s.is_object()) {
      throw ValidationError("'solver' must be an object");
    }
    reject_unknown_keys(s, "solver", {"tolerance", "max_iterations", "damping", "seed"});
    if (s.contains("tolerance")) {
      solver.tolerance = as_number(s["tolerance"], "solver", "tolerance");
    }
    if (s.contains("max_iterations")) {
      if (!s["max_iterations"].is_number_unsigned()) {
        throw ValidationError("solver max_iterations must be a nonnegative integer");
      }
      solver.max_iterations = s["max_iterations"].get<std::size_t>();
    }
    if (s.contains("damping")) {
      solver.damping = as_number(s["damping"], "solver", "damping");
    }
    if (s.contains("seed")) {
      if (!s["seed"].is_number_unsigned()) {
        throw ValidationError("solver seed must be a nonnegative integer");
      }
      solver.seed = s["seed"].get<std::uint64_t>();
    }
  }

  return ScenarioFile{Scenario(demand, std::move(firms), k), solver};
}

nlohmann::ordered_json scenario_to_json(const ScenarioFile& file) {
  nlohmann::ordered_json doc;
  doc["schema_version"] = kScenarioSchema;
  doc["demand"] = {{"N", file.scenario.demand().intercept()},
                   {"gamma", file.scenario.demand().slope()}};
  doc["firms"] = nlohmann::ordered_json::array();
  for (const Firm& f : file.scenario.firms()) {
    doc["firms"].push_back({{"c", f.cost_coeff}});
  }
  doc["K"] = file.scenario.lipschitz_k();
  doc["solver"] = {{"tolerance", file.solver.tolerance},
                   {"max_iterations", file.solver.max_iterations},
                   {"damping", file.solver.damping},
                   {"seed", file.solver.seed}};
  return doc;
}

ScenarioFile load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open scenario file '" + path + "'");
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    // nlohmann reports the offending byte; keep it and name the file.
    throw ValidationError("malformed scenario file '" + path + "': " + e.what());
  }
  try {
    return parse_scenario_json(doc);
  } catch (const ValidationError& e) {
    throw ValidationError("scenario file '" + path + "': " + e.what());
  }
}

nlohmann::ordered_json ResultRecord::to_json() const {
  nlohmann::ordered_json doc;
  doc["schema_version"] = schema_version;
  doc["command"] = command;
  doc["inputs"] = inputs;
  doc["outputs"] = outputs;
  doc["diagnostics"] = diagnostics;
  return doc;
}

ResultRecord ResultRecord::from_json(const nlohmann::ordered_json& doc) {
  ResultRecord record;
  try {
    record.schema_version = doc.at("schema_version").get<std::string>();
    record.command = doc.at("command").get<std::string>();
    record.inputs = doc.at("inputs");
    record.outputs = doc.at("outputs");
    record.diagnostics = doc.at("diagnostics");
  } catch (const nlohmann::ordered_json::exception& e) {
    throw ValidationError(std::string("malformed result record: ") + e.what());
  }
  if (record.schema_version != kResultSchema) {
    throw ValidationError("unsupported result schema '" + record.schema_version + "'");
  }
  return record;
}

}  // namespace pab
