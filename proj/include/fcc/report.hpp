#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fcc/clustering.hpp"
#include "fcc/error.hpp"

namespace fcc {

/// Machine-readable summary of one run. Optional fields are emitted as null.
struct RunReport {
  std::string algorithm;
  std::size_t k = 1;
  std::uint64_t seed = 0;
  std::string backend;
  nlohmann::json params = nlohmann::json::object();
  /// Objective as computed by the algorithm (exact offline, estimated when
  /// streaming).
  double objective = 0.0;
  /// Objective of the solution re-evaluated against the full input.
  std::optional<std::uint64_t> verified_objective;
  std::size_t candidates = 0;
  std::size_t candidates_distinct = 0;
  std::uint64_t evaluated = 0;
  nlohmann::json peaks = nlohmann::json::object();
  std::optional<double> gamma_emp;
  std::optional<double> rho_emp;
  std::optional<double> wall_ms;
  nlohmann::json details = nlohmann::json::object();
  std::vector<Clustering> solution;

  friend bool operator==(const RunReport&, const RunReport&) = default;
};

/// Throws Argument when a numeric field is not finite.
nlohmann::json to_json(const RunReport& report);
RunReport report_from_json(const nlohmann::json& j);

nlohmann::json error_json(const Error& error);
nlohmann::json error_json(ErrorKind kind, const std::string& message);

nlohmann::json clustering_json(const Clustering& c);
Clustering clustering_from_json(const nlohmann::json& j);

}  // namespace fcc
