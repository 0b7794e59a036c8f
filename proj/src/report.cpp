#include "fcc/report.hpp"

#include <cmath>

namespace fcc {

namespace {

using nlohmann::json;

void finite(double value, const char* field) {
  if (!std::isfinite(value)) {
    throw Error(ErrorKind::Argument, std::string("report field '") + field + "' is not finite");
  }
}

void check_numbers(const json& j, const std::string& path) {
  if (j.is_number_float()) {
    finite(j.get<double>(), path.c_str());
  } else if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) check_numbers(it.value(), path + "." + it.key());
  } else if (j.is_array()) {
    for (const auto& item : j) check_numbers(item, path);
  }
}

template <typename T>
json optional_json(const std::optional<T>& value) {
  return value ? json(*value) : json(nullptr);
}

template <typename T>
std::optional<T> optional_from(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (v.is_null()) return std::nullopt;
  return v.get<T>();
}

}  // namespace

json clustering_json(const Clustering& c) {
  return json(std::vector<Label>(c.labels().begin(), c.labels().end()));
}

Clustering clustering_from_json(const json& j) {
  if (!j.is_array()) throw Error(ErrorKind::MalformedInput, "clustering must be a label array");
  std::vector<std::int64_t> raw;
  for (const auto& v : j) {
    if (!v.is_number_integer()) throw Error(ErrorKind::MalformedInput, "labels must be integers");
    raw.push_back(v.get<std::int64_t>());
  }
  return Clustering::from_labels(raw);
}

json to_json(const RunReport& r) {
  finite(r.objective, "objective");
  if (r.gamma_emp) finite(*r.gamma_emp, "gamma_emp");
  if (r.rho_emp) finite(*r.rho_emp, "rho_emp");
  if (r.wall_ms) finite(*r.wall_ms, "wall_ms");
  check_numbers(r.params, "params");
  check_numbers(r.peaks, "peaks");
  check_numbers(r.details, "details");
  json solution = json::array();
  for (const auto& c : r.solution) solution.push_back(clustering_json(c));
  json j;
  j["algorithm"] = r.algorithm;
  j["k"] = r.k;
  j["seed"] = r.seed;
  j["backend"] = r.backend;
  j["params"] = r.params;
  j["objective"] = r.objective;
  j["verified_objective"] = optional_json(r.verified_objective);
  j["candidates"] = {{"generated", r.candidates}, {"distinct", r.candidates_distinct},
                     {"evaluated", r.evaluated}};
  j["peaks"] = r.peaks;
  j["empirical"] = {{"gamma", optional_json(r.gamma_emp)}, {"rho", optional_json(r.rho_emp)}};
  j["wall_ms"] = optional_json(r.wall_ms);
  j["details"] = r.details;
  j["solution"] = std::move(solution);
  return j;
}

RunReport report_from_json(const json& j) {
  try {
    RunReport r;
    r.algorithm = j.at("algorithm").get<std::string>();
    r.k = j.at("k").get<std::size_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.backend = j.at("backend").get<std::string>();
    r.params = j.at("params");
    r.objective = j.at("objective").get<double>();
    r.verified_objective = optional_from<std::uint64_t>(j, "verified_objective");
    const auto& cand = j.at("candidates");
    r.candidates = cand.at("generated").get<std::size_t>();
    r.candidates_distinct = cand.at("distinct").get<std::size_t>();
    r.evaluated = cand.at("evaluated").get<std::uint64_t>();
    r.peaks = j.at("peaks");
    r.gamma_emp = optional_from<double>(j.at("empirical"), "gamma");
    r.rho_emp = optional_from<double>(j.at("empirical"), "rho");
    r.wall_ms = optional_from<double>(j, "wall_ms");
    r.details = j.at("details");
    for (const auto& c : j.at("solution")) r.solution.push_back(clustering_from_json(c));
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::MalformedInput, std::string("bad report: ") + e.what());
  }
}

json error_json(ErrorKind kind, const std::string& message) {
  return {{"error", {{"kind", std::string(to_string(kind))}, {"message", message}}}};
}

json error_json(const Error& error) { return error_json(error.kind(), error.what()); }

}  // namespace fcc
