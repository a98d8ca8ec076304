#pragma once

// Internal helpers for reading JSON documents with field-path error messages.

#include <string>
#include <string_view>

#include <json.hpp>

#include "agentir/core.hpp"

namespace agentir::detail {

using nlohmann::json;

[[noreturn]] inline void schema_error(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::Schema, "schema error at " + path + ": " + what);
}

inline std::string join(const std::string& path, std::string_view key) {
  return path + "." + std::string(key);
}
inline std::string join(const std::string& path, std::size_t index) {
  return path + "[" + std::to_string(index) + "]";
}

inline const json& field(const json& obj, std::string_view key, const std::string& path) {
  if (!obj.is_object()) schema_error(path, "expected object");
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(join(path, key), "missing field");
  return *it;
}

inline const json* optional_field(const json& obj, std::string_view key, const std::string& path) {
  if (!obj.is_object()) schema_error(path, "expected object");
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

inline double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) schema_error(path, "expected number");
  return j.get<double>();
}

inline double as_probability(const json& j, const std::string& path) {
  double p = as_number(j, path);
  if (!(p >= 0.0 && p <= 1.0)) schema_error(path, "probability outside [0,1]");
  return p;
}

inline std::int64_t as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) schema_error(path, "expected integer");
  return j.get<std::int64_t>();
}

inline std::uint64_t as_u64(const json& j, const std::string& path) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
    schema_error(path, "expected non-negative integer");
  }
  return j.get<std::uint64_t>();
}

inline const std::string& as_string(const json& j, const std::string& path) {
  if (!j.is_string()) schema_error(path, "expected string");
  return j.get_ref<const std::string&>();
}

inline bool as_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) schema_error(path, "expected boolean");
  return j.get<bool>();
}

inline const json& as_array(const json& j, const std::string& path) {
  if (!j.is_array()) schema_error(path, "expected array");
  return j;
}

inline Degradation as_degradation(const json& j, const std::string& path) {
  auto d = try_parse_degradation(as_string(j, path));
  if (!d) schema_error(path, "unknown degradation '" + j.get<std::string>() + "'");
  return *d;
}

inline TaskKind as_task(const json& j, const std::string& path) {
  auto t = try_parse_task(as_string(j, path));
  if (!t) schema_error(path, "unknown task '" + j.get<std::string>() + "'");
  return *t;
}

inline Severity as_severity(const json& j, const std::string& path) {
  auto s = try_parse_severity(as_string(j, path));
  if (!s) schema_error(path, "unknown severity '" + j.get<std::string>() + "'");
  return *s;
}

inline Plan as_plan(const json& j, const std::string& path) {
  Plan plan;
  const auto& arr = as_array(j, path);
  for (std::size_t i = 0; i < arr.size(); ++i) plan.push_back(as_task(arr[i], join(path, i)));
  return plan;
}

inline std::vector<Degradation> as_degradations(const json& j, const std::string& path) {
  std::vector<Degradation> out;
  const auto& arr = as_array(j, path);
  for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(as_degradation(arr[i], join(path, i)));
  return out;
}

inline json plan_json(const Plan& plan) {
  json arr = json::array();
  for (auto t : plan) arr.push_back(std::string(name(t)));
  return arr;
}

inline json degradations_json(const std::vector<Degradation>& ds) {
  json arr = json::array();
  for (auto d : ds) arr.push_back(std::string(name(d)));
  return arr;
}

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);
json parse_json(const std::string& text, const std::string& source);
json load_json_file(const std::string& path);

}  // namespace agentir::detail
