#pragma once

// JSON configuration records for cost models and policies.
//
//   model:  {"staleness": {"kind": "linear"|"quadratic"|"table"|"piecewise",
//                          "values": [...], "breakpoints": [[aoi, value], ...]},
//            "update_cost": p}
//   policy: {"kind": "threshold"|"naive"|"periodic"|"scheduled",
//            "tau": int, "d": int, "slots": [int, ...]}

#include <string>
#include <vector>

#include <json.hpp>

#include "aoi/core.hpp"
#include "aoi/policies.hpp"

namespace aoi {

using Json = nlohmann::json;

namespace detail {

inline const Json& require(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(path.empty() ? key : path + "." + key, "missing required field");
  return *it;
}

inline double as_number(const Json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  return j.get<double>();
}

inline std::int64_t as_integer(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
  return j.get<std::int64_t>();
}

template <typename F>
auto with_path(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const ValidationError& e) {
    throw ConfigError(path, e.what());
  }
}

}  // namespace detail

inline StalenessFn staleness_from_json(const Json& j, const std::string& path = "staleness") {
  const auto& kind_j = detail::require(j, "kind", path);
  if (!kind_j.is_string()) throw ConfigError(path + ".kind", "expected a string");
  const auto kind = kind_j.get<std::string>();
  if (kind == "linear") return StalenessFn::linear();
  if (kind == "quadratic") return StalenessFn::quadratic();
  if (kind == "table") {
    const auto& vals = detail::require(j, "values", path);
    if (!vals.is_array()) throw ConfigError(path + ".values", "expected an array");
    std::vector<double> v;
    for (std::size_t i = 0; i < vals.size(); ++i)
      v.push_back(detail::as_number(vals[i], path + ".values[" + std::to_string(i) + "]"));
    return detail::with_path(path + ".values", [&] { return StalenessFn::table(std::move(v)); });
  }
  if (kind == "piecewise") {
    const auto& bps = detail::require(j, "breakpoints", path);
    if (!bps.is_array()) throw ConfigError(path + ".breakpoints", "expected an array");
    staleness::Piecewise pw;
    for (std::size_t i = 0; i < bps.size(); ++i) {
      const auto sub = path + ".breakpoints[" + std::to_string(i) + "]";
      if (!bps[i].is_array() || bps[i].size() != 2) throw ConfigError(sub, "expected [aoi, value]");
      pw.breakpoints.push_back({detail::as_integer(bps[i][0], sub + "[0]"), detail::as_number(bps[i][1], sub + "[1]")});
    }
    return detail::with_path(path + ".breakpoints", [&] { return StalenessFn(std::move(pw)); });
  }
  throw ConfigError(path + ".kind", "unknown staleness kind '" + kind + "'");
}

inline CostModel cost_model_from_json(const Json& j, const std::string& path = "model") {
  auto f = staleness_from_json(detail::require(j, "staleness", path), path + ".staleness");
  const double p = detail::as_number(detail::require(j, "update_cost", path), path + ".update_cost");
  return detail::with_path(path, [&] { return CostModel(std::move(f), p); });
}

inline Json to_json(const StalenessFn& f) {
  Json j{{"kind", f.kind()}};
  if (const auto* t = std::get_if<staleness::Table>(&f.variant())) j["values"] = t->values;
  if (const auto* pw = std::get_if<staleness::Piecewise>(&f.variant())) {
    j["breakpoints"] = Json::array();
    for (const auto& bp : pw->breakpoints) j["breakpoints"].push_back({bp.at, bp.value});
  }
  return j;
}

inline Json to_json(const CostModel& m) { return {{"staleness", to_json(m.staleness_fn())}, {"update_cost", m.update_cost()}}; }

inline Policy policy_from_json(const Json& j, const std::string& path = "policy") {
  const auto& kind_j = detail::require(j, "kind", path);
  if (!kind_j.is_string()) throw ConfigError(path + ".kind", "expected a string");
  const auto kind = kind_j.get<std::string>();
  return detail::with_path(path, [&]() -> Policy {
    if (kind == "threshold") return Policy::threshold(detail::as_integer(detail::require(j, "tau", path), path + ".tau"));
    if (kind == "naive") return Policy::naive();
    if (kind == "periodic") return Policy::periodic(detail::as_integer(detail::require(j, "d", path), path + ".d"));
    if (kind == "scheduled") {
      const auto& s = detail::require(j, "slots", path);
      if (!s.is_array()) throw ConfigError(path + ".slots", "expected an array");
      std::vector<Slot> slots;
      for (std::size_t i = 0; i < s.size(); ++i)
        slots.push_back(detail::as_integer(s[i], path + ".slots[" + std::to_string(i) + "]"));
      return Policy::scheduled(std::move(slots));
    }
    throw ConfigError(path + ".kind", "unknown policy kind '" + kind + "'");
  });
}

inline Json to_json(const Policy& pol) {
  Json j{{"kind", pol.kind()}};
  if (const auto* t = std::get_if<policy::Threshold>(&pol.variant())) j["tau"] = t->tau;
  if (const auto* p = std::get_if<policy::Periodic>(&pol.variant())) j["d"] = p->d;
  if (const auto* s = std::get_if<policy::Scheduled>(&pol.variant())) j["slots"] = s->slots;
  return j;
}

}  // namespace aoi
