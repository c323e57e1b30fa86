#pragma once

// Configuration-driven experiments: threshold sweeps, policy comparisons over a
// rate or cost grid, and trace replays. Results go to a CSV file plus a JSON
// sidecar holding the spec, seeds and resolved parameters.
//
// Spec layout (every field except "kind" falls back to the kind's defaults):
//   {"name": "...", "kind": "threshold_sweep"|"lambda_sweep"|"cost_sweep"|"trace_compare",
//    "model": {...}, "arrival": {"lambda": x} | {"trace": path, "slot_duration": s, "strict": b},
//    "policies": "auto" | [policy, ...],
//    "grid": {"tau": [...] | {"from": a, "to": b, "step": c}, "lambda": [...], "p": [...]},
//    "n_runs": n, "n_requests": n, "base_seed": n, "output_path": path,
//    "offline_max_requests": n}

#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "aoi/analysis.hpp"
#include "aoi/arrivals.hpp"
#include "aoi/config.hpp"
#include "aoi/core.hpp"
#include "aoi/engine.hpp"
#include "aoi/numeric.hpp"
#include "aoi/offline.hpp"
#include "aoi/policies.hpp"

namespace aoi {

inline constexpr std::string_view kVersion = "0.1.0";

enum class ExperimentKind { ThresholdSweep, LambdaSweep, CostSweep, TraceCompare };

inline std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::ThresholdSweep: return "threshold_sweep";
    case ExperimentKind::LambdaSweep: return "lambda_sweep";
    case ExperimentKind::CostSweep: return "cost_sweep";
    default: return "trace_compare";
  }
}

inline ExperimentKind experiment_kind_from_string(const std::string& s, const std::string& path = "kind") {
  if (s == "threshold_sweep") return ExperimentKind::ThresholdSweep;
  if (s == "lambda_sweep") return ExperimentKind::LambdaSweep;
  if (s == "cost_sweep") return ExperimentKind::CostSweep;
  if (s == "trace_compare") return ExperimentKind::TraceCompare;
  throw ConfigError(path, "unknown experiment kind '" + s + "'");
}

struct ArrivalConfig {
  std::optional<double> lambda;
  std::string trace;
  double slot_duration = 1.0;
  bool strict = true;
};

struct ExperimentSpec {
  std::string name;
  ExperimentKind kind = ExperimentKind::ThresholdSweep;
  CostModel model = CostModel::linear(100);
  ArrivalConfig arrival;
  std::optional<std::vector<Policy>> policies;  // empty optional means "auto"
  std::int64_t n_runs = 100;
  std::int64_t n_requests = 10'000;
  std::uint64_t base_seed = 1;
  std::string output_path;
  std::vector<AoiValue> tau_grid;
  std::vector<double> lambda_grid;
  std::vector<double> cost_grid;
  std::int64_t offline_max_requests = 10'000;
};

inline ExperimentSpec default_spec(ExperimentKind kind) {
  ExperimentSpec s;
  s.kind = kind;
  s.name = to_string(kind);
  s.output_path = s.name + ".csv";
  switch (kind) {
    case ExperimentKind::ThresholdSweep:
      s.model = CostModel::linear(100);
      s.arrival.lambda = 0.1;
      for (AoiValue t = 1; t <= 100; ++t) s.tau_grid.push_back(t);
      break;
    case ExperimentKind::LambdaSweep:
      s.model = CostModel::linear(50);
      for (int i = 1; i <= 9; ++i) s.lambda_grid.push_back(i / 10.0);
      break;
    case ExperimentKind::CostSweep:
      s.model = CostModel::linear(50);
      s.arrival.lambda = 0.5;
      for (int p = 10; p <= 200; p += 10) s.cost_grid.push_back(p);
      break;
    case ExperimentKind::TraceCompare:
      s.model = CostModel::linear(25);
      s.n_runs = 1;
      s.n_requests = 1000;
      break;
  }
  return s;
}

namespace detail {

template <typename T, typename Parse>
std::vector<T> parse_grid(const Json& j, const std::string& path, Parse parse) {
  std::vector<T> out;
  if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(parse(j[i], path + "[" + std::to_string(i) + "]"));
  } else if (j.is_object()) {
    const T from = parse(require(j, "from", path), path + ".from");
    const T to = parse(require(j, "to", path), path + ".to");
    const T step = parse(require(j, "step", path), path + ".step");
    if (!(step > T{0})) throw ConfigError(path + ".step", "must be positive");
    if (to < from) throw ConfigError(path, "'to' is below 'from'");
    // Index-based so floating steps do not accumulate error.
    const auto n = static_cast<std::int64_t>(std::floor(static_cast<double>(to - from) / static_cast<double>(step) + 1e-9));
    for (std::int64_t i = 0; i <= n; ++i) out.push_back(static_cast<T>(from + static_cast<T>(i) * step));
  } else {
    throw ConfigError(path, "expected an array or {from, to, step}");
  }
  if (out.empty()) throw ConfigError(path, "grid must be non-empty");
  return out;
}

inline std::int64_t positive_integer(const Json& j, const std::string& path) {
  const auto v = as_integer(j, path);
  if (v < 1) throw ConfigError(path, "must be >= 1");
  return v;
}

inline double rate_value(const Json& j, const std::string& path) {
  const double v = as_number(j, path);
  with_path(path, [&] { check_rate(v); });
  return v;
}

inline double cost_value(const Json& j, const std::string& path) {
  const double v = as_number(j, path);
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(path, "update cost must be positive and finite");
  return v;
}

}  // namespace detail

// Checks cross-field requirements; throws ConfigError naming the field.
inline void validate(const ExperimentSpec& s) {
  if (s.n_runs < 1) throw ConfigError("n_runs", "must be >= 1");
  if (s.n_requests < 1) throw ConfigError("n_requests", "must be >= 1");
  if (s.offline_max_requests < 0) throw ConfigError("offline_max_requests", "must be >= 0");
  const auto need_lambda = [&] {
    if (!s.arrival.lambda) throw ConfigError("arrival.lambda", "missing required field");
    detail::with_path("arrival.lambda", [&] { check_rate(*s.arrival.lambda); });
  };
  switch (s.kind) {
    case ExperimentKind::ThresholdSweep:
      need_lambda();
      if (s.tau_grid.empty()) throw ConfigError("grid.tau", "grid must be non-empty");
      for (std::size_t i = 0; i < s.tau_grid.size(); ++i)
        if (s.tau_grid[i] < 1) throw ConfigError("grid.tau[" + std::to_string(i) + "]", "must be >= 1");
      break;
    case ExperimentKind::LambdaSweep:
      if (s.lambda_grid.empty()) throw ConfigError("grid.lambda", "grid must be non-empty");
      for (std::size_t i = 0; i < s.lambda_grid.size(); ++i)
        detail::with_path("grid.lambda[" + std::to_string(i) + "]", [&] { check_rate(s.lambda_grid[i]); });
      break;
    case ExperimentKind::CostSweep:
      need_lambda();
      if (s.cost_grid.empty()) throw ConfigError("grid.p", "grid must be non-empty");
      for (std::size_t i = 0; i < s.cost_grid.size(); ++i)
        if (!(s.cost_grid[i] > 0.0) || !std::isfinite(s.cost_grid[i]))
          throw ConfigError("grid.p[" + std::to_string(i) + "]", "update cost must be positive and finite");
      break;
    case ExperimentKind::TraceCompare:
      if (s.arrival.trace.empty()) throw ConfigError("arrival.trace", "missing required field");
      if (!(s.arrival.slot_duration > 0.0) || !std::isfinite(s.arrival.slot_duration))
        throw ConfigError("arrival.slot_duration", "must be positive");
      break;
  }
}

inline ExperimentSpec spec_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("", "expected an object");
  const auto& kind_j = detail::require(j, "kind", "");
  if (!kind_j.is_string()) throw ConfigError("kind", "expected a string");
  ExperimentSpec s = default_spec(experiment_kind_from_string(kind_j.get<std::string>()));

  if (auto it = j.find("name"); it != j.end()) {
    if (!it->is_string()) throw ConfigError("name", "expected a string");
    s.name = it->get<std::string>();
  }
  if (auto it = j.find("model"); it != j.end()) s.model = cost_model_from_json(*it, "model");
  if (auto it = j.find("arrival"); it != j.end()) {
    if (!it->is_object()) throw ConfigError("arrival", "expected an object");
    if (auto l = it->find("lambda"); l != it->end()) {
      s.arrival.lambda = l->is_null() ? std::nullopt : std::optional<double>(detail::rate_value(*l, "arrival.lambda"));
    }
    if (auto t = it->find("trace"); t != it->end()) {
      if (!t->is_string()) throw ConfigError("arrival.trace", "expected a string");
      s.arrival.trace = t->get<std::string>();
    }
    if (auto d = it->find("slot_duration"); d != it->end())
      s.arrival.slot_duration = detail::as_number(*d, "arrival.slot_duration");
    if (auto st = it->find("strict"); st != it->end()) {
      if (!st->is_boolean()) throw ConfigError("arrival.strict", "expected a boolean");
      s.arrival.strict = st->get<bool>();
    }
  }
  if (auto it = j.find("policies"); it != j.end()) {
    if (it->is_string()) {
      if (it->get<std::string>() != "auto") throw ConfigError("policies", "expected \"auto\" or a list");
      s.policies.reset();
    } else if (it->is_array()) {
      std::vector<Policy> pols;
      for (std::size_t i = 0; i < it->size(); ++i)
        pols.push_back(policy_from_json((*it)[i], "policies[" + std::to_string(i) + "]"));
      if (pols.empty()) throw ConfigError("policies", "list must be non-empty");
      s.policies = std::move(pols);
    } else {
      throw ConfigError("policies", "expected \"auto\" or a list");
    }
  }
  if (auto it = j.find("grid"); it != j.end()) {
    if (!it->is_object()) throw ConfigError("grid", "expected an object");
    if (auto g = it->find("tau"); g != it->end())
      s.tau_grid = detail::parse_grid<AoiValue>(*g, "grid.tau", detail::positive_integer);
    if (auto g = it->find("lambda"); g != it->end())
      s.lambda_grid = detail::parse_grid<double>(*g, "grid.lambda", detail::rate_value);
    if (auto g = it->find("p"); g != it->end()) s.cost_grid = detail::parse_grid<double>(*g, "grid.p", detail::cost_value);
  }
  if (auto it = j.find("n_runs"); it != j.end()) s.n_runs = detail::positive_integer(*it, "n_runs");
  if (auto it = j.find("n_requests"); it != j.end()) s.n_requests = detail::positive_integer(*it, "n_requests");
  if (auto it = j.find("base_seed"); it != j.end()) {
    if (!it->is_number_integer() || (it->is_number_integer() && !it->is_number_unsigned() && it->get<std::int64_t>() < 0))
      throw ConfigError("base_seed", "expected a non-negative integer");
    s.base_seed = it->get<std::uint64_t>();
  }
  if (auto it = j.find("output_path"); it != j.end()) {
    if (!it->is_string()) throw ConfigError("output_path", "expected a string");
    s.output_path = it->get<std::string>();
  }
  if (auto it = j.find("offline_max_requests"); it != j.end())
    s.offline_max_requests = detail::as_integer(*it, "offline_max_requests");
  validate(s);
  return s;
}

inline Json to_json(const ExperimentSpec& s) {
  Json arrival = Json::object();
  arrival["lambda"] = s.arrival.lambda ? Json(*s.arrival.lambda) : Json(nullptr);
  if (!s.arrival.trace.empty()) {
    arrival["trace"] = s.arrival.trace;
    arrival["slot_duration"] = s.arrival.slot_duration;
    arrival["strict"] = s.arrival.strict;
  }
  Json pols = "auto";
  if (s.policies) {
    pols = Json::array();
    for (const auto& p : *s.policies) pols.push_back(to_json(p));
  }
  Json grid = Json::object();
  if (!s.tau_grid.empty()) grid["tau"] = s.tau_grid;
  if (!s.lambda_grid.empty()) grid["lambda"] = s.lambda_grid;
  if (!s.cost_grid.empty()) grid["p"] = s.cost_grid;
  return {{"name", s.name},
          {"kind", to_string(s.kind)},
          {"model", to_json(s.model)},
          {"arrival", arrival},
          {"policies", pols},
          {"grid", grid},
          {"n_runs", s.n_runs},
          {"n_requests", s.n_requests},
          {"base_seed", s.base_seed},
          {"output_path", s.output_path},
          {"offline_max_requests", s.offline_max_requests}};
}

struct ResultRow {
  double x = 0.0;
  std::string policy;
  std::string params;
  double mean_cost = 0.0;
  double stderr_ = 0.0;
  double mean_staleness = 0.0;
  double mean_update = 0.0;
  std::optional<double> analytic_cost;
  std::uint64_t seed = 0;  // seed of the grid point; run i used derive_seed(seed, i)
};

struct ResultTable {
  std::string x_name;
  std::vector<ResultRow> rows;
  std::vector<std::uint64_t> point_seeds;
  Json metadata = Json::object();
};

namespace detail {

inline ResultRow sweep_row(double x, std::string label, const Policy& pol, const SweepResult& r, std::uint64_t seed,
                           std::optional<double> analytic) {
  return {x, std::move(label), pol.params(), r.mean_avg_total, r.stderr_, r.mean_avg_staleness, r.mean_avg_update,
          analytic, seed};
}

inline std::optional<double> analytic_cost(const Policy& pol, double lambda, const CostModel& model) {
  if (const auto* t = std::get_if<policy::Threshold>(&pol.variant())) return threshold_avg_cost(lambda, model, t->tau);
  if (std::holds_alternative<policy::Naive>(pol.variant()))
    return threshold_avg_cost(lambda, model, model.cap_threshold());
  if (const auto* p = std::get_if<policy::Periodic>(&pol.variant())) return periodic_avg_cost(lambda, model, p->d);
  return std::nullopt;
}

// Offline optimum on every path; per-path costs are exact lower bounds for
// any online policy on the same path.
inline ResultRow offline_row(double x, std::span<const ArrivalSequence> paths, const CostModel& model,
                             std::uint64_t seed) {
  std::vector<double> total, stal, upd;
  for (const auto& path : paths) {
    const auto sol = offline_optimal(path, model);
    const auto n = static_cast<double>(path.n_requests());
    const double u = model.update_cost() * static_cast<double>(sol.update_slots.size()) / n;
    total.push_back(sol.per_request_cost);
    upd.push_back(u);
    stal.push_back(sol.per_request_cost - u);
  }
  const auto t = mean_stderr(total);
  return {x, "offline", "", t.mean, t.stderr_, mean_stderr(stal).mean, mean_stderr(upd).mean, std::nullopt, seed};
}

inline bool within_3_stderr(const ResultRow& r) {
  if (!r.analytic_cost) return true;
  const double diff = std::abs(r.mean_cost - *r.analytic_cost);
  return diff <= 3.0 * r.stderr_ + 1e-9 * std::max(1.0, std::abs(*r.analytic_cost));
}

inline std::string label_of(const Policy& pol) {
  const auto params = pol.params();
  return params.empty() ? pol.kind() : pol.kind() + "(" + params + ")";
}

}  // namespace detail

inline ResultTable run_threshold_sweep(const ExperimentSpec& spec) {
  if (spec.kind != ExperimentKind::ThresholdSweep) throw ConfigError("kind", "expected threshold_sweep");
  validate(spec);
  const double lambda = *spec.arrival.lambda;
  ResultTable out;
  out.x_name = "tau";
  Json inconsistent = Json::array();
  std::optional<std::size_t> best;
  for (std::size_t k = 0; k < spec.tau_grid.size(); ++k) {
    const auto seed = derive_seed(spec.base_seed, k);
    out.point_seeds.push_back(seed);
    const auto pol = Policy::threshold(spec.tau_grid[k]);
    const auto paths = bernoulli_paths({lambda, seed}, spec.n_runs, spec.n_requests);
    const auto r = simulate_paths(pol, paths, spec.model);
    out.rows.push_back(detail::sweep_row(static_cast<double>(spec.tau_grid[k]), "threshold", pol, r, seed,
                                         threshold_avg_cost(lambda, spec.model, spec.tau_grid[k])));
    if (!detail::within_3_stderr(out.rows.back())) inconsistent.push_back(spec.tau_grid[k]);
    if (!best || *out.rows.back().analytic_cost < *out.rows[*best].analytic_cost) best = k;
  }
  out.metadata["mc_consistent"] = inconsistent.empty();
  out.metadata["mc_inconsistent_tau"] = inconsistent;
  out.metadata["analytic_min_tau"] = spec.tau_grid[*best];
  out.metadata["analytic_min_cost"] = *out.rows[*best].analytic_cost;
  const auto opt = optimal_threshold(lambda, spec.model);
  out.metadata["auto"] = {{"tau_star", opt.tau_star},
                          {"tau_continuous", opt.tau_continuous},
                          {"cost_at_tau_star", opt.cost_at_tau_star},
                          {"cap_threshold", spec.model.cap_threshold()}};
  return out;
}

inline ResultTable run_policy_comparison(const ExperimentSpec& spec) {
  if (spec.kind != ExperimentKind::LambdaSweep && spec.kind != ExperimentKind::CostSweep)
    throw ConfigError("kind", "expected lambda_sweep or cost_sweep");
  validate(spec);
  const bool by_lambda = spec.kind == ExperimentKind::LambdaSweep;
  const std::size_t n_points = by_lambda ? spec.lambda_grid.size() : spec.cost_grid.size();
  const bool with_offline = spec.n_requests <= spec.offline_max_requests;

  ResultTable out;
  out.x_name = by_lambda ? "lambda" : "p";
  Json resolved = Json::array();
  bool lower_bound_holds = true;
  for (std::size_t k = 0; k < n_points; ++k) {
    const double lambda = by_lambda ? spec.lambda_grid[k] : *spec.arrival.lambda;
    const CostModel model = by_lambda ? spec.model : CostModel(spec.model.staleness_fn(), spec.cost_grid[k]);
    const double x = by_lambda ? lambda : model.update_cost();
    const auto seed = derive_seed(spec.base_seed, k);
    out.point_seeds.push_back(seed);
    const auto paths = bernoulli_paths({lambda, seed}, spec.n_runs, spec.n_requests);

    std::vector<std::pair<std::string, Policy>> pols;
    if (spec.policies) {
      for (const auto& p : *spec.policies) pols.emplace_back(detail::label_of(p), p);
    } else {
      const auto th = optimal_threshold(lambda, model);
      const auto per = optimal_period(lambda, model);
      pols.emplace_back("threshold", Policy::threshold(th.tau_star));
      pols.emplace_back("naive", Policy::naive());
      pols.emplace_back("periodic", Policy::periodic(per.d_star));
      resolved.push_back({{out.x_name, x},
                          {"tau_star", th.tau_star},
                          {"d_star", per.d_star},
                          {"cap_threshold", model.cap_threshold()}});
    }

    const std::size_t first = out.rows.size();
    for (const auto& [label, pol] : pols)
      out.rows.push_back(detail::sweep_row(x, label, pol, simulate_paths(pol, paths, model), seed,
                                           detail::analytic_cost(pol, lambda, model)));
    if (with_offline) {
      out.rows.push_back(detail::offline_row(x, paths, model, seed));
      const double off = out.rows.back().mean_cost;
      for (std::size_t i = first; i + 1 < out.rows.size(); ++i)
        if (off > out.rows[i].mean_cost + 1e-9 * std::max(1.0, off)) lower_bound_holds = false;
    }
  }
  out.metadata["auto"] = resolved;
  out.metadata["offline_included"] = with_offline;
  if (!with_offline)
    out.metadata["offline_note"] = "offline optimum skipped: n_requests exceeds offline_max_requests";
  else
    out.metadata["offline_lower_bound_holds"] = lower_bound_holds;
  return out;
}

namespace detail {

// Cumulative average cost after each request, one row per request.
inline void append_cumulative(ResultTable& out, const std::string& label, const Policy& pol,
                              const ArrivalSequence& arrivals, const CostModel& model, std::uint64_t seed,
                              std::vector<double>& finals) {
  const auto r = simulate(pol, arrivals, model, {.record_intervals = false, .record_events = true});
  CompensatedSum stal;
  double upd = 0.0;
  std::int64_t k = 0;
  for (const auto& ev : r.events) {
    if (ev.updated) upd += model.update_cost();
    for (std::int64_t i = 0; i < ev.requests; ++i) {
      stal.add(ev.charged_staleness);
      ++k;
      const auto n = static_cast<double>(k);
      out.rows.push_back({n, label, pol.params(), (stal.value() + upd) / n, 0.0, stal.value() / n, upd / n,
                          std::nullopt, seed});
    }
  }
  finals.push_back(r.avg_total);
}

}  // namespace detail

inline ResultTable run_trace_compare(const ExperimentSpec& spec) {
  if (spec.kind != ExperimentKind::TraceCompare) throw ConfigError("kind", "expected trace_compare");
  validate(spec);
  const auto loaded = load_trace(spec.arrival.trace, spec.arrival.slot_duration, {.strict = spec.arrival.strict});
  const double lambda_hat = empirical_rate(loaded.arrivals);
  const auto prefix = loaded.arrivals.first_requests(spec.n_requests);
  const auto th = optimal_threshold(lambda_hat, spec.model);
  const auto per = optimal_period(lambda_hat, spec.model);

  std::vector<std::pair<std::string, Policy>> pols;
  if (spec.policies) {
    for (const auto& p : *spec.policies) pols.emplace_back(detail::label_of(p), p);
  } else {
    pols.emplace_back("threshold", Policy::threshold(th.tau_star));
    pols.emplace_back("naive", Policy::naive());
    pols.emplace_back("periodic", Policy::periodic(per.d_star));
  }
  const auto off = offline_optimal(prefix, spec.model);
  pols.emplace_back("offline", Policy::scheduled(off.update_slots));

  ResultTable out;
  out.x_name = "request";
  out.point_seeds.push_back(spec.base_seed);
  std::vector<double> finals;
  for (const auto& [label, pol] : pols)
    detail::append_cumulative(out, label, pol, prefix, spec.model, spec.base_seed, finals);
  // Keep "offline" rows unlabelled by schedule size for stable plotting.
  for (auto& row : out.rows)
    if (row.policy == "offline") row.params.clear();
  std::stable_sort(out.rows.begin(), out.rows.end(), [](const ResultRow& a, const ResultRow& b) { return a.x < b.x; });

  Json final_costs = Json::object();
  for (std::size_t i = 0; i < pols.size(); ++i) final_costs[pols[i].first] = finals[i];
  out.metadata["lambda_hat"] = lambda_hat;
  out.metadata["n_requests_replayed"] = prefix.n_requests();
  out.metadata["skipped_lines"] = loaded.skipped_lines.size();
  out.metadata["final_avg_cost"] = final_costs;
  out.metadata["auto"] = {{"tau_star", th.tau_star},
                          {"tau_continuous", th.tau_continuous},
                          {"d_star", per.d_star},
                          {"d_continuous", per.d_continuous},
                          {"cap_threshold", spec.model.cap_threshold()}};
  out.metadata["x_axis"] = "cumulative average cost after each request of the replayed prefix";
  out.metadata["tau_star_note"] =
      "tau_star is the integer minimizer of the closed-form threshold cost at lambda_hat; neighbouring costs: tau-1 -> " +
      format_double(threshold_avg_cost(lambda_hat, spec.model, std::max<AoiValue>(1, th.tau_star - 1))) +
      ", tau -> " + format_double(th.cost_at_tau_star);
  out.metadata["offline_note"] = "offline schedule is optimal for the whole prefix; earlier points follow that schedule";
  return out;
}

inline ResultTable run_experiment(const ExperimentSpec& spec) {
  switch (spec.kind) {
    case ExperimentKind::ThresholdSweep: return run_threshold_sweep(spec);
    case ExperimentKind::TraceCompare: return run_trace_compare(spec);
    default: return run_policy_comparison(spec);
  }
}

inline void write_csv(std::ostream& os, const ResultTable& table) {
  os << table.x_name << ",policy,params,mean_cost,stderr,mean_staleness,mean_update,analytic_cost,seed\n";
  for (const auto& r : table.rows) {
    os << format_double(r.x) << ',' << r.policy << ',' << r.params << ',' << format_double(r.mean_cost) << ','
       << format_double(r.stderr_) << ',' << format_double(r.mean_staleness) << ',' << format_double(r.mean_update)
       << ',' << (r.analytic_cost ? format_double(*r.analytic_cost) : "") << ',' << r.seed << '\n';
  }
}

inline Json sidecar_json(const ExperimentSpec& spec, const ResultTable& table) {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return {{"spec", to_json(spec)},
          {"point_seeds", table.point_seeds},
          {"seed_derivation", "point k uses derive_seed(base_seed, k); run i of a point uses derive_seed(point, i)"},
          {"rng", std::string(kRngAlgorithm)},
          {"version", std::string(kVersion)},
          {"wall_clock", stamp},
          {"rows", table.rows.size()},
          {"results", table.metadata}};
}

inline std::string sidecar_path(const std::string& csv_path) { return csv_path + ".meta.json"; }

// Writes `path` and its sidecar.
inline void emit(const ResultTable& table, const ExperimentSpec& spec, const std::string& path) {
  if (table.rows.empty()) throw ValidationError("result table is empty");
  std::ofstream csv(path);
  if (!csv) throw Error("cannot open '" + path + "' for writing");
  write_csv(csv, table);
  std::ofstream meta(sidecar_path(path));
  if (!meta) throw Error("cannot open '" + sidecar_path(path) + "' for writing");
  meta << sidecar_json(spec, table).dump(2) << '\n';
  if (!csv || !meta) throw Error("write failed for '" + path + "'");
}

inline ExperimentSpec spec_from_sidecar(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("", e.what());
  }
  return spec_from_json(detail::require(j, "spec", ""));
}

}  // namespace aoi
