// Command-line front end for the experiment runner and the analytic solvers.
//
// Exit codes: 0 success, 1 validation error, 2 runtime failure.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "aoi/analysis.hpp"
#include "aoi/config.hpp"
#include "aoi/experiments.hpp"
#include "aoi/mdp.hpp"

namespace {

using aoi::Json;

struct Overrides {
  std::string config;
  std::optional<double> lambda;
  std::optional<double> p;
  std::optional<std::int64_t> tau;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> runs;
  std::optional<std::int64_t> requests;
  std::optional<std::string> trace;
  std::optional<double> slot_duration;
  std::optional<std::string> out;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "JSON config file")->check(CLI::ExistingFile);
  cmd->add_option("--lambda", o.lambda, "Request arrival rate");
  cmd->add_option("--p", o.p, "Update cost");
  cmd->add_option("--tau", o.tau, "Threshold");
  cmd->add_option("--seed", o.seed, "Base seed");
  cmd->add_option("--runs", o.runs, "Runs per grid point");
  cmd->add_option("--requests", o.requests, "Requests per run");
  cmd->add_option("--trace", o.trace, "Trace file of timestamps");
  cmd->add_option("--slot-duration", o.slot_duration, "Trace seconds per slot");
  cmd->add_option("--out", o.out, "Output CSV path");
}

Json read_config(const std::string& path) {
  if (path.empty()) return Json::object();
  std::ifstream in(path);
  if (!in) throw aoi::Error("cannot open config '" + path + "'");
  try {
    auto j = Json::parse(in);
    if (!j.is_object()) throw aoi::ConfigError("", "config must be a JSON object");
    return j;
  } catch (const Json::parse_error& e) {
    throw aoi::ConfigError("", std::string("invalid JSON: ") + e.what());
  }
}

void set_update_cost(Json& j, const aoi::CostModel& fallback, double p) {
  if (!j.contains("model")) j["model"] = aoi::to_json(fallback);
  j["model"]["update_cost"] = p;
}

aoi::ExperimentSpec build_spec(Json j, aoi::ExperimentKind kind, const Overrides& o) {
  j["kind"] = aoi::to_string(kind);
  const auto defaults = aoi::default_spec(kind);
  if (o.lambda) {
    if (kind == aoi::ExperimentKind::LambdaSweep)
      j["grid"]["lambda"] = Json::array({*o.lambda});
    else
      j["arrival"]["lambda"] = *o.lambda;
  }
  if (o.p) {
    if (kind == aoi::ExperimentKind::CostSweep)
      j["grid"]["p"] = Json::array({*o.p});
    else
      set_update_cost(j, defaults.model, *o.p);
  }
  if (o.tau) {
    if (kind == aoi::ExperimentKind::ThresholdSweep)
      j["grid"]["tau"] = Json::array({*o.tau});
    else
      j["policies"] = Json::array({{{"kind", "threshold"}, {"tau", *o.tau}}});
  }
  if (o.seed) j["base_seed"] = *o.seed;
  if (o.runs) j["n_runs"] = *o.runs;
  if (o.requests) j["n_requests"] = *o.requests;
  if (o.trace) j["arrival"]["trace"] = *o.trace;
  if (o.slot_duration) j["arrival"]["slot_duration"] = *o.slot_duration;
  if (o.out) j["output_path"] = *o.out;
  return aoi::spec_from_json(j);
}

void run_and_emit(const aoi::ExperimentSpec& spec) {
  const auto table = aoi::run_experiment(spec);
  aoi::emit(table, spec, spec.output_path);
  std::cout << "wrote " << table.rows.size() << " rows to " << spec.output_path << " (metadata "
            << aoi::sidecar_path(spec.output_path) << ")\n"
            << table.metadata.dump(2) << '\n';
}

aoi::CostModel model_from(const Json& j, const Overrides& o, double default_p) {
  Json m = j.contains("model") ? j["model"] : aoi::to_json(aoi::CostModel::linear(default_p));
  if (o.p) m["update_cost"] = *o.p;
  return aoi::cost_model_from_json(m, "model");
}

double lambda_from(const Json& j, const Overrides& o, double fallback) {
  if (o.lambda) return *o.lambda;
  if (auto it = j.find("lambda"); it != j.end()) return aoi::detail::as_number(*it, "lambda");
  return fallback;
}

int solve_mdp(const Overrides& o, std::optional<double> discount, std::optional<std::int64_t> state_cap) {
  const Json j = read_config(o.config);
  aoi::MdpConfig c{lambda_from(j, o, 0.1), model_from(j, o, 100)};
  if (auto it = j.find("state_cap"); it != j.end()) c.state_cap = aoi::detail::as_integer(*it, "state_cap");
  if (auto it = j.find("discount"); it != j.end()) c.discount = aoi::detail::as_number(*it, "discount");
  if (auto it = j.find("tolerance"); it != j.end()) c.tolerance = aoi::detail::as_number(*it, "tolerance");
  if (auto it = j.find("max_iterations"); it != j.end())
    c.max_iterations = aoi::detail::as_integer(*it, "max_iterations");
  if (discount) c.discount = *discount;
  if (state_cap) c.state_cap = *state_cap;

  const bool discounted = c.discount > 0.0;
  const auto sol = discounted ? aoi::solve_discounted(c) : aoi::solve_average(c);
  Json out{{"criterion", discounted ? "discounted" : "average"},
           {"lambda", c.lambda},
           {"model", aoi::to_json(c.model)},
           {"state_cap", c.state_cap},
           {"threshold", sol.threshold},
           {"cap_threshold", c.model.cap_threshold()},
           {"iterations", sol.iterations_used},
           {"residual", sol.residual}};
  if (discounted)
    out["discount"] = c.discount;
  else
    out["gain"] = sol.gain;
  if (o.out) {
    std::ofstream f(*o.out);
    if (!f) throw aoi::Error("cannot open '" + *o.out + "' for writing");
    aoi::write_mdp_csv(f, sol);
    out["values_csv"] = *o.out;
  }
  std::cout << out.dump(2) << '\n';
  return 0;
}

int optimal_threshold_cmd(const Overrides& o) {
  const Json j = read_config(o.config);
  const double lambda = lambda_from(j, o, 0.1);
  const auto model = model_from(j, o, 100);
  const auto th = aoi::optimal_threshold(lambda, model);
  const auto per = aoi::optimal_period(lambda, model);
  Json out{{"lambda", lambda},
           {"model", aoi::to_json(model)},
           {"tau_star", th.tau_star},
           {"tau_continuous", th.tau_continuous},
           {"cost_at_tau_star", th.cost_at_tau_star},
           {"clamped_to_cap", th.clamped_to_cap},
           {"cap_threshold", model.cap_threshold()},
           {"d_star", per.d_star},
           {"d_continuous", per.d_continuous},
           {"cost_at_d_star", per.cost_at_d_star}};
  if (o.tau) out["cost_at_tau"] = aoi::threshold_avg_cost(lambda, model, *o.tau);
  std::cout << out.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Age-of-information update scheduling experiments"};
  app.require_subcommand(1);

  Overrides sweep_o, cmp_o, trace_o, mdp_o, opt_o;
  auto* sweep = app.add_subcommand("sweep-threshold", "Simulated vs closed-form cost over a threshold grid");
  add_common(sweep, sweep_o);

  auto* cmp = app.add_subcommand("compare", "Compare policies over a rate or update-cost grid");
  add_common(cmp, cmp_o);
  std::string sweep_kind = "lambda";
  cmp->add_option("--sweep", sweep_kind, "Grid axis")->check(CLI::IsMember({"lambda", "cost"}));

  auto* trace = app.add_subcommand("trace-compare", "Replay a request trace under each policy");
  add_common(trace, trace_o);

  auto* mdp = app.add_subcommand("solve-mdp", "Solve the average-cost or discounted MDP");
  add_common(mdp, mdp_o);
  std::optional<double> discount;
  std::optional<std::int64_t> state_cap;
  mdp->add_option("--discount", discount, "Discount factor in [0,1); omitted means average cost");
  mdp->add_option("--state-cap", state_cap, "Largest AoI state");

  auto* opt = app.add_subcommand("optimal-threshold", "Closed-form optimal threshold and period");
  add_common(opt, opt_o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*sweep) {
      run_and_emit(build_spec(read_config(sweep_o.config), aoi::ExperimentKind::ThresholdSweep, sweep_o));
    } else if (*cmp) {
      Json j = read_config(cmp_o.config);
      auto kind = sweep_kind == "cost" ? aoi::ExperimentKind::CostSweep : aoi::ExperimentKind::LambdaSweep;
      // A config that names its own comparison kind wins unless --sweep was given.
      if (cmp->count("--sweep") == 0 && j.contains("kind") && j["kind"].is_string()) {
        const auto k = aoi::experiment_kind_from_string(j["kind"].get<std::string>());
        if (k == aoi::ExperimentKind::CostSweep || k == aoi::ExperimentKind::LambdaSweep) kind = k;
      }
      run_and_emit(build_spec(std::move(j), kind, cmp_o));
    } else if (*trace) {
      run_and_emit(build_spec(read_config(trace_o.config), aoi::ExperimentKind::TraceCompare, trace_o));
    } else if (*mdp) {
      return solve_mdp(mdp_o, discount, state_cap);
    } else if (*opt) {
      return optimal_threshold_cmd(opt_o);
    }
  } catch (const aoi::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
