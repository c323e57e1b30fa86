#pragma once

// Value-iteration solvers for the request-indexed MDP of capped reactive
// policies under Bernoulli(lambda) arrivals.
//
// State s is the AoI observed by a request. Updating costs p and the next
// request sees AoI z >= 1 with probability (1-lambda)^(z-1) lambda. Skipping
// costs f(s), is allowed only while f(s) < p, and the next request sees
// z > s with probability (1-lambda)^(z-s-1) lambda. States are truncated at
// state_cap, which absorbs the geometric tail.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <vector>

#include "aoi/core.hpp"
#include "aoi/numeric.hpp"

namespace aoi {

struct MdpConfig {
  double lambda;
  CostModel model;
  AoiValue state_cap = 1024;
  double discount = 0.0;  // discounted solver only
  double tolerance = 1e-10;
  std::size_t max_iterations = 1'000'000;
};

struct MdpSolution {
  std::vector<double> values;  // C_alpha(s) or h(s), s = 0..state_cap
  std::vector<bool> update;    // argmin action per state; exact ties skip
  double gain = 0.0;           // average-cost solver only
  AoiValue threshold = 1;
  std::size_t iterations_used = 0;
  double residual = 0.0;
};

namespace detail {

inline void validate(const MdpConfig& c, bool discounted) {
  if (!(c.lambda > 0.0 && c.lambda < 1.0)) throw ValidationError("MDP arrival rate must lie in (0, 1)");
  if (c.state_cap < c.model.cap_threshold() + 1)
    throw ValidationError("state_cap must be at least cap threshold + 1 (" +
                          std::to_string(c.model.cap_threshold() + 1) + ")");
  if (!(c.tolerance > 0.0)) throw ValidationError("tolerance must be positive");
  if (discounted && !(c.discount >= 0.0 && c.discount < 1.0)) throw ValidationError("discount must lie in [0, 1)");
}

// next[s] = sum_{z>s} P(z | s, skip) v(z) for s < cap, with the tail beyond cap
// folded into cap. next[0] is also the expectation after an update.
inline void forward_expectation(const std::vector<double>& v, double lambda, std::vector<double>& next) {
  const std::size_t cap = v.size() - 1;
  next[cap] = 0.0;
  next[cap - 1] = v[cap];
  for (std::size_t s = cap - 1; s-- > 0;) next[s] = lambda * v[s + 1] + (1.0 - lambda) * next[s + 1];
}

struct Stage {
  std::vector<double> staleness;  // f(s)
  std::vector<double> next;
};

inline Stage make_stage(const MdpConfig& c) {
  Stage st;
  const auto n = static_cast<std::size_t>(c.state_cap) + 1;
  st.staleness.resize(n);
  for (std::size_t s = 0; s < n; ++s) st.staleness[s] = c.model.staleness(static_cast<AoiValue>(s));
  st.next.resize(n);
  return st;
}

// One Bellman sweep: out[s] = min over allowed actions of cost + weight * E[v(next)].
inline void bellman(const MdpConfig& c, Stage& st, const std::vector<double>& v, double weight,
                    std::vector<double>& out, std::vector<bool>* actions) {
  forward_expectation(v, c.lambda, st.next);
  const double p = c.model.update_cost();
  const double update_value = p + weight * st.next[0];
  const auto forced_from = static_cast<std::size_t>(c.model.cap_threshold());
  for (std::size_t s = 0; s < v.size(); ++s) {
    if (s >= forced_from) {
      out[s] = update_value;
      if (actions) (*actions)[s] = true;
      continue;
    }
    const double skip_value = st.staleness[s] + weight * st.next[s];
    const bool upd = update_value < skip_value;
    out[s] = upd ? update_value : skip_value;
    if (actions) (*actions)[s] = upd;
  }
}

// Smallest s >= 1 with f(s) + w E[v | skip at s] >= p + w E[v | update],
// clamped to the cap threshold.
inline AoiValue threshold_from(const MdpConfig& c, const std::vector<double>& v, double weight) {
  std::vector<double> next(v.size());
  forward_expectation(v, c.lambda, next);
  const double rhs = c.model.update_cost() + weight * next[0];
  const AoiValue cap = c.model.cap_threshold();
  for (AoiValue s = 1; s < cap; ++s)
    if (c.model.staleness(s) + weight * next[static_cast<std::size_t>(s)] >= rhs) return s;
  return cap;
}

}  // namespace detail

inline MdpSolution solve_discounted(const MdpConfig& config) {
  detail::validate(config, true);
  auto st = detail::make_stage(config);
  const auto n = static_cast<std::size_t>(config.state_cap) + 1;
  MdpSolution sol;
  std::vector<double> v(n, 0.0), w(n);
  for (std::size_t it = 1; it <= config.max_iterations; ++it) {
    detail::bellman(config, st, v, config.discount, w, nullptr);
    double res = 0.0;
    for (std::size_t s = 0; s < n; ++s) res = std::max(res, std::abs(w[s] - v[s]));
    v.swap(w);
    sol.iterations_used = it;
    sol.residual = res;
    if (res <= config.tolerance) {
      sol.update.assign(n, false);
      detail::bellman(config, st, v, config.discount, w, &sol.update);
      sol.values = std::move(v);
      sol.threshold = detail::threshold_from(config, sol.values, config.discount);
      return sol;
    }
  }
  throw NoConvergence(sol.iterations_used, sol.residual);
}

// Relative value iteration with reference state 1: h <- T h - (T h)(1).
// Converges when the span of T h - h falls to the tolerance.
inline MdpSolution solve_average(const MdpConfig& config) {
  detail::validate(config, false);
  auto st = detail::make_stage(config);
  const auto n = static_cast<std::size_t>(config.state_cap) + 1;
  MdpSolution sol;
  std::vector<double> h(n, 0.0), th(n);
  for (std::size_t it = 1; it <= config.max_iterations; ++it) {
    detail::bellman(config, st, h, 1.0, th, nullptr);
    double lo = th[0] - h[0], hi = lo;
    for (std::size_t s = 1; s < n; ++s) {
      lo = std::min(lo, th[s] - h[s]);
      hi = std::max(hi, th[s] - h[s]);
    }
    const double ref = th[1];
    for (std::size_t s = 0; s < n; ++s) h[s] = th[s] - ref;
    sol.iterations_used = it;
    sol.residual = hi - lo;
    sol.gain = ref;
    if (sol.residual <= config.tolerance) {
      sol.update.assign(n, false);
      detail::bellman(config, st, h, 1.0, th, &sol.update);
      sol.gain = th[1] - h[1];
      sol.values = std::move(h);
      sol.threshold = detail::threshold_from(config, sol.values, 1.0);
      return sol;
    }
  }
  throw NoConvergence(sol.iterations_used, sol.residual);
}

// Threshold s* from an average-cost solution; equal to solution.threshold.
inline AoiValue extract_threshold(const MdpSolution& solution, const MdpConfig& config) {
  return detail::threshold_from(config, solution.values, 1.0);
}

inline void write_mdp_csv(std::ostream& os, const MdpSolution& sol) {
  os << "s,h(s),action\n";
  for (std::size_t s = 0; s < sol.values.size(); ++s)
    os << s << ',' << format_double(sol.values[s]) << ',' << (sol.update[s] ? "update" : "skip") << '\n';
}

}  // namespace aoi
