#pragma once

// Closed-form average costs under Bernoulli(lambda) requests, and the optimal
// threshold and period derived from them.

#include <algorithm>
#include <cmath>
#include <limits>

#include "aoi/arrivals.hpp"
#include "aoi/core.hpp"

namespace aoi {

// Long-run average cost per request of the threshold policy with threshold tau:
//   (lambda * sum_{t=1}^{tau-1} f(t) + p) / (lambda * (tau - 1) + 1)
inline double threshold_avg_cost(double lambda, const CostModel& model, AoiValue tau) {
  check_rate(lambda);
  if (tau < 1) throw ValidationError("tau must be >= 1");
  const double num = lambda * model.staleness_fn().prefix_sum(tau - 1) + model.update_cost();
  const double den = lambda * static_cast<double>(tau - 1) + 1.0;
  return num / den;
}

struct RenewalExpectations {
  double e_requests;  // expected requests per update interval
  double e_cost;      // expected cost per update interval
};

inline RenewalExpectations renewal_expectations(double lambda, const CostModel& model, AoiValue tau) {
  if (tau < 1) throw ValidationError("tau must be >= 1");
  return {lambda * static_cast<double>(tau - 1) + 1.0,
          model.update_cost() + lambda * model.staleness_fn().prefix_sum(tau - 1)};
}

// Periodic policy with period d: (p + lambda * sum_{t=1}^{d-1} f(t)) / (lambda * d).
// For non-linear f this generalization is derived, not a published result.
inline double periodic_avg_cost(double lambda, const CostModel& model, Slot d) {
  check_rate(lambda);
  if (d < 1) throw ValidationError("period d must be >= 1");
  return (model.update_cost() + lambda * model.staleness_fn().prefix_sum(d - 1)) /
         (lambda * static_cast<double>(d));
}

struct ThresholdSolution {
  AoiValue tau_star;
  double tau_continuous;
  double cost_at_tau_star;
  bool clamped_to_cap;
};

struct PeriodSolution {
  Slot d_star;
  double d_continuous;
  double cost_at_d_star;
};

namespace detail {

// Stationarity condition of the quadratic-staleness cost in tau:
// 1 - 6p - 6 tau + 6 tau^2 + lambda (4 tau - 1)(tau - 1)^2.
inline double quadratic_stationarity(double lambda, double p, double tau) {
  return 1.0 - 6.0 * p - 6.0 * tau + 6.0 * tau * tau + lambda * (4.0 * tau - 1.0) * (tau - 1.0) * (tau - 1.0);
}

inline double bisect_quadratic_root(double lambda, double p, double hi) {
  double lo = 1.0;
  if (quadratic_stationarity(lambda, p, lo) >= 0.0) return lo;
  while (quadratic_stationarity(lambda, p, hi) < 0.0) hi *= 2.0;
  while (hi - lo > 1e-9) {
    const double mid = 0.5 * (lo + hi);
    (quadratic_stationarity(lambda, p, mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

// Minimizer of the real-valued relaxation of threshold_avg_cost, when a
// closed form exists (Linear, Quadratic); NaN otherwise.
inline double continuous_threshold(double lambda, const CostModel& model) {
  check_rate(lambda);
  const double p = model.update_cost();
  const auto& f = model.staleness_fn();
  if (f.is_linear()) return (std::sqrt(2.0 * p * lambda - lambda + 1.0) + lambda - 1.0) / lambda;
  if (f.is_quadratic())
    return detail::bisect_quadratic_root(lambda, p, static_cast<double>(model.cap_threshold()) + 1.0);
  return std::numeric_limits<double>::quiet_NaN();
}

// Picks the cheaper of floor/ceil of the continuous minimizer, clamped to
// [1, cap threshold]; an exhaustive integer scan over [1, cap threshold] is the
// arbiter. Ties go to the smaller tau.
inline ThresholdSolution optimal_threshold(double lambda, const CostModel& model) {
  check_rate(lambda);
  const AoiValue cap = model.cap_threshold();

  AoiValue scan_best = 1;
  double scan_cost = threshold_avg_cost(lambda, model, 1);
  for (AoiValue tau = 2; tau <= cap; ++tau) {
    const double c = threshold_avg_cost(lambda, model, tau);
    if (c < scan_cost) {
      scan_cost = c;
      scan_best = tau;
    }
  }

  const double tc = continuous_threshold(lambda, model);
  if (std::isnan(tc)) return {scan_best, tc, scan_cost, false};

  const auto clamp = [cap](double x) { return std::clamp<AoiValue>(static_cast<AoiValue>(x), 1, cap); };
  const AoiValue lo = clamp(std::floor(tc));
  const AoiValue hi = clamp(std::ceil(tc));
  const bool clamped = std::ceil(tc) > static_cast<double>(cap);
  const double c_lo = threshold_avg_cost(lambda, model, lo);
  const double c_hi = threshold_avg_cost(lambda, model, hi);
  AoiValue best = c_hi < c_lo ? hi : lo;
  double best_cost = std::min(c_lo, c_hi);
  if (scan_cost < best_cost) {
    best = scan_best;
    best_cost = scan_cost;
  }
  return {best, tc, best_cost, clamped};
}

// Integer scan upper bound for periodic policies with non-linear staleness.
inline constexpr Slot kMaxPeriodScan = 10'000'000;

inline PeriodSolution optimal_period(double lambda, const CostModel& model) {
  check_rate(lambda);
  const double p = model.update_cost();
  if (model.staleness_fn().is_linear()) {
    const double dc = std::sqrt(2.0 * p / lambda);
    const Slot lo = std::max<Slot>(1, static_cast<Slot>(std::floor(dc)));
    const Slot hi = std::max<Slot>(1, static_cast<Slot>(std::ceil(dc)));
    const double c_lo = periodic_avg_cost(lambda, model, lo);
    const double c_hi = periodic_avg_cost(lambda, model, hi);
    return c_hi < c_lo ? PeriodSolution{hi, dc, c_hi} : PeriodSolution{lo, dc, c_lo};
  }
  // The staleness part sum_{t<d} f(t) / d is the mean of f(0..d-1), which never
  // decreases, so the scan stops once it alone reaches the best cost.
  const auto& f = model.staleness_fn();
  Slot best = 1;
  double best_cost = periodic_avg_cost(lambda, model, 1);
  double prefix = 0.0;  // sum_{t=1}^{d-1} f(t)
  for (Slot d = 2; d <= kMaxPeriodScan; ++d) {
    prefix += f(d - 1);
    if (prefix / static_cast<double>(d) >= best_cost) break;
    const double c = (p + lambda * prefix) / (lambda * static_cast<double>(d));
    if (c < best_cost) {
      best_cost = c;
      best = d;
    }
  }
  return {best, std::numeric_limits<double>::quiet_NaN(), best_cost};
}

}  // namespace aoi
