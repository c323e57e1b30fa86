#pragma once

// Time, Age-of-Information and the cost model shared by every other module.
//
// Slots are indexed from 1. The AoI at slot 1 is 1, grows by one per slot and
// drops to 0 at the end of any slot in which the server refreshes its copy.

#include <cmath>
#include <cstdint>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "aoi/error.hpp"

namespace aoi {

using Slot = std::int64_t;     // >= 1
using AoiValue = std::int64_t;  // >= 0

inline constexpr AoiValue aoi_step(AoiValue prev, bool updated) noexcept {
  return updated ? 0 : prev + 1;
}

namespace staleness {

struct Linear {};
struct Quadratic {};

// Dense table indexed by AoI, values[0] == 0. Past the last index the final
// value is held.
struct Table {
  std::vector<double> values;
};

// Step function: f(x) is the value of the last breakpoint with at <= x, or 0
// before the first breakpoint.
struct Piecewise {
  struct Breakpoint {
    AoiValue at;
    double value;
  };
  std::vector<Breakpoint> breakpoints;
};

}  // namespace staleness

class StalenessFn {
 public:
  using Variant = std::variant<staleness::Linear, staleness::Quadratic, staleness::Table, staleness::Piecewise>;

  StalenessFn() = default;
  StalenessFn(staleness::Linear v) : fn_(v) {}
  StalenessFn(staleness::Quadratic v) : fn_(v) {}
  StalenessFn(staleness::Table v) : fn_(std::move(v)) { validate(); }
  StalenessFn(staleness::Piecewise v) : fn_(std::move(v)) { validate(); }

  static StalenessFn linear() { return StalenessFn(staleness::Linear{}); }
  static StalenessFn quadratic() { return StalenessFn(staleness::Quadratic{}); }
  static StalenessFn table(std::vector<double> values) { return StalenessFn(staleness::Table{std::move(values)}); }

  double operator()(AoiValue aoi) const {
    if (aoi <= 0) return 0.0;
    return std::visit(
        [aoi](const auto& f) -> double {
          using F = std::decay_t<decltype(f)>;
          const auto x = static_cast<double>(aoi);
          if constexpr (std::is_same_v<F, staleness::Linear>) {
            return x;
          } else if constexpr (std::is_same_v<F, staleness::Quadratic>) {
            return x * x;
          } else if constexpr (std::is_same_v<F, staleness::Table>) {
            const auto i = static_cast<std::size_t>(aoi);
            return i < f.values.size() ? f.values[i] : f.values.back();
          } else {
            double v = 0.0;
            for (const auto& bp : f.breakpoints) {
              if (bp.at > aoi) break;
              v = bp.value;
            }
            return v;
          }
        },
        fn_);
  }

  // Sum of f(t) for t = 1..n (0 when n <= 0).
  double prefix_sum(AoiValue n) const {
    if (n <= 0) return 0.0;
    const auto x = static_cast<double>(n);
    if (is_linear()) return x * (x + 1.0) / 2.0;
    if (is_quadratic()) return x * (x + 1.0) * (2.0 * x + 1.0) / 6.0;
    double s = 0.0;
    for (AoiValue t = 1; t <= n; ++t) s += (*this)(t);
    return s;
  }

  // Index past which f is constant, or -1 when f grows without bound.
  AoiValue constant_from() const {
    if (const auto* t = std::get_if<staleness::Table>(&fn_)) return static_cast<AoiValue>(t->values.size()) - 1;
    if (const auto* p = std::get_if<staleness::Piecewise>(&fn_))
      return p->breakpoints.empty() ? 0 : p->breakpoints.back().at;
    return -1;
  }

  bool is_linear() const noexcept { return std::holds_alternative<staleness::Linear>(fn_); }
  bool is_quadratic() const noexcept { return std::holds_alternative<staleness::Quadratic>(fn_); }
  const Variant& variant() const noexcept { return fn_; }

  std::string kind() const {
    switch (fn_.index()) {
      case 0: return "linear";
      case 1: return "quadratic";
      case 2: return "table";
      default: return "piecewise";
    }
  }

 private:
  void validate() const {
    if (const auto* t = std::get_if<staleness::Table>(&fn_)) {
      if (t->values.empty()) throw ValidationError("staleness table is empty");
      if (t->values[0] != 0.0) throw ValidationError("staleness table must start with f(0) = 0");
      for (std::size_t i = 1; i < t->values.size(); ++i) {
        if (!std::isfinite(t->values[i]) || t->values[i] < t->values[i - 1])
          throw ValidationError("staleness table must be finite and non-decreasing (index " + std::to_string(i) +
                                ")");
      }
    } else if (const auto* p = std::get_if<staleness::Piecewise>(&fn_)) {
      double prev_value = 0.0;
      AoiValue prev_at = 0;
      for (const auto& bp : p->breakpoints) {
        if (bp.at <= prev_at) throw ValidationError("piecewise breakpoints must be strictly increasing and >= 1");
        if (!std::isfinite(bp.value) || bp.value < prev_value)
          throw ValidationError("piecewise values must be finite and non-decreasing");
        prev_at = bp.at;
        prev_value = bp.value;
      }
    }
  }

  Variant fn_ = staleness::Linear{};
};

// Staleness function f plus constant update cost p. The cap threshold
// min{x : f(x) >= p} is computed once at construction.
class CostModel {
 public:
  CostModel(StalenessFn staleness, double update_cost) : staleness_(std::move(staleness)), update_cost_(update_cost) {
    if (!(update_cost > 0.0) || !std::isfinite(update_cost))
      throw ValidationError("update cost must be positive and finite, got " + std::to_string(update_cost));
    cap_ = find_cap();
  }

  static CostModel linear(double p) { return {StalenessFn::linear(), p}; }
  static CostModel quadratic(double p) { return {StalenessFn::quadratic(), p}; }

  double staleness(AoiValue aoi) const { return staleness_(aoi); }
  double update_cost() const noexcept { return update_cost_; }
  AoiValue cap_threshold() const noexcept { return cap_; }
  const StalenessFn& staleness_fn() const noexcept { return staleness_; }

 private:
  AoiValue find_cap() const {
    const AoiValue flat = staleness_.constant_from();
    for (AoiValue x = 1;; ++x) {
      if (staleness_(x) >= update_cost_) return x;
      if (flat >= 0 && x >= flat) throw NoCapExists();
    }
  }

  StalenessFn staleness_;
  double update_cost_;
  AoiValue cap_ = 1;
};

inline double staleness_cost(const CostModel& model, AoiValue aoi) { return model.staleness(aoi); }
inline AoiValue cap_threshold(const CostModel& model) noexcept { return model.cap_threshold(); }

struct CostBreakdown {
  double total_staleness = 0.0;
  double total_update = 0.0;
  std::int64_t n_requests = 0;
  std::int64_t n_updates = 0;

  double total() const noexcept { return total_staleness + total_update; }
};

}  // namespace aoi
