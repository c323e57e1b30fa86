#pragma once

// Offline-optimal update schedules for a known arrival sequence.
//
// Updates are only ever placed at request slots. With slots s_1 < ... < s_M
// carrying w_k requests each, and b_0 = 0, b_i = s_i:
//   U[0] = 0
//   U[j] = p + min_{0 <= i < j} ( U[i] + sum_{i<k<j} w_k f(s_k - b_i) )
//   cost = min_i ( U[i] + sum_{k>i} w_k f(s_k - b_i) )
// Ties prefer the most recent predecessor.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <ostream>
#include <vector>

#include "aoi/arrivals.hpp"
#include "aoi/core.hpp"
#include "aoi/engine.hpp"
#include "aoi/numeric.hpp"
#include "aoi/policies.hpp"

namespace aoi {

struct OfflineSolution {
  std::vector<Slot> update_slots;
  double total_cost = 0.0;
  double per_request_cost = 0.0;
};

struct OfflineOptions {
  // Exact integer range sums for linear and quadratic staleness.
  bool use_prefix_sums = true;
  // Search only capped schedules: no request skipped at AoI >= cap threshold.
  // Capping never raises cost, so the optimum is unchanged.
  bool prune_to_capped = true;
};

namespace detail {

using Wide = __int128;

// Exact range sums of w, w*s and w*s^2 over slot indices.
class SlotMoments {
 public:
  explicit SlotMoments(const std::vector<Arrival>& e)
      : w_(e.size() + 1, 0), ws_(e.size() + 1, 0), wss_(e.size() + 1, 0) {
    for (std::size_t k = 0; k < e.size(); ++k) {
      const Wide w = e[k].count, s = e[k].slot;
      w_[k + 1] = w_[k] + w;
      ws_[k + 1] = ws_[k] + w * s;
      wss_[k + 1] = wss_[k] + w * s * s;
    }
  }

  // Sum over 1-based slot indices a..b (inclusive) of w_k f(s_k - base).
  double range(std::size_t a, std::size_t b, Slot base, bool quadratic) const {
    if (a > b) return 0.0;
    const Wide w = w_[b] - w_[a - 1], ws = ws_[b] - ws_[a - 1], B = base;
    if (!quadratic) return static_cast<double>(ws - B * w);
    const Wide wss = wss_[b] - wss_[a - 1];
    return static_cast<double>(wss - 2 * B * ws + B * B * w);
  }

 private:
  std::vector<Wide> w_, ws_, wss_;
};

inline OfflineSolution finish(const ArrivalSequence& arrivals, std::vector<Slot> slots, double cost) {
  OfflineSolution out;
  out.update_slots = std::move(slots);
  out.total_cost = cost;
  out.per_request_cost = arrivals.n_requests() > 0 ? cost / static_cast<double>(arrivals.n_requests()) : 0.0;
  return out;
}

}  // namespace detail

inline OfflineSolution offline_optimal(const ArrivalSequence& arrivals, const CostModel& model,
                                       OfflineOptions opts = {}) {
  if (arrivals.empty()) throw ValidationError("offline optimum needs at least one request");
  const auto& e = arrivals.entries();
  const std::size_t m = e.size();
  const double p = model.update_cost();
  const AoiValue cap_at = model.cap_threshold();
  const auto& f = model.staleness_fn();
  const bool closed = opts.use_prefix_sums && (f.is_linear() || f.is_quadratic());
  const detail::SlotMoments moments(closed ? e : std::vector<Arrival>{});

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(m + 1, kInf);
  std::vector<std::size_t> pred(m + 1, 0);
  u[0] = 0.0;
  double best = kInf;
  std::size_t best_last = 0;

  // Push form: from each predecessor i, extend over j = i+1.. while the
  // requests skipped in between remain admissible. Later predecessors win ties.
  for (std::size_t i = 0; i <= m; ++i) {
    const Slot base = i == 0 ? 0 : e[i - 1].slot;
    CompensatedSum running;  // sum_{i<k<j} w_k f(s_k - base)
    bool tail_ok = true;
    for (std::size_t j = i + 1; j <= m; ++j) {
      const double skipped = closed ? moments.range(i + 1, j - 1, base, f.is_quadratic()) : running.value();
      const double c = u[i] + skipped + p;
      if (c <= u[j]) {
        u[j] = c;
        pred[j] = i;
      }
      if (opts.prune_to_capped && e[j - 1].slot - base >= cap_at) {
        tail_ok = false;
        break;
      }
      if (!closed) running.add(static_cast<double>(e[j - 1].count) * model.staleness(e[j - 1].slot - base));
    }
    if (!tail_ok) continue;
    const double c = u[i] + (closed ? moments.range(i + 1, m, base, f.is_quadratic()) : running.value());
    if (c <= best) {
      best = c;
      best_last = i;
    }
  }

  std::vector<Slot> slots;
  for (std::size_t j = best_last; j != 0; j = pred[j]) slots.push_back(e[j - 1].slot);
  std::reverse(slots.begin(), slots.end());
  return detail::finish(arrivals, std::move(slots), best);
}

inline constexpr std::size_t kBruteForceLimit = 22;

// Engine cost of every subset of request slots. Ties prefer fewer updates, then
// the lexicographically earliest schedule.
inline OfflineSolution brute_force_optimal(const ArrivalSequence& arrivals, const CostModel& model) {
  const auto slots = arrivals.request_slots();
  const std::size_t m = slots.size();
  if (m > kBruteForceLimit) throw TooLarge(m, kBruteForceLimit);
  double best = std::numeric_limits<double>::infinity();
  std::vector<Slot> best_sched;
  std::vector<Slot> sched;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    sched.clear();
    for (std::size_t k = 0; k < m; ++k)
      if (mask >> k & 1U) sched.push_back(slots[k]);
    const double c =
        simulate(Policy::scheduled(sched), arrivals, model, {.record_intervals = false}).breakdown.total();
    const bool better = c < best || (c == best && (sched.size() < best_sched.size() ||
                                                   (sched.size() == best_sched.size() && sched < best_sched)));
    if (better) {
      best = c;
      best_sched = sched;
    }
  }
  return detail::finish(arrivals, std::move(best_sched), best);
}

inline void write_offline_csv(std::ostream& os, const OfflineSolution& sol) {
  os << "slot\n";
  for (Slot s : sol.update_slots) os << s << '\n';
  os << "# n_updates=" << sol.update_slots.size() << ",total_cost=" << format_double(sol.total_cost)
     << ",per_request_cost=" << format_double(sol.per_request_cost) << '\n';
}

}  // namespace aoi
