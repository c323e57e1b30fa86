#pragma once

// Discrete-time replay of a policy against an arrival sequence.
//
// Within a slot: arrivals are observed with the pre-decision AoI, the policy
// decides, an update (if any) fires before the replies so the slot's requests
// are charged zero staleness, and the AoI then steps. Updates are counted up to
// the slot of the last request.

#include <cstdint>
#include <limits>
#include <ostream>
#include <span>
#include <vector>

#include "aoi/arrivals.hpp"
#include "aoi/core.hpp"
#include "aoi/numeric.hpp"
#include "aoi/policies.hpp"

namespace aoi {

// Slots between consecutive updates, closed by the update slot.
struct RenewalInterval {
  std::int64_t n_requests;
  double total_cost;
  Slot length;
};

// One slot in which something happened.
struct SlotEvent {
  Slot slot;
  std::int64_t requests;
  AoiValue aoi;            // pre-decision AoI
  bool updated;
  double charged_staleness;  // per request
};

struct SimOptions {
  bool record_intervals = true;
  bool record_events = false;
};

struct SimResult {
  CostBreakdown breakdown;
  double avg_total = 0.0;
  double avg_staleness = 0.0;
  double avg_update = 0.0;
  std::vector<RenewalInterval> renewal_intervals;
  std::vector<SlotEvent> events;
};

namespace detail {

// Smallest slot >= from at which a proactive policy updates.
inline Slot next_proactive_update(const Policy& pol, Slot from) {
  constexpr Slot kNever = std::numeric_limits<Slot>::max();
  if (const auto* p = std::get_if<policy::Periodic>(&pol.variant())) return ((from + p->d - 1) / p->d) * p->d;
  if (const auto* s = std::get_if<policy::Scheduled>(&pol.variant())) {
    auto it = std::lower_bound(s->slots.begin(), s->slots.end(), from);
    return it == s->slots.end() ? kNever : *it;
  }
  return kNever;
}

}  // namespace detail

inline SimResult simulate(const Policy& pol, const ArrivalSequence& arrivals, const CostModel& model,
                          SimOptions opts = {}) {
  SimResult r;
  const double p = model.update_cost();
  const bool reactive = pol.is_reactive();

  CompensatedSum staleness_sum;
  Slot last_update = 0;  // AoI before the decision at slot t is t - last_update
  std::int64_t interval_requests = 0;
  CompensatedSum interval_cost;

  auto do_update = [&](Slot t) {
    ++r.breakdown.n_updates;
    if (opts.record_intervals)
      r.renewal_intervals.push_back({interval_requests, interval_cost.value() + p, t - last_update});
    interval_requests = 0;
    interval_cost = {};
    last_update = t;
  };

  auto entry = arrivals.entries().begin();
  const auto entries_end = arrivals.entries().end();
  Slot t = 1;
  while (entry != entries_end) {
    if (!reactive) {
      // Proactive updates in request-free slots before the next request.
      for (Slot u = detail::next_proactive_update(pol, t); u < entry->slot;
           u = detail::next_proactive_update(pol, u + 1)) {
        if (opts.record_events) r.events.push_back({u, 0, u - last_update, true, 0.0});
        do_update(u);
      }
    }
    t = entry->slot;
    const AoiValue aoi = t - last_update;
    const bool update = decide(pol, model, {aoi, t, true});
    const double charge = update ? 0.0 : model.staleness(aoi);
    const auto n = entry->count;
    r.breakdown.n_requests += n;
    interval_requests += n;
    if (!update) {
      staleness_sum.add(charge * static_cast<double>(n));
      interval_cost.add(charge * static_cast<double>(n));
    }
    if (opts.record_events) r.events.push_back({t, n, aoi, update, charge});
    if (update) do_update(t);
    ++entry;
    ++t;
  }

  r.breakdown.total_staleness = staleness_sum.value();
  r.breakdown.total_update = p * static_cast<double>(r.breakdown.n_updates);
  if (r.breakdown.n_requests > 0) {
    const auto n = static_cast<double>(r.breakdown.n_requests);
    r.avg_staleness = r.breakdown.total_staleness / n;
    r.avg_update = r.breakdown.total_update / n;
    r.avg_total = r.avg_staleness + r.avg_update;
  }
  return r;
}

struct SweepResult {
  std::vector<SimResult> per_run;
  std::vector<std::uint64_t> seeds;
  double mean_avg_total = 0.0;
  double stderr_ = 0.0;
  double mean_avg_staleness = 0.0;
  double mean_avg_update = 0.0;
};

// Evaluates one policy on a fixed set of sample paths. Runs share the paths
// with any other policy evaluated on the same span.
inline SweepResult simulate_paths(const Policy& pol, std::span<const ArrivalSequence> paths, const CostModel& model) {
  SweepResult out;
  out.per_run.reserve(paths.size());
  std::vector<double> totals, stal, upd;
  for (const auto& path : paths) {
    out.per_run.push_back(simulate(pol, path, model, {.record_intervals = false}));
    totals.push_back(out.per_run.back().avg_total);
    stal.push_back(out.per_run.back().avg_staleness);
    upd.push_back(out.per_run.back().avg_update);
  }
  const auto t = mean_stderr(totals);
  out.mean_avg_total = t.mean;
  out.stderr_ = t.stderr_;
  out.mean_avg_staleness = mean_stderr(stal).mean;
  out.mean_avg_update = mean_stderr(upd).mean;
  return out;
}

// Run i uses seed derive_seed(source.seed, i).
inline std::vector<ArrivalSequence> bernoulli_paths(const BernoulliSource& source, std::int64_t n_runs,
                                                    std::int64_t n_requests_per_run) {
  if (n_runs < 1) throw ValidationError("n_runs must be >= 1");
  std::vector<ArrivalSequence> paths;
  paths.reserve(static_cast<std::size_t>(n_runs));
  for (std::int64_t i = 0; i < n_runs; ++i)
    paths.push_back(generate_bernoulli({source.rate, derive_seed(source.seed, static_cast<std::uint64_t>(i))},
                                       StopAtRequests{n_requests_per_run}));
  return paths;
}

inline SweepResult simulate_many(const Policy& pol, const BernoulliSource& source, std::int64_t n_runs,
                                 std::int64_t n_requests_per_run, const CostModel& model) {
  const auto paths = bernoulli_paths(source, n_runs, n_requests_per_run);
  auto out = simulate_paths(pol, paths, model);
  for (std::int64_t i = 0; i < n_runs; ++i) out.seeds.push_back(derive_seed(source.seed, static_cast<std::uint64_t>(i)));
  return out;
}

struct RenewalStats {
  double mean_requests_per_interval;
  double mean_cost_per_interval;
  std::size_t n_intervals;
};

// Sample means over completed renewal intervals; the trailing partial interval
// is never recorded.
inline RenewalStats renewal_stats(const SimResult& result) {
  const auto& iv = result.renewal_intervals;
  if (iv.empty()) throw NoCompletedInterval();
  CompensatedSum req, cost;
  for (const auto& i : iv) {
    req.add(static_cast<double>(i.n_requests));
    cost.add(i.total_cost);
  }
  const auto n = static_cast<double>(iv.size());
  return {req.value() / n, cost.value() / n, iv.size()};
}

inline void write_sim_header(std::ostream& os) {
  os << "policy,params,lambda,p,avg_total,avg_staleness,avg_update,n_requests,n_updates,seed\n";
}

inline void write_sim_row(std::ostream& os, const Policy& pol, double lambda, double p, const SimResult& r,
                          std::uint64_t seed) {
  os << pol.kind() << ',' << pol.params() << ',' << format_double(lambda) << ',' << format_double(p) << ','
     << format_double(r.avg_total) << ',' << format_double(r.avg_staleness) << ',' << format_double(r.avg_update)
     << ',' << r.breakdown.n_requests << ',' << r.breakdown.n_updates << ',' << seed << '\n';
}

}  // namespace aoi
