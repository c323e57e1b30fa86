#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "aoi/analysis.hpp"
#include "aoi/engine.hpp"

namespace {

using aoi::ArrivalSequence;
using aoi::CostModel;
using aoi::Policy;
using aoi::Slot;

// Reference replay: visits every slot 1..last request, applying the AoI
// recursion literally and charging per request.
struct Reference {
  double staleness = 0.0;
  std::int64_t updates = 0;
};

Reference reference_replay(const Policy& pol, const ArrivalSequence& arr, const CostModel& m) {
  Reference out;
  aoi::AoiValue prev = 0;  // AoI at the end of the previous slot
  for (Slot t = 1; t <= arr.last_request_slot(); ++t) {
    const auto n = arr.count_at(t);
    const aoi::AoiValue observed = prev + 1;
    bool upd = false;
    if (n > 0 || !pol.is_reactive()) upd = aoi::decide(pol, m, {observed, t, n > 0});
    if (upd)
      ++out.updates;
    else
      out.staleness += static_cast<double>(n) * m.staleness(observed);
    prev = aoi::aoi_step(prev, upd);
  }
  return out;
}

TEST(Simulate, ThresholdOneAlwaysUpdates) {
  const auto arr = aoi::generate_bernoulli({0.3, 9}, aoi::StopAtRequests{500});
  const auto r = aoi::simulate(Policy::threshold(1), arr, CostModel::linear(7.5));
  EXPECT_DOUBLE_EQ(r.avg_total, 7.5);
  EXPECT_EQ(r.breakdown.n_updates, 500);
  EXPECT_EQ(r.breakdown.total_staleness, 0.0);
}

TEST(Simulate, NoUpdatesAoiEqualsSlot) {
  const auto r = aoi::simulate(Policy::scheduled({}), ArrivalSequence::from_slots({1, 2, 3}), CostModel::linear(10));
  EXPECT_DOUBLE_EQ(r.breakdown.total_staleness, 6.0);
  EXPECT_EQ(r.breakdown.n_updates, 0);
}

TEST(Simulate, UpdateAtRequestSlotChargesZeroStaleness) {
  // Update at 3 fires before the reply; slot 5 then sees AoI 2.
  const auto r = aoi::simulate(Policy::scheduled({3}), ArrivalSequence::from_slots({3, 5}), CostModel::linear(10),
                               {.record_events = true});
  EXPECT_DOUBLE_EQ(r.breakdown.total(), 12.0);
  ASSERT_EQ(r.events.size(), 2U);
  EXPECT_EQ(r.events[0].aoi, 3);
  EXPECT_EQ(r.events[0].charged_staleness, 0.0);
  EXPECT_EQ(r.events[1].aoi, 2);
}

TEST(Simulate, PeriodicPaysOnEmptySlotsUpToLastRequest) {
  const auto r = aoi::simulate(Policy::periodic(2), ArrivalSequence::from_slots({5}, 40), CostModel::linear(3));
  // Updates at 2 and 4; slot 5 sees AoI 1.
  EXPECT_EQ(r.breakdown.n_updates, 2);
  EXPECT_DOUBLE_EQ(r.breakdown.total(), 7.0);
}

TEST(Simulate, MultipleRequestsPerSlotShareAoi) {
  const ArrivalSequence arr(6, {{2, 3}, {6, 2}});
  const auto r = aoi::simulate(Policy::threshold(5), arr, CostModel::linear(100));
  // Slot 2: 3 x f(2); slot 6: AoI 6 >= 5 -> one update.
  EXPECT_DOUBLE_EQ(r.breakdown.total_staleness, 6.0);
  EXPECT_EQ(r.breakdown.n_updates, 1);
  EXPECT_EQ(r.breakdown.n_requests, 5);
}

TEST(Simulate, MatchesReferenceReplay) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 300; ++trial) {
    const double lambda = std::uniform_real_distribution<double>(0.02, 1.0)(rng);
    const auto m = trial % 3 == 0 ? CostModel::quadratic(40) : CostModel::linear(1.0 + (rng() % 40));
    const ArrivalSequence arr = [&] {
      auto base = aoi::generate_bernoulli({lambda, rng()}, aoi::StopAtRequests{1 + static_cast<int>(rng() % 300)});
      std::vector<aoi::Arrival> e = base.entries();
      for (auto& a : e) a.count = 1 + static_cast<std::int64_t>(rng() % 3);
      return ArrivalSequence(base.horizon(), e);
    }();
    std::vector<Policy> pols{Policy::threshold(1 + static_cast<aoi::AoiValue>(rng() % 30)), Policy::naive(),
                             Policy::periodic(1 + static_cast<Slot>(rng() % 20))};
    std::vector<Slot> sched;
    for (Slot t = 1; t <= arr.horizon(); ++t)
      if (rng() % 7 == 0) sched.push_back(t);
    pols.push_back(Policy::scheduled(sched));
    for (const auto& pol : pols) {
      const auto r = aoi::simulate(pol, arr, m);
      const auto ref = reference_replay(pol, arr, m);
      EXPECT_EQ(r.breakdown.n_updates, ref.updates) << pol.kind();
      EXPECT_NEAR(r.breakdown.total_staleness, ref.staleness, 1e-9 * (1.0 + ref.staleness)) << pol.kind();
    }
  }
}

TEST(Simulate, ConservationFromEventLog) {
  const auto m = CostModel::quadratic(30);
  const auto arr = aoi::generate_bernoulli({0.4, 3}, aoi::StopAtRequests{2000});
  for (const auto& pol : {Policy::threshold(4), Policy::periodic(3), Policy::naive()}) {
    const auto r = aoi::simulate(pol, arr, m, {.record_events = true});
    double stale = 0.0;
    std::int64_t ups = 0, reqs = 0;
    for (const auto& e : r.events) {
      stale += e.charged_staleness * static_cast<double>(e.requests);
      ups += e.updated ? 1 : 0;
      reqs += e.requests;
      if (e.updated) EXPECT_EQ(e.charged_staleness, 0.0);
      else EXPECT_EQ(e.charged_staleness, m.staleness(e.aoi));
    }
    EXPECT_EQ(ups, r.breakdown.n_updates);
    EXPECT_EQ(reqs, r.breakdown.n_requests);
    EXPECT_NEAR(stale, r.breakdown.total_staleness, 1e-9 * stale);
    EXPECT_NEAR(r.breakdown.total(), m.update_cost() * static_cast<double>(ups) + stale, 1e-9 * r.breakdown.total());
    EXPECT_NEAR(r.avg_total, r.avg_staleness + r.avg_update, 1e-12);
    EXPECT_NEAR(r.avg_total, r.breakdown.total() / static_cast<double>(r.breakdown.n_requests), 1e-12);
  }
}

TEST(Simulate, ChargedStalenessBelowThresholdCost) {
  const auto m = CostModel::linear(20);
  const auto arr = aoi::generate_bernoulli({0.3, 21}, aoi::StopAtRequests{5000});
  for (aoi::AoiValue tau = 1; tau <= m.cap_threshold(); ++tau) {
    const auto r = aoi::simulate(Policy::threshold(tau), arr, m, {.record_events = true});
    for (const auto& e : r.events) EXPECT_LT(e.charged_staleness, m.staleness(tau));
  }
}

TEST(Simulate, SingleRunNearClosedForm) {
  const auto arr = aoi::generate_bernoulli({0.1, 2024}, aoi::StopAtRequests{10'000});
  const auto r = aoi::simulate(Policy::threshold(37), arr, CostModel::linear(100));
  EXPECT_NEAR(r.avg_total, 36.217, 0.05 * 36.217);
}

TEST(Simulate, ClosedFormAgreementAtMillionRequests) {
  std::uint64_t seed = 100;
  for (double lambda : {0.2, 0.7}) {
    for (double p : {10.0, 40.0}) {
      const auto m = CostModel::linear(p);
      const auto arr = aoi::generate_bernoulli({lambda, seed++}, aoi::StopAtRequests{1'000'000});
      for (aoi::AoiValue tau : {aoi::AoiValue{2}, aoi::optimal_threshold(lambda, m).tau_star, m.cap_threshold()}) {
        const double sim = aoi::simulate(Policy::threshold(tau), arr, m, {.record_intervals = false}).avg_total;
        const double exact = aoi::threshold_avg_cost(lambda, m, tau);
        EXPECT_LT(std::abs(sim - exact), 0.005 * exact) << lambda << ' ' << p << ' ' << tau;
      }
    }
  }
}

TEST(SimulateMany, Threshold37MatchesClosedForm) {
  const auto sw = aoi::simulate_many(Policy::threshold(37), {0.1, 1}, 100, 10'000, CostModel::linear(100));
  ASSERT_EQ(sw.per_run.size(), 100U);
  EXPECT_NEAR(sw.mean_avg_total, 36.22, 0.2);
  EXPECT_LT(std::abs(sw.mean_avg_total - 36.217391304347826), 3.0 * sw.stderr_);
  double s = 0.0;
  for (const auto& r : sw.per_run) s += r.avg_total;
  EXPECT_NEAR(s / 100.0, sw.mean_avg_total, 1e-9);
}

TEST(SimulateMany, PeriodicOneCostsPOverLambda) {
  const auto sw = aoi::simulate_many(Policy::periodic(1), {0.5, 4}, 50, 10'000, CostModel::linear(50));
  // Finite runs stop at the last request, so the mean is p * horizon / N.
  EXPECT_LT(std::abs(sw.mean_avg_total - 100.0), 3.0 * sw.stderr_);
  EXPECT_NEAR(sw.mean_avg_total, 100.0, 1.0);
}

TEST(SimulateMany, ThresholdOneIsExact) {
  for (double lambda : {0.05, 0.5, 1.0}) {
    const auto sw = aoi::simulate_many(Policy::threshold(1), {lambda, 8}, 20, 1000, CostModel::linear(7));
    EXPECT_EQ(sw.mean_avg_total, 7.0);
    EXPECT_EQ(sw.stderr_, 0.0);
  }
}

TEST(SimulateMany, SeedsAreReproducible) {
  const auto a = aoi::simulate_many(Policy::threshold(5), {0.3, 99}, 5, 300, CostModel::linear(10));
  const auto b = aoi::simulate_many(Policy::threshold(5), {0.3, 99}, 5, 300, CostModel::linear(10));
  EXPECT_EQ(a.seeds, b.seeds);
  EXPECT_EQ(a.mean_avg_total, b.mean_avg_total);
  EXPECT_THROW(aoi::simulate_many(Policy::threshold(5), {0.3, 99}, 0, 300, CostModel::linear(10)),
               aoi::ValidationError);
}

TEST(RenewalStats, MeansMatchFormulas) {
  const auto arr = aoi::generate_bernoulli({0.5, 31}, aoi::StopAtRequests{400'000});
  const auto m = CostModel::linear(10);
  const auto s2 = aoi::renewal_stats(aoi::simulate(Policy::threshold(2), arr, m));
  EXPECT_NEAR(s2.mean_requests_per_interval, 1.5, 0.01);
  const auto s3 = aoi::renewal_stats(aoi::simulate(Policy::threshold(3), arr, m));
  EXPECT_NEAR(s3.mean_cost_per_interval, 10.0 + 1.5, 0.02);
  const auto e3 = aoi::renewal_expectations(0.5, m, 3);
  EXPECT_NEAR(s3.mean_cost_per_interval / s3.mean_requests_per_interval, e3.e_cost / e3.e_requests, 0.02);
}

TEST(RenewalStats, ThresholdOneIntervals) {
  const auto arr = aoi::generate_bernoulli({0.4, 2}, aoi::StopAtRequests{100});
  const auto r = aoi::simulate(Policy::threshold(1), arr, CostModel::linear(4));
  ASSERT_EQ(r.renewal_intervals.size(), 100U);
  for (const auto& iv : r.renewal_intervals) {
    EXPECT_EQ(iv.n_requests, 1);
    EXPECT_EQ(iv.total_cost, 4.0);
  }
}

TEST(RenewalStats, NoCompletedInterval) {
  const auto r = aoi::simulate(Policy::threshold(50), ArrivalSequence::from_slots({1, 2, 3}), CostModel::linear(100));
  EXPECT_THROW(aoi::renewal_stats(r), aoi::NoCompletedInterval);
}

TEST(RenewalStats, IntervalLengthsUncorrelated) {
  const auto arr = aoi::generate_bernoulli({0.3, 12}, aoi::StopAtRequests{700'000});
  const auto r = aoi::simulate(Policy::threshold(6), arr, CostModel::linear(20));
  const auto& iv = r.renewal_intervals;
  ASSERT_GE(iv.size(), 100'000U);
  const std::size_t n = 100'000;
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += static_cast<double>(iv[i].length);
  mean /= static_cast<double>(n);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = static_cast<double>(iv[i].length) - mean;
    den += d * d;
    if (i + 1 < n) num += d * (static_cast<double>(iv[i + 1].length) - mean);
  }
  EXPECT_LT(std::abs(num / den), 0.02);
}

TEST(SimRow, CsvFormat) {
  std::ostringstream os;
  aoi::write_sim_header(os);
  const auto r = aoi::simulate(Policy::threshold(2), ArrivalSequence::from_slots({1, 2}), CostModel::linear(4));
  aoi::write_sim_row(os, Policy::threshold(2), 0.5, 4.0, r, 17);
  EXPECT_EQ(os.str(),
            "policy,params,lambda,p,avg_total,avg_staleness,avg_update,n_requests,n_updates,seed\n"
            "threshold,tau=2,0.5,4,2.5,0.5,2,2,1,17\n");
}

}  // namespace
