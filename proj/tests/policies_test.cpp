#include <random>

#include <gtest/gtest.h>

#include "aoi/engine.hpp"
#include "aoi/policies.hpp"

namespace {

using aoi::ArrivalSequence;
using aoi::CostModel;
using aoi::Policy;
using aoi::Slot;

double engine_cost(const std::vector<Slot>& schedule, const ArrivalSequence& arr, const CostModel& m) {
  return aoi::simulate(Policy::scheduled(schedule), arr, m).breakdown.total();
}

std::vector<Slot> random_schedule(std::mt19937_64& rng, Slot horizon) {
  std::bernoulli_distribution pick(std::uniform_real_distribution<double>(0.0, 0.5)(rng));
  std::vector<Slot> s;
  for (Slot t = 1; t <= horizon; ++t)
    if (pick(rng)) s.push_back(t);
  return s;
}

TEST(Decide, Threshold) {
  const auto m = CostModel::linear(100);
  EXPECT_FALSE(aoi::decide(Policy::threshold(37), m, {36, 1, true}));
  EXPECT_TRUE(aoi::decide(Policy::threshold(37), m, {37, 1, true}));
  EXPECT_TRUE(aoi::decide(Policy::threshold(37), m, {80, 1, true}));
}

TEST(Decide, NaiveUsesCapThreshold) {
  const auto m = CostModel::linear(100);
  EXPECT_TRUE(aoi::decide(Policy::naive(), m, {100, 3, true}));
  EXPECT_FALSE(aoi::decide(Policy::naive(), m, {99, 3, true}));
}

TEST(Decide, PeriodicAndScheduled) {
  const auto m = CostModel::linear(5);
  EXPECT_TRUE(aoi::decide(Policy::periodic(11), m, {3, 22, false}));
  EXPECT_FALSE(aoi::decide(Policy::periodic(11), m, {3, 23, true}));
  const auto s = Policy::scheduled({4, 9});
  EXPECT_TRUE(aoi::decide(s, m, {1, 9, false}));
  EXPECT_FALSE(aoi::decide(s, m, {1, 8, true}));
}

TEST(Decide, ReactiveNeedsRequest) {
  const auto m = CostModel::linear(5);
  EXPECT_THROW(aoi::decide(Policy::threshold(2), m, {5, 5, false}), aoi::ReactiveWithoutRequest);
  EXPECT_THROW(aoi::decide(Policy::naive(), m, {5, 5, false}), aoi::ReactiveWithoutRequest);
}

TEST(Policy, Validation) {
  EXPECT_THROW(Policy::threshold(0), aoi::ValidationError);
  EXPECT_THROW(Policy::periodic(0), aoi::ValidationError);
  EXPECT_THROW(Policy::scheduled({3, 3}), aoi::ValidationError);
  EXPECT_THROW(Policy::scheduled({0}), aoi::ValidationError);
}

TEST(Reactify, Examples) {
  const auto arr = ArrivalSequence::from_slots({3, 8});
  EXPECT_EQ(aoi::reactify(std::vector<Slot>{5}, arr), (std::vector<Slot>{8}));
  EXPECT_EQ(aoi::reactify(std::vector<Slot>{3}, arr), (std::vector<Slot>{3}));
  const auto arr8 = ArrivalSequence::from_slots({8});
  const std::vector<Slot> s{4, 6};
  const auto r = aoi::reactify(s, arr8);
  EXPECT_EQ(r, (std::vector<Slot>{8}));
  const auto m = CostModel::linear(3);
  // {4, 6}: 2p + f(2) = 8 ; {8}: p = 3.
  EXPECT_DOUBLE_EQ(engine_cost(s, arr8, m), 8.0);
  EXPECT_DOUBLE_EQ(engine_cost(r, arr8, m), 3.0);
}

TEST(Reactify, DropsTrailingUpdates) {
  const auto arr = ArrivalSequence::from_slots({2, 5}, 20);
  EXPECT_EQ(aoi::reactify(std::vector<Slot>{1, 6, 19}, arr), (std::vector<Slot>{2}));
}

TEST(Cap, Examples) {
  const auto m5 = CostModel::linear(5);
  EXPECT_EQ(aoi::cap(std::vector<Slot>{}, ArrivalSequence::from_slots({10}), m5), (std::vector<Slot>{10}));
  for (const auto& m : {CostModel::linear(5), CostModel::linear(500), CostModel::quadratic(2)})
    EXPECT_EQ(aoi::cap(std::vector<Slot>{10}, ArrivalSequence::from_slots({10}), m), (std::vector<Slot>{10}));
  EXPECT_EQ(aoi::cap(std::vector<Slot>{}, ArrivalSequence::from_slots({2, 4, 9}), m5), (std::vector<Slot>{9}));
}

TEST(Cap, SelfConsistentReplay) {
  // Cap 5: slot 5 forces an update, so slot 9 sees AoI 4 and is left alone.
  const auto arr = ArrivalSequence::from_slots({5, 9});
  EXPECT_EQ(aoi::cap(std::vector<Slot>{}, arr, CostModel::linear(5)), (std::vector<Slot>{5}));
}

TEST(Cap, RejectsNonReactive) {
  EXPECT_THROW(aoi::cap(std::vector<Slot>{4}, ArrivalSequence::from_slots({3, 8}), CostModel::linear(5)),
               aoi::NotReactive);
}

// Property: over random Bernoulli paths and random schedules, reactify then cap
// never increase engine cost, both transforms are idempotent, and the capped
// schedule charges at most p per request.
TEST(Transforms, DominanceIdempotenceAndCappedCharge) {
  std::mt19937_64 rng(20240601);
  int checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const double lambda = std::uniform_real_distribution<double>(0.05, 1.0)(rng);
    const double p = std::uniform_real_distribution<double>(0.5, 30.0)(rng);
    const auto m = trial % 2 ? CostModel::linear(p) : CostModel::quadratic(p);
    const Slot horizon = 1 + static_cast<Slot>(rng() % 120);
    const auto arr = aoi::generate_bernoulli({lambda, rng()}, aoi::StopAtHorizon{horizon});
    if (arr.empty()) continue;
    const auto sched = random_schedule(rng, horizon);
    const auto reac = aoi::reactify(sched, arr);
    const auto capped = aoi::cap(reac, arr, m);
    const double c0 = engine_cost(sched, arr, m), c1 = engine_cost(reac, arr, m), c2 = engine_cost(capped, arr, m);
    EXPECT_LE(c1, c0 + 1e-9);
    EXPECT_LE(c2, c1 + 1e-9);
    EXPECT_EQ(aoi::reactify(reac, arr), reac);
    EXPECT_EQ(aoi::cap(capped, arr, m), capped);
    const auto run = aoi::simulate(Policy::scheduled(capped), arr, m, {.record_events = true});
    for (const auto& e : run.events) EXPECT_LE(e.charged_staleness, m.update_cost());
    ++checked;
  }
  EXPECT_GT(checked, 900);
}

TEST(Transforms, NaiveEqualsThresholdAtCap) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const double lambda = std::uniform_real_distribution<double>(0.01, 1.0)(rng);
    const auto m = CostModel::linear(std::uniform_real_distribution<double>(0.5, 60.0)(rng));
    const auto arr = aoi::generate_bernoulli({lambda, rng()}, aoi::StopAtRequests{200});
    const auto a = aoi::simulate(Policy::naive(), arr, m, {.record_events = true});
    const auto b = aoi::simulate(Policy::threshold(m.cap_threshold()), arr, m, {.record_events = true});
    ASSERT_EQ(a.events.size(), b.events.size());
    for (std::size_t i = 0; i < a.events.size(); ++i) EXPECT_EQ(a.events[i].updated, b.events[i].updated);
  }
}

}  // namespace
