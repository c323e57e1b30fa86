#pragma once

// Update policies and the sample-path transforms that turn an arbitrary update
// schedule into a reactive one (updates only at request slots) and then into a
// capped reactive one (forced update whenever f(AoI) >= p at a request).

#include <algorithm>
#include <string>
#include <variant>
#include <vector>

#include "aoi/arrivals.hpp"
#include "aoi/core.hpp"

namespace aoi {

namespace policy {

// Update at a request iff AoI >= tau.
struct Threshold {
  AoiValue tau;
};
// Update at a request iff f(AoI) >= p, i.e. Threshold(cap threshold).
struct Naive {};
// Update at every slot that is a multiple of d, request or not.
struct Periodic {
  Slot d;
};
// Update exactly at the listed slots (strictly increasing).
struct Scheduled {
  std::vector<Slot> slots;
};

}  // namespace policy

class Policy {
 public:
  using Variant = std::variant<policy::Threshold, policy::Naive, policy::Periodic, policy::Scheduled>;

  Policy(policy::Threshold p) : v_(p) {
    if (p.tau < 1) throw ValidationError("threshold tau must be >= 1");
  }
  Policy(policy::Naive p) : v_(p) {}
  Policy(policy::Periodic p) : v_(p) {
    if (p.d < 1) throw ValidationError("period d must be >= 1");
  }
  Policy(policy::Scheduled p) : v_(std::move(p)) {
    const auto& s = std::get<policy::Scheduled>(v_).slots;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] < 1) throw ValidationError("scheduled slots must be >= 1");
      if (i > 0 && s[i] <= s[i - 1]) throw ValidationError("scheduled slots must be strictly increasing");
    }
  }

  static Policy threshold(AoiValue tau) { return Policy(policy::Threshold{tau}); }
  static Policy naive() { return Policy(policy::Naive{}); }
  static Policy periodic(Slot d) { return Policy(policy::Periodic{d}); }
  static Policy scheduled(std::vector<Slot> slots) { return Policy(policy::Scheduled{std::move(slots)}); }

  // Reactive policies act only when a request is present.
  bool is_reactive() const noexcept {
    return std::holds_alternative<policy::Threshold>(v_) || std::holds_alternative<policy::Naive>(v_);
  }

  const Variant& variant() const noexcept { return v_; }

  std::string kind() const {
    switch (v_.index()) {
      case 0: return "threshold";
      case 1: return "naive";
      case 2: return "periodic";
      default: return "scheduled";
    }
  }

  // Short parameter string, e.g. "tau=37" or "d=11".
  std::string params() const {
    if (const auto* t = std::get_if<policy::Threshold>(&v_)) return "tau=" + std::to_string(t->tau);
    if (const auto* p = std::get_if<policy::Periodic>(&v_)) return "d=" + std::to_string(p->d);
    if (const auto* s = std::get_if<policy::Scheduled>(&v_)) return "n_slots=" + std::to_string(s->slots.size());
    return "";
  }

 private:
  Variant v_;
};

struct DecisionContext {
  AoiValue current_aoi;
  Slot slot;
  bool has_request;
};

inline bool decide(const Policy& pol, const CostModel& model, const DecisionContext& ctx) {
  return std::visit(
      [&](const auto& p) -> bool {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, policy::Threshold>) {
          if (!ctx.has_request) throw ReactiveWithoutRequest();
          return ctx.current_aoi >= p.tau;
        } else if constexpr (std::is_same_v<P, policy::Naive>) {
          if (!ctx.has_request) throw ReactiveWithoutRequest();
          return ctx.current_aoi >= model.cap_threshold();
        } else if constexpr (std::is_same_v<P, policy::Periodic>) {
          return ctx.slot % p.d == 0;
        } else {
          return std::binary_search(p.slots.begin(), p.slots.end(), ctx.slot);
        }
      },
      pol.variant());
}

// Moves every update at a request-free slot to the next request slot, merging
// coincident updates. Updates after the last request are dropped.
inline std::vector<Slot> reactify(std::span<const Slot> schedule, const ArrivalSequence& arrivals) {
  const auto& entries = arrivals.entries();
  std::vector<Slot> out;
  for (Slot u : schedule) {
    auto it = std::lower_bound(entries.begin(), entries.end(), u,
                               [](const Arrival& a, Slot s) { return a.slot < s; });
    if (it == entries.end()) continue;
    if (out.empty() || out.back() != it->slot) out.push_back(it->slot);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Adds an update at every request whose AoI, replayed with the updates already
// in effect, reaches the cap threshold.
inline std::vector<Slot> cap(std::span<const Slot> schedule, const ArrivalSequence& arrivals, const CostModel& model) {
  for (Slot u : schedule)
    if (arrivals.count_at(u) == 0) throw NotReactive(u);
  const AoiValue cap_at = model.cap_threshold();
  std::vector<Slot> out;
  Slot last_update = 0;
  auto next = schedule.begin();
  for (const auto& a : arrivals.entries()) {
    while (next != schedule.end() && *next < a.slot) ++next;
    const bool scheduled = next != schedule.end() && *next == a.slot;
    if (scheduled || a.slot - last_update >= cap_at) {
      out.push_back(a.slot);
      last_update = a.slot;
    }
  }
  return out;
}

}  // namespace aoi
