#pragma once

// Request-arrival sequences: seeded Bernoulli streams and timestamp traces.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "aoi/core.hpp"

namespace aoi {

// Generator recorded in experiment metadata.
inline constexpr std::string_view kRngAlgorithm =
    "std::mt19937_64 seeded by splitmix64(seed); arrival iff (x >> 11) * 2^-53 < rate";

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Seed of the index-th independent stream derived from base.
inline constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept {
  return splitmix64(splitmix64(base) ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

struct Arrival {
  Slot slot;
  std::int64_t count;

  friend bool operator==(const Arrival&, const Arrival&) = default;
};

// Sparse per-slot request counts over slots 1..horizon. Entries are sorted by
// slot and every count is >= 1.
class ArrivalSequence {
 public:
  ArrivalSequence() = default;

  ArrivalSequence(Slot horizon, std::vector<Arrival> entries) : horizon_(horizon), entries_(std::move(entries)) {
    if (horizon_ < 0) throw ValidationError("horizon must be non-negative");
    Slot prev = 0;
    for (const auto& a : entries_) {
      if (a.slot <= prev) throw ValidationError("arrival slots must be strictly increasing and >= 1");
      if (a.slot > horizon_) throw ValidationError("arrival slot " + std::to_string(a.slot) + " beyond horizon");
      if (a.count < 1) throw ValidationError("arrival counts must be >= 1");
      prev = a.slot;
      n_requests_ += a.count;
    }
  }

  // One request per listed slot; horizon defaults to the last slot.
  static ArrivalSequence from_slots(std::span<const Slot> slots, Slot horizon = 0) {
    std::vector<Slot> sorted(slots.begin(), slots.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<Arrival> entries;
    for (Slot s : sorted) {
      if (!entries.empty() && entries.back().slot == s)
        ++entries.back().count;
      else
        entries.push_back({s, 1});
    }
    if (horizon == 0 && !entries.empty()) horizon = entries.back().slot;
    return {horizon, std::move(entries)};
  }
  static ArrivalSequence from_slots(std::initializer_list<Slot> slots, Slot horizon = 0) {
    return from_slots(std::span<const Slot>(slots.begin(), slots.size()), horizon);
  }

  Slot horizon() const noexcept { return horizon_; }
  std::int64_t n_requests() const noexcept { return n_requests_; }
  bool empty() const noexcept { return entries_.empty(); }
  const std::vector<Arrival>& entries() const noexcept { return entries_; }
  Slot last_request_slot() const noexcept { return entries_.empty() ? 0 : entries_.back().slot; }

  std::int64_t count_at(Slot slot) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), slot,
                               [](const Arrival& a, Slot s) { return a.slot < s; });
    return (it != entries_.end() && it->slot == slot) ? it->count : 0;
  }

  std::vector<Slot> request_slots() const {
    std::vector<Slot> out;
    out.reserve(entries_.size());
    for (const auto& a : entries_) out.push_back(a.slot);
    return out;
  }

  // The first n requests; the horizon shrinks to the slot of the n-th request.
  ArrivalSequence first_requests(std::int64_t n) const {
    std::vector<Arrival> out;
    std::int64_t left = n;
    for (const auto& a : entries_) {
      if (left <= 0) break;
      out.push_back({a.slot, std::min(a.count, left)});
      left -= out.back().count;
    }
    const Slot h = out.empty() ? 0 : out.back().slot;
    return {h, std::move(out)};
  }

  void write_csv(std::ostream& os) const {
    os << "slot,count\n";
    for (const auto& a : entries_) os << a.slot << ',' << a.count << '\n';
  }

  friend bool operator==(const ArrivalSequence&, const ArrivalSequence&) = default;

 private:
  Slot horizon_ = 0;
  std::vector<Arrival> entries_;
  std::int64_t n_requests_ = 0;
};

// Fraction of slots in 1..horizon holding at least one request.
inline double empirical_rate(const ArrivalSequence& seq) {
  if (seq.horizon() < 1) throw ValidationError("empirical rate needs horizon >= 1");
  return static_cast<double>(seq.entries().size()) / static_cast<double>(seq.horizon());
}

inline void check_rate(double rate) {
  if (!(rate > 0.0 && rate <= 1.0)) throw InvalidRate(rate);
}

struct BernoulliSource {
  double rate;
  std::uint64_t seed;
};

struct StopAtHorizon {
  Slot slots;
};
struct StopAtRequests {
  std::int64_t requests;
};
using StopRule = std::variant<StopAtHorizon, StopAtRequests>;

// Per-slot Bernoulli draws.
class BernoulliStream {
 public:
  explicit BernoulliStream(const BernoulliSource& src) : rate_(src.rate), engine_(splitmix64(src.seed)) {
    check_rate(rate_);
  }

  bool next() {
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return u < rate_;
  }

 private:
  double rate_;
  std::mt19937_64 engine_;
};

inline ArrivalSequence generate_bernoulli(const BernoulliSource& source, StopRule stop) {
  BernoulliStream stream(source);
  std::vector<Arrival> entries;
  if (const auto* h = std::get_if<StopAtHorizon>(&stop)) {
    if (h->slots < 1) throw ValidationError("horizon must be positive");
    for (Slot t = 1; t <= h->slots; ++t)
      if (stream.next()) entries.push_back({t, 1});
    return {h->slots, std::move(entries)};
  }
  const auto n = std::get<StopAtRequests>(stop).requests;
  if (n < 1) throw ValidationError("request count must be positive");
  entries.reserve(static_cast<std::size_t>(n));
  for (Slot t = 1; static_cast<std::int64_t>(entries.size()) < n; ++t)
    if (stream.next()) entries.push_back({t, 1});
  const Slot horizon = entries.back().slot;
  return {horizon, std::move(entries)};
}

struct TraceOptions {
  // Throw ParseError on the first malformed line instead of skipping it.
  bool strict = true;
};

struct LoadedTrace {
  ArrivalSequence arrivals;
  std::vector<std::size_t> skipped_lines;
};

// Lines are `timestamp[,ignored...]`; blank lines and lines starting with '#'
// are ignored. Timestamp t maps to slot floor((t - t_min) / slot_duration) + 1.
inline LoadedTrace parse_trace(std::istream& in, double slot_duration, TraceOptions opts = {}) {
  if (!(slot_duration > 0.0) || !std::isfinite(slot_duration))
    throw ValidationError("slot duration must be positive");
  std::vector<double> stamps;
  std::vector<std::size_t> skipped;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    std::string_view field(line);
    field = field.substr(0, field.find(','));
    while (!field.empty() && std::isspace(static_cast<unsigned char>(field.front()))) field.remove_prefix(1);
    while (!field.empty() && std::isspace(static_cast<unsigned char>(field.back()))) field.remove_suffix(1);
    if (field.empty() && line.find(',') == std::string::npos) continue;
    if (!field.empty() && field.front() == '#') continue;
    double t = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), t);
    if (ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(t)) {
      if (opts.strict) throw ParseError(lineno, "malformed timestamp '" + std::string(field) + "'");
      skipped.push_back(lineno);
      continue;
    }
    stamps.push_back(t);
  }
  if (stamps.empty()) throw EmptyTrace();
  const double t_min = *std::min_element(stamps.begin(), stamps.end());
  std::map<Slot, std::int64_t> counts;
  for (double t : stamps) ++counts[static_cast<Slot>(std::floor((t - t_min) / slot_duration)) + 1];
  std::vector<Arrival> entries;
  entries.reserve(counts.size());
  for (const auto& [slot, c] : counts) entries.push_back({slot, c});
  const Slot horizon = entries.back().slot;
  return {ArrivalSequence(horizon, std::move(entries)), std::move(skipped)};
}

inline LoadedTrace load_trace(const std::string& path, double slot_duration, TraceOptions opts = {}) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open trace file '" + path + "'");
  return parse_trace(in, slot_duration, opts);
}

}  // namespace aoi
