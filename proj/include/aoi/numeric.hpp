#pragma once

#include <charconv>
#include <cmath>
#include <span>
#include <string>

namespace aoi {

// Neumaier compensated sum.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;
};

// Sample mean and standard error of the mean (n - 1 denominator; 0 for n < 2).
inline MeanStderr mean_stderr(std::span<const double> xs) {
  MeanStderr out;
  if (xs.empty()) return out;
  CompensatedSum s;
  for (double x : xs) s.add(x);
  const auto n = static_cast<double>(xs.size());
  out.mean = s.value() / n;
  if (xs.size() < 2) return out;
  CompensatedSum ss;
  for (double x : xs) ss.add((x - out.mean) * (x - out.mean));
  out.stderr_ = std::sqrt(ss.value() / (n - 1.0) / n);
  return out;
}

// Shortest representation that round-trips.
inline std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace aoi
