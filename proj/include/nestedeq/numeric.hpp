#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace nestedeq {

/// Tolerance applied to normalization checks on user input.
inline constexpr double kInputTolerance = 1e-12;
/// Tolerance applied to quantities derived by arithmetic (regrets, expectations).
inline constexpr double kDerivedTolerance = 1e-9;

/// Neumaier-compensated accumulator. Order of additions is part of the
/// result, so callers that need bit-stable output must add in a fixed order.
class CompensatedSum {
 public:
  CompensatedSum& operator+=(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
    return *this;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

inline double compensated_sum(std::span<const double> xs) {
  CompensatedSum s;
  for (double x : xs) s += x;
  return s.value();
}

inline double l1_distance(std::span<const double> a, std::span<const double> b) {
  CompensatedSum s;
  for (std::size_t k = 0; k < a.size(); ++k) s += std::abs(a[k] - b[k]);
  return s.value();
}

}  // namespace nestedeq
