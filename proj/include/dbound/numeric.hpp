#pragma once

#include <cmath>
#include <numbers>
#include <string>

namespace dbound {

inline constexpr double kPi = std::numbers::pi;

/// Compensated summation; keeps totals reproducible to ~1e-15 relative
/// regardless of magnitude spread.
class NeumaierSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      compensation_ += (sum_ - t) + x;
    else
      compensation_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

/// Value rounded to 12 significant digits (the report precision).
double round12(double x);

/// "%.12g" formatting.
std::string fmt12(double x);

}  // namespace dbound
