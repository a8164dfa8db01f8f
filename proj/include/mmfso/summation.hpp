#pragma once

#include <cmath>
#include <limits>

namespace mmfso {

// Neumaier-compensated accumulator that also tracks the sum of magnitudes,
// so callers can tell how many digits an alternating sum has lost.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
        abs_ += std::abs(x);
    }

    CompensatedSum& operator+=(double x) noexcept {
        add(x);
        return *this;
    }

    double value() const noexcept { return sum_ + comp_; }
    double abs_sum() const noexcept { return abs_; }

    // Ratio sum|x_i| / |sum x_i|; roughly 10^(digits lost).
    double cancellation() const noexcept {
        const double v = std::abs(value());
        if (v == 0.0) return abs_ == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
        return abs_ / v;
    }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
    double abs_ = 0.0;
};

}  // namespace mmfso
