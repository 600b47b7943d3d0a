#pragma once

#include <cmath>
#include <string>

namespace kmvar {

/// Neumaier-compensated running sum. Keeps long cumulative sums of terms with
/// widely varying magnitude accurate to a few ulps.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }

    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Shortest decimal string that parses back to exactly `x` (at most 17
/// significant digits).
std::string format_double(double x);

}  // namespace kmvar
