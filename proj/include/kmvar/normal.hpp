#pragma once

namespace kmvar {

/// Standard normal CDF.
double normal_cdf(double x);

/// Standard normal quantile (inverse CDF), Wichura's AS 241 rational
/// approximation; relative accuracy about 1e-16 on (0, 1).
///
/// Returns -inf at 0, +inf at 1 and NaN outside [0, 1].
double normal_quantile(double p);

}  // namespace kmvar
