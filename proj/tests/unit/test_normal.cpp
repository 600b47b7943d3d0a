#include <doctest.h>

#include <boost/math/distributions/normal.hpp>
#include <cmath>

#include "kmvar/normal.hpp"

using kmvar::normal_cdf;
using kmvar::normal_quantile;

TEST_CASE("normal_quantile agrees with boost.math to 1e-9 on (1e-10, 1 - 1e-10)") {
    const boost::math::normal dist;
    double worst = 0.0;
    // Log-spaced tail points plus a uniform grid through the centre.
    for (double e = -10.0; e <= -1.0; e += 0.01) {
        const double p = std::pow(10.0, e);
        worst = std::max(worst, std::fabs(normal_quantile(p) - quantile(dist, p)));
        worst = std::max(worst, std::fabs(normal_quantile(1.0 - p) - quantile(dist, 1.0 - p)));
    }
    for (int i = 1; i < 10000; ++i) {
        const double p = i / 10000.0;
        worst = std::max(worst, std::fabs(normal_quantile(p) - quantile(dist, p)));
    }
    CHECK(worst <= 1e-9);
}

TEST_CASE("normal_quantile edge values") {
    CHECK(normal_quantile(0.5) == 0.0);
    CHECK(normal_quantile(0.0) == -HUGE_VAL);
    CHECK(normal_quantile(1.0) == HUGE_VAL);
    CHECK(std::isnan(normal_quantile(-0.1)));
    CHECK(std::isnan(normal_quantile(1.1)));
    CHECK(std::isnan(normal_quantile(std::nan(""))));
}

TEST_CASE("normal_quantile is odd and inverts the CDF") {
    // Dyadic p so that 1 - p is exact.
    for (double p : {0x1p-30, 0x1p-20, 0x1p-10, 0x1p-5, 0.125, 0.375}) {
        CHECK(normal_quantile(p) == doctest::Approx(-normal_quantile(1.0 - p)).epsilon(1e-12));
        CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-12));
    }
}
