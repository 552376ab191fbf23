#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstring>

#include "riskmon/math.hpp"

using namespace riskmon;

TEST_CASE("normal quantile matches reference values", "[math]") {
    // reference values from a high-precision normal inverse CDF
    CHECK(normal_quantile(0.5) == 0.0);
    CHECK(std::fabs(normal_quantile(0.9) - 1.2815515655446004) < 1e-12);
    CHECK(std::fabs(normal_quantile(0.975) - 1.959963984540054) < 1e-12);
    CHECK(std::fabs(normal_quantile(0.995) - 2.5758293035489004) < 1e-12);
    CHECK(std::fabs(normal_quantile(1e-6) - (-4.753424308822899)) < 1e-11);
    CHECK(std::fabs(normal_quantile(1e-12) - (-7.034483825301131)) < 1e-10);
    CHECK(std::fabs(normal_quantile(0.3) - (-0.5244005127080409)) < 1e-12);
    CHECK_THROWS_AS(normal_quantile(0.0), std::domain_error);
    CHECK_THROWS_AS(normal_quantile(1.0), std::domain_error);
}

TEST_CASE("normal cdf and quantile are inverse", "[math]") {
    CHECK(std::fabs(normal_cdf(-1.0) - 0.15865525393145707) < 1e-14);
    CHECK(std::fabs(normal_cdf(2.5) - 0.9937903346742238) < 1e-14);
    // round-trip error grows like 1/phi(x) in the tails
    for (double x = -6.0; x <= 6.0; x += 0.37) {
        CHECK(std::fabs(normal_quantile(normal_cdf(x)) - x) < 1e-8);
    }
}

TEST_CASE("hex-float encoding round-trips bitwise", "[math]") {
    const double values[] = {0.0,  -0.0, 1.0, 0.1, -3.5e-300, 1.7976931348623157e308,
                             5e-324, 0.3333333333333333,
                             std::numeric_limits<double>::infinity(),
                             -std::numeric_limits<double>::infinity()};
    for (double v : values) {
        const double back = decode_double(encode_double(v));
        CHECK(std::memcmp(&v, &back, sizeof(double)) == 0);
    }
    // NaN round-trips to NaN (payload not required)
    CHECK(std::isnan(decode_double(encode_double(std::numeric_limits<double>::quiet_NaN()))));
}

TEST_CASE("Gauss-Legendre rule integrates polynomials and exp", "[math]") {
    const QuadratureRule rule = gauss_legendre_unit(32);
    double cubic = 0.0, expo = 0.0, weight_sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        cubic += rule.weights[i] * rule.nodes[i] * rule.nodes[i] * rule.nodes[i];
        expo += rule.weights[i] * std::exp(rule.nodes[i]);
        weight_sum += rule.weights[i];
    }
    CHECK(std::fabs(weight_sum - 1.0) < 1e-13);
    CHECK(std::fabs(cubic - 0.25) < 1e-13);
    CHECK(std::fabs(expo - (std::exp(1.0) - 1.0)) < 1e-12);
}
