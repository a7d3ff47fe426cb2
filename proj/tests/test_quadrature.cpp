#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "hwidths/quadrature.hpp"

using namespace hwidths;

TEST_CASE("gauss_legendre integrates polynomials of degree 2n-1 exactly", "[quadrature]") {
    const QuadratureRule rule = gauss_legendre(5);
    REQUIRE(rule.nodes.size() == 5);
    // weights sum to the interval length
    double wsum = 0.0;
    for (double w : rule.weights)
        wsum += w;
    CHECK(wsum == Catch::Approx(2.0).epsilon(1e-14));
    // x^8 over [-1,1] -> 2/9, degree 8 <= 2*5-1
    double val = 0.0;
    for (size_t i = 0; i < rule.nodes.size(); ++i)
        val += rule.weights[i] * std::pow(rule.nodes[i], 8);
    CHECK(val == Catch::Approx(2.0 / 9.0).epsilon(1e-13));
}

TEST_CASE("graded panels cover [0, T] and integrate a decaying exponential",
          "[quadrature]") {
    const double horizon = 30.0;
    const QuadratureRule rule = graded_panels(horizon, 8, 12);
    REQUIRE(rule.nodes.size() == 96);
    for (double t : rule.nodes) {
        CHECK(t > 0.0);
        CHECK(t < horizon);
    }
    double integral = 0.0;
    for (size_t i = 0; i < rule.nodes.size(); ++i)
        integral += rule.weights[i] * std::exp(-rule.nodes[i]);
    CHECK(integral == Catch::Approx(1.0 - std::exp(-horizon)).epsilon(1e-12));
}

TEST_CASE("bad parameters are rejected", "[quadrature]") {
    CHECK_THROWS_AS(gauss_legendre(0), BadParameter);
    CHECK_THROWS_AS(graded_panels(-1.0, 8, 12), BadParameter);
    CHECK_THROWS_AS(graded_panels(1.0, 0, 12), BadParameter);
}
