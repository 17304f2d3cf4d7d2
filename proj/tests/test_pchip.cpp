#include "congesta/pchip.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace congesta;

TEST_SUITE("pchip") {

TEST_CASE("reproduces linear data exactly") {
    std::vector<double> xs, ys;
    for (int i = 0; i <= 20; ++i) {
        xs.push_back(0.1 * i);
        ys.push_back(3.0 * 0.1 * i + 1.0);
    }
    PchipTable tab(xs, ys);
    CHECK(tab.value(0.73) == doctest::Approx(3.0 * 0.73 + 1.0).epsilon(1e-14));
    CHECK(tab.derivative(1.234) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("monotone data gives a monotone interpolant") {
    // sqrt-like data with uneven curvature
    std::vector<double> xs, ys;
    for (int i = 0; i <= 64; ++i) {
        double x = i / 64.0;
        xs.push_back(x);
        ys.push_back(std::sqrt(x) + 0.2 * x);
    }
    PchipTable tab(xs, ys);
    CHECK(tab.strictly_increasing());
    double prev = tab.value(0.0);
    for (int k = 1; k <= 2000; ++k) {
        double v = tab.value(k / 2000.0);
        CHECK(v >= prev);
        prev = v;
    }
    for (int k = 0; k <= 2000; ++k)
        CHECK(tab.derivative(k / 2000.0) >= -1e-14);
}

TEST_CASE("inverse solves value(x) = y") {
    std::vector<double> xs, ys;
    for (int i = 0; i <= 32; ++i) {
        double x = i / 32.0 * 2.0;
        xs.push_back(x);
        ys.push_back(x * x + x);
    }
    PchipTable tab(xs, ys);
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(0.0, tab.y_back());
    for (int k = 0; k < 50; ++k) {
        double y = u(rng);
        double x = tab.inverse(y);
        CHECK(tab.value(x) == doctest::Approx(y).epsilon(1e-10));
    }
}

TEST_CASE("out-of-range arguments raise out-of-table") {
    PchipTable tab({0.0, 1.0, 2.0}, {0.0, 1.0, 4.0});
    CHECK_THROWS_AS(tab.value(-0.1), Error);
    CHECK_THROWS_AS(tab.value(2.1), Error);
    CHECK_THROWS_AS(tab.inverse(5.0), Error);
}

} // TEST_SUITE
