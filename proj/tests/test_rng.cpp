#include <catch2/catch_amalgamated.hpp>

#include "ddpc/rng.hpp"

using namespace ddpc;

TEST_CASE("same seed gives identical sequences") {
    Rng a(42), b(42);
    for (int i = 0; i < 1000; ++i) {
        REQUIRE(a.uniform01() == b.uniform01());
        REQUIRE(a.normal() == b.normal());
    }
}

TEST_CASE("different seeds give different sequences") {
    Rng a(1), b(2);
    int differing = 0;
    for (int i = 0; i < 100; ++i)
        if (a.uniform01() != b.uniform01()) ++differing;
    REQUIRE(differing > 90);
}

TEST_CASE("uniform01 stays in (0, 1]") {
    Rng rng(7);
    for (int i = 0; i < 100000; ++i) {
        const double v = rng.uniform01();
        REQUIRE(v > 0.0);
        REQUIRE(v <= 1.0);
    }
}

TEST_CASE("uniform respects bounds and has the right mean") {
    Rng rng(11);
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double v = rng.uniform(-5.0, 5.0);
        REQUIRE(v >= -5.0);
        REQUIRE(v <= 5.0);
        sum += v;
    }
    REQUIRE(std::abs(sum / n) < 0.05);
}

TEST_CASE("normal has zero mean and unit variance approximately") {
    Rng rng(13);
    double sum = 0.0, sum2 = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double v = rng.normal();
        sum += v;
        sum2 += v * v;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    REQUIRE(std::abs(mean) < 0.02);
    REQUIRE(std::abs(var - 1.0) < 0.03);
}

TEST_CASE("derive_seed separates streams") {
    const auto s0 = derive_seed(123, 0);
    const auto s1 = derive_seed(123, 1);
    const auto t0 = derive_seed(124, 0);
    REQUIRE(s0 != s1);
    REQUIRE(s0 != t0);
    REQUIRE(derive_seed(123, 0) == s0);
}
