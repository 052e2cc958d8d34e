#include <doctest.h>

#include <random>
#include <stdexcept>

#include "pacer/rider_model.hpp"

using namespace pacer;

namespace {

RiderModel sub9(double a = 1.0, double b = 0.0, double a1 = 0.0, double a2 = 0.05) {
    return RiderModel({234.0, 9758.0, a, b, a1, a2, 16.0});
}

}  // namespace

TEST_CASE("fatigue branch") {
    const auto m = sub9();
    CHECK(dw_fatigue(234, 10, m) == 0.0);
    CHECK(dw_fatigue(334, 10, m) == doctest::Approx(-1000.0));

    const double p = m.cp() + m.awc() / 60.0;
    CHECK(dw_fatigue(p, 60.0, m) == doctest::Approx(-m.awc()).epsilon(1e-12));

    CHECK_THROWS_AS(dw_fatigue(200, 10, m), std::invalid_argument);
    CHECK_THROWS_AS(dw_fatigue(300, -1, m), std::invalid_argument);
}

TEST_CASE("recovery branch") {
    CHECK(dw_recovery(184, 10, sub9(1.0, 0.0)) == doctest::Approx(500.0));
    CHECK(dw_recovery(80, 60, sub9(0.5, 60.0)) == doctest::Approx(8040.0));

    // Recovery line above cp drains the tank; no internal clamp.
    CHECK(dw_recovery(200, 10, sub9(1.0, 100.0)) == doctest::Approx(-660.0));

    CHECK_THROWS_AS(dw_recovery(234, 10, sub9()), std::invalid_argument);
    CHECK_THROWS_AS(dw_recovery(100, -1, sub9()), std::invalid_argument);
}

TEST_CASE("energy saturates at a full tank") {
    const auto m = sub9(0.5, 60.0);
    const auto s = advance_energy({m.awc() - 100.0}, 80.0, 60.0, m);
    CHECK(s.w == m.awc());
    CHECK(advance_energy({50.0}, 400.0, 10.0, m).w == 0.0);
    CHECK(advance_energy({500.0}, m.cp(), 10.0, m).w == 500.0);
}

TEST_CASE("max power curve") {
    CHECK(max_power(0.0, sub9()) == 234.0);
    CHECK(max_power(9758, sub9(1, 0, 0.0, 0.05)) == doctest::Approx(721.9));
    CHECK(max_power(1000, sub9(1, 0, -1e-6, 0.05)) == doctest::Approx(283.0));
    CHECK_THROWS_AS(max_power(-1.0, sub9()), std::invalid_argument);
    CHECK_THROWS_AS(max_power(9758.5, sub9()), std::invalid_argument);
}

TEST_CASE("time to exhaustion") {
    const auto m = sub9();
    CHECK(time_to_exhaustion(400, m) == doctest::Approx(58.783).epsilon(1e-4));
    CHECK(time_to_exhaustion(m.cp() + m.awc(), m) == doctest::Approx(1.0));
    CHECK(std::isfinite(time_to_exhaustion(m.cp() + 1e-9, m)));
    CHECK_THROWS_AS(time_to_exhaustion(m.cp(), m), std::invalid_argument);
    CHECK_THROWS_AS(time_to_exhaustion(100, m), std::invalid_argument);
}

TEST_CASE("construction rejects invalid parameter sets") {
    CHECK_THROWS_AS(RiderModel({0, 9758, 1, 0, 0, 0.05, 16}), std::invalid_argument);
    CHECK_THROWS_AS(RiderModel({234, -1, 1, 0, 0, 0.05, 16}), std::invalid_argument);
    CHECK_THROWS_AS(RiderModel({234, 9758, 1, 0, 0, 0.05, 0}), std::invalid_argument);
    // Curve dips below cp near a full tank.
    CHECK_THROWS_AS(RiderModel({234, 9758, 1, 0, -1e-5, 0.05, 16}), std::invalid_argument);
    CHECK_NOTHROW(RiderModel({234, 9758, 1, 0, -5e-6, 0.05, 16}));
}

TEST_CASE("monotone max power detection") {
    CHECK(sub9(1, 0, 1e-6, 0.03).max_power_nondecreasing());
    CHECK_FALSE(sub9(1, 0, -5e-6, 0.05).max_power_nondecreasing());
}

TEST_CASE("properties over random powers") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> up(234.001, 1200.0), down(0.0, 233.999),
        dt(0.01, 600.0), k(0.1, 10.0);
    const auto m = sub9(0.6, 50.0);
    for (int i = 0; i < 500; ++i) {
        const double p = up(rng), q = down(rng), t = dt(rng), s = k(rng);
        CHECK(dw_fatigue(p, t, m) < 0.0);
        if (m.adjusted_power(q) < m.cp()) CHECK(dw_recovery(q, t, m) > 0.0);
        CHECK(dw_fatigue(p, s * t, m) == doctest::Approx(s * dw_fatigue(p, t, m)).epsilon(1e-14));
        CHECK(dw_recovery(q, s * t, m) ==
              doctest::Approx(s * dw_recovery(q, t, m)).epsilon(1e-14));
        CHECK(dw_fatigue(p, time_to_exhaustion(p, m), m) ==
              doctest::Approx(-m.awc()).epsilon(1e-9));
    }
}
