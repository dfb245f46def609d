#include "qraman/geometry/design.hpp"
#include "qraman/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <numbers>

using namespace qraman;
using namespace qraman::geometry;

namespace {

PhysicalConfig vapor()
{
    PhysicalConfig p;
    p.delta1 = 1e10;
    p.delta2 = p.delta1 - 2.5e7;
    p.omega2 = 5e8;
    p.omega1_peak = 4e6;
    p.alpha0 = 400.0;
    p.u = 125.0;
    p.length = 0.1;
    p.k = 8e6;
    return p;
}

} // namespace

TEST_CASE("relative wavevector limits")
{
    CHECK(relative_wavevector(1e-9, 1.0) == doctest::Approx(1e-9).epsilon(1e-9));
    CHECK(relative_wavevector(std::numbers::pi, 1.0) == doctest::Approx(2.0).epsilon(1e-14));
    // theta = 10 mrad: K = 2 sin(0.005) = 9.99996e-3, i.e. K/k ~ 1e-2
    CHECK(relative_wavevector(0.010, 1.0) == doctest::Approx(9.999958333385417e-3).epsilon(1e-9));
    CHECK_THROWS_AS(relative_wavevector(0.0, 1.0), ValidationError);
    CHECK_THROWS_AS(relative_wavevector(3.2, 1.0), ValidationError);
}

TEST_CASE("raman absorption closed form")
{
    CHECK(raman_absorption(1.0, 1.0, 0.0, 1e9, 100.0) == 0.0);
    // k = K, |omega2|/delta1 = 0.1, alpha0 = 100/m -> alphaR = 1/m
    CHECK(raman_absorption(1.0, 1.0, 1e8, 1e9, 100.0) == doctest::Approx(1.0).epsilon(1e-14));
    const double a1 = raman_absorption(2.0, 0.5, 1e8, 1e9, 100.0);
    const double a2 = raman_absorption(2.0, 1.0, 1e8, 1e9, 100.0);
    CHECK(a1 == doctest::Approx(2.0 * a2).epsilon(1e-14));
    CHECK_THROWS_AS(raman_absorption(1.0, 0.0, 1e8, 1e9, 100.0), ValidationError);
}

TEST_CASE("alphaR K is constant under K sweeps")
{
    auto p = vapor();
    const double ref = p.k * std::norm(p.omega2) / (p.delta1 * p.delta1) * p.alpha0;
    for (int i = 1; i <= 100; ++i) {
        const double K = 1.0 + 1e6 * i / 100.0;
        const double a = raman_absorption(p.k, K, p.omega2, p.delta1, p.alpha0);
        CHECK(std::abs(a * K - ref) / ref <= 1e-12);
    }
}

TEST_CASE("optimal angle hits the bandwidth margin exactly")
{
    auto p = vapor();
    const double delta_s = 1.6651e7;
    const double m = 3.0;
    auto dp = optimize_angle(delta_s, m, p);
    CHECK(dp.theta == doctest::Approx(2.0 * std::asin(m * delta_s / (2.0 * p.k * p.u))).epsilon(1e-14));
    CHECK(dp.bandwidth == doctest::Approx(m * delta_s).epsilon(1e-12));
    CHECK(dp.margin_ratio == doctest::Approx(m).epsilon(1e-12));

    // counter-propagating limit: m delta_s = 2 k u -> theta* = pi
    auto top = optimize_angle(2.0 * p.k * p.u / m, m, p);
    CHECK(top.theta == doctest::Approx(std::numbers::pi).epsilon(1e-9));

    // infeasible bandwidth reports the achievable maximum
    try {
        optimize_angle(2.0 * p.k * p.u, m, p);
        CHECK(false);
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("2 k u") != std::string::npos);
    }

    // degenerate limit carries a warning instead of blowing up
    auto tiny = optimize_angle(1e-12, m, p);
    CHECK(!tiny.warning.empty());
}

TEST_CASE("the order-of-magnitude regime of the discussion section")
{
    // 10 MHz-class signal, k u = 1e9 1/s, margin 3: a near-co-propagating
    // geometry in the tens-of-mrad range
    auto p = vapor(); // k u = 1e9
    const double delta_s = 2.0 * std::numbers::pi * 1e7;
    auto dp = optimize_angle(delta_s, 3.0, p);
    CHECK(dp.theta == doctest::Approx(2.0 * std::asin(3.0 * delta_s / 2e9)).epsilon(1e-14));
    CHECK(dp.theta > 0.005);
    CHECK(dp.theta < 1.0);
}

TEST_CASE("optimality: smaller angles violate the margin, larger ones lose depth")
{
    auto p = vapor();
    const double delta_s = 1.6651e7;
    auto star = optimize_angle(delta_s, 3.0, p);
    for (double f : { 0.5, 0.8, 0.95 }) {
        auto q = design_point(star.theta * f, delta_s, p);
        CHECK(q.bandwidth < 3.0 * delta_s);
    }
    for (double f : { 1.05, 1.5, 3.0 }) {
        auto q = design_point(star.theta * f, delta_s, p);
        CHECK(q.alphaR < star.alphaR);
        CHECK(q.bandwidth > 3.0 * delta_s);
    }
}
