#include "qraman/oracle/prediction.hpp"
#include "qraman/errors.hpp"
#include "qraman/geometry/design.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <numbers>

using namespace qraman;
using namespace qraman::oracle;

namespace {

PhysicalConfig vapor(double alpha0 = 400.0)
{
    PhysicalConfig p;
    p.delta1 = 1e10;
    p.delta2 = p.delta1 - 2.5e7;
    p.omega2 = 5e8;
    p.omega1_peak = 4e6;
    p.alpha0 = alpha0;
    p.u = 125.0;
    p.length = 0.1;
    p.k = 8e6;
    return p;
}

ProtocolTimeline timeline()
{
    ProtocolTimeline tl;
    tl.t1 = 0.0;
    tl.t2 = 8e-7;
    tl.t3 = 1.2e-6;
    tl.tau_p = 1e-7;
    tl.tau_pi = 5e-9;
    return tl;
}

AnalyticPrediction predict_at(double depth, double gac = 0.0, double gad = 0.0)
{
    auto p = vapor();
    auto tl = timeline();
    p.gamma_ac = gac;
    p.gamma_ad = gad;
    auto env = Envelope::gaussian(p.omega1_peak, tl.t1, tl.tau_p);
    const double ds = signal_bandwidth(env);
    auto geom = BeamGeometry::from_angle(0.1666, p.k);
    // rescale alpha0 for the requested depth
    const double a0 = geometry::raman_absorption(p.k, geom.K, p.omega2, p.delta1, p.alpha0)
                      * p.length;
    p.alpha0 *= depth / a0;
    return predict(p, geom, tl, env, ds, 3e8);
}

} // namespace

TEST_CASE("degenerate depth: nothing retrieved")
{
    auto pr = predict_at(1e-14);
    CHECK(pr.retrieved_fraction <= 1e-27);
    CHECK(pr.stored_fraction <= 1e-13);
    // eta degenerates to 1 (everything that was stored - nothing - remains)
    CHECK(pr.residual_eta == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("infinite depth recovers everything")
{
    auto pr = predict_at(200.0);
    CHECK(pr.retrieved_fraction == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pr.residual_eta <= 1e-12);
}

TEST_CASE("decay example evaluates the printed closed forms")
{
    // aL = 1, gamma_ac t12 = 0.05, gamma_ad t23 = 0.1:
    // (1 - e^{-1})^2 e^{-2(0.1 + 0.1)} ~ 0.39958 x 0.67032 ~ 0.2678
    auto tl = timeline();
    auto pr = predict_at(1.0, 0.05 / tl.t12(), 0.1 / tl.t23());
    const double expected = std::pow(1.0 - std::exp(-1.0), 2) * std::exp(-0.4);
    CHECK(pr.retrieved_fraction == doctest::Approx(expected).epsilon(1e-12));
    CHECK(std::abs(pr.retrieved_fraction - 0.26785) <= 1e-4);
    // printed vs split-rate residual conventions differ when gamma_ad != gamma_ac
    CHECK(pr.residual_eta != pr.residual_eta_split_rates);
    auto same = predict_at(1.0, 1e5, 1e5);
    CHECK(same.residual_eta == doctest::Approx(same.residual_eta_split_rates).epsilon(1e-12));
}

TEST_CASE("restored envelope closure is the attenuated time mirror")
{
    auto pr = predict_at(2.0);
    auto tl = timeline();
    auto p = vapor();
    auto env = Envelope::gaussian(p.omega1_peak, tl.t1, tl.tau_p);
    const double t = pr.echo_time + 0.37e-7;
    const cplx at_exit = pr.restored_envelope(0.0, t);
    const cplx expect = env(tl.t1 - (t - pr.echo_time)) * (1.0 - std::exp(-2.0));
    CHECK(std::abs(at_exit - expect) <= 1e-12 * std::abs(expect));
    // boundary condition at z = L
    CHECK(std::abs(pr.restored_envelope(p.length, pr.echo_time)) <= 1e-30);
}

TEST_CASE("prediction is monotone in depth and decay")
{
    std::uint64_t x = 31;
    auto rnd = [&] {
        x = x * 6364136223846793005ull + 1442695040888963407ull;
        return (x >> 11) * 0x1.0p-53;
    };
    for (int it = 0; it < 50; ++it) {
        const double d = 0.1 + 5.0 * rnd();
        const double g = 1e4 + 1e5 * rnd();
        auto a = predict_at(d, g, g);
        auto b = predict_at(d * 1.3, g, g);
        auto c = predict_at(d, g * 1.5, g * 1.5);
        CHECK(b.retrieved_fraction > a.retrieved_fraction);
        CHECK(c.retrieved_fraction < a.retrieved_fraction);
    }
}

TEST_CASE("prediction is pure: identical inputs, identical outputs")
{
    auto a = predict_at(1.7, 3e4, 5e4);
    auto b = predict_at(1.7, 3e4, 5e4);
    CHECK(a.retrieved_fraction == b.retrieved_fraction);
    CHECK(a.residual_eta == b.residual_eta);
    CHECK(a.alphaR == b.alphaR);
}

TEST_CASE("comparison of identical inputs passes with zero errors")
{
    auto pr = predict_at(2.0);
    SimSummary sim;
    sim.transmitted_fraction = pr.transmitted_fraction;
    sim.retrieved_fraction = pr.retrieved_fraction;
    sim.residual_eta = pr.residual_eta;
    sim.mirror_overlap = 1.0;
    sim.echo_time = pr.echo_time;
    sim.tau_p = 1e-7;
    sim.stored_fraction = pr.stored_fraction;
    sim.pulse_area2 = std::numbers::pi;
    sim.pulse_area3 = std::numbers::pi;
    auto rep = compare(sim, pr, Tolerances{});
    CHECK(rep.all_pass);
    for (const auto& r : rep.rows)
        CHECK(r.rel_error <= 1e-12);
}

TEST_CASE("a mis-set pulse area is flagged with the sin^2 scaling")
{
    auto pr = predict_at(2.0);
    SimSummary sim;
    sim.transmitted_fraction = pr.transmitted_fraction;
    sim.pulse_area2 = 0.9 * std::numbers::pi;
    sim.pulse_area3 = std::numbers::pi;
    const double s2 = std::sin(0.45 * std::numbers::pi);
    CHECK(s2 * s2 == doctest::Approx(0.97553).epsilon(1e-4));
    sim.retrieved_fraction = pr.retrieved_fraction * s2 * s2; // deficit present in the sim
    sim.residual_eta = pr.residual_eta;
    sim.mirror_overlap = 1.0;
    sim.echo_time = pr.echo_time;
    sim.tau_p = 1e-7;
    sim.stored_fraction = pr.stored_fraction;
    auto rep = compare(sim, pr, Tolerances{});
    bool flagged = false;
    for (const auto& n : rep.notes)
        flagged = flagged || n.find("transfer deficit") != std::string::npos;
    CHECK(flagged);
    // the adjusted expectation accepts the deficit-scaled energy
    for (const auto& r : rep.rows)
        if (r.name == "retrieved_fraction") CHECK(r.pass);
}

TEST_CASE("mirror overlap of an exact mirror is unity")
{
    auto env = Envelope::two_hump(1.0, 0.0, 1e-7, 3e-7, 0.6);
    TimeGrid g{ 1.4e-6, 1e-9, 1201 };
    const double echo = 2.0e-6;
    std::vector<cplx> field(g.n);
    for (int n = 0; n < g.n; ++n)
        field[n] = 0.55 * env(0.0 - (g.at(n) - echo));
    CHECK(mirror_overlap(g, field, env, 0.0, echo) == doctest::Approx(1.0).epsilon(1e-12));
}
