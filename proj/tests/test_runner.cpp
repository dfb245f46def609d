#include "qraman/cli/report.hpp"
#include "qraman/cli/runner.hpp"
#include "qraman/errors.hpp"
#include "qraman/validate/acceptance.hpp"

#include <doctest.h>

#include "scenario_helpers.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace qraman;
using namespace qraman::cli;

TEST_CASE("a run at optical depth ~2 retrieves the predicted fraction")
{
    auto cfg = scenario_with({});
    auto art = run_scenario(cfg);
    // predicted (1 - e^{-aL})^2 at the run's own depth, which is ~2
    CHECK(art.report.design.optical_depth == doctest::Approx(2.0).epsilon(0.01));
    CHECK(std::abs(art.report.retrieved_fraction - 0.7476) <= 0.03 * 0.7476);
}

TEST_CASE("reports are byte-identical across repeated runs")
{
    auto cfg = scenario_with({});
    auto a = run_scenario(cfg);
    auto b = run_scenario(cfg);
    CHECK(render_report(a.report) == render_report(b.report));
}

TEST_CASE("frozen phase: doubling t23 leaves the retrieved envelope unchanged")
{
    auto a = run_scenario(scenario_with({ { "timeline.t23", "4.0e-7" } }), { false, true });
    auto b = run_scenario(scenario_with({ { "timeline.t23", "8.0e-7" } }), { false, true });
    auto fa = a.backward_field->plane(0);
    auto fb = b.backward_field->plane(0);
    REQUIRE(fa.size() == fb.size());
    double num = 0.0, den = 0.0;
    for (size_t n = 0; n < fa.size(); ++n) {
        num += std::norm(fa[n] - fb[n]);
        den += std::norm(fa[n]);
    }
    CHECK(std::sqrt(num / den) <= 1e-12);
}

TEST_CASE("sweep over the optical depth follows the efficiency curve")
{
    auto rows = run_sweep(base_scenario_text(), "inline", "derived.optical_depth",
                          { 0.5, 1.0, 2.0, 4.0 });
    REQUIRE(rows.size() == 4);
    for (const auto& r : rows) {
        const double expected = std::pow(1.0 - std::exp(-r.value), 2);
        CHECK(std::abs(r.retrieved_fraction - expected) / expected <= 0.03);
        CHECK(r.rel_error <= 0.03);
    }
    const std::string csv = render_sweep_csv("derived.optical_depth", rows);
    CHECK(csv.find("derived.optical_depth, retrieved_fraction") == 0);
}

TEST_CASE("sweep with an empty value list yields an empty table")
{
    auto rows = run_sweep(base_scenario_text(), "inline", "derived.optical_depth", {});
    CHECK(rows.empty());
}

TEST_CASE("sweep rejects unknown parameter paths")
{
    CHECK_THROWS_AS(run_sweep(base_scenario_text(), "inline", "physical.bogus", { 1.0 }),
                    ValidationError);
    CHECK_THROWS_AS(run_sweep(base_scenario_text(), "inline", "no_dot", { 1.0 }),
                    ValidationError);
}

TEST_CASE("sweep over the beam angle peaks at the optimal design point")
{
    // theta* maximizes the retrieved fraction: larger angles lose optical
    // depth; the optimum found by optimize_angle must dominate the sweep
    auto cfg = scenario_with({});
    const Envelope input = build_input(cfg);
    const double ds = signal_bandwidth(input);
    const auto star = resolve_design(cfg, ds);
    // wider angles need denser velocity grids (K u grows at fixed windows),
    // so trim the windows and keep the sweep moderate
    auto entries = qraman::cli::config_entries(base_scenario_text());
    entries["solver.storage_window"] = "6.0";
    entries["solver.retrieval_window"] = "8.0";
    entries["solver.control_lead"] = "3.0";
    const std::string text = qraman::cli::render_config(entries);
    std::vector<double> thetas = { star.theta, 1.25 * star.theta, 1.6 * star.theta };
    auto rows = run_sweep(text, "inline", "geometry.theta", thetas);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].retrieved_fraction > rows[1].retrieved_fraction);
    CHECK(rows[1].retrieved_fraction > rows[2].retrieved_fraction);
}

TEST_CASE("artifacts are written with deterministic bytes")
{
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "qraman_test_artifacts";
    fs::remove_all(dir);
    auto cfg = scenario_with({});
    auto art = run_scenario(cfg, { false, true });
    write_artifacts(art, dir.string(), cfg.c_light);
    CHECK(fs::exists(dir / "report.txt"));
    CHECK(fs::exists(dir / "envelope_forward_z0.csv"));
    CHECK(fs::exists(dir / "envelope_forward_zL.csv"));
    CHECK(fs::exists(dir / "envelope_backward_z0.csv"));
    CHECK(fs::exists(dir / "coherence_after_storage.csv"));
    CHECK(fs::exists(dir / "coherence_after_retrieval.csv"));

    auto slurp = [](const fs::path& p) {
        std::ifstream f(p);
        std::stringstream ss;
        ss << f.rdbuf();
        return ss.str();
    };
    const std::string first = slurp(dir / "report.txt");
    write_artifacts(art, dir.string(), cfg.c_light);
    CHECK(first == slurp(dir / "report.txt"));
    CHECK(first.find("wall") == std::string::npos); // report excludes timing
    fs::remove_all(dir);
}

TEST_CASE("acceptance aborts on a corrupted pinned config")
{
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "qraman_corrupt_cfg";
    fs::create_directories(dir);
    {
        std::ofstream f(dir / "base.cfg");
        f << "[physical]\nthis is not a config\n";
        std::ofstream g(dir / "phase_matching.cfg");
        g << "[physical]\n";
    }
    std::ostringstream log;
    CHECK_THROWS_AS(validate::run_acceptance(dir.string(), log, log), ValidationError);
    fs::remove_all(dir);
}

TEST_CASE("finite-duration pi pulses reproduce the impulsive protocol")
{
    auto imp = run_scenario(scenario_with({}));
    auto fin = run_scenario(scenario_with({ { "solver.pi_pulse", "finite" } }));
    const double rel = std::abs(fin.report.retrieved_fraction - imp.report.retrieved_fraction)
                       / imp.report.retrieved_fraction;
    CHECK(rel <= 0.01);
    CHECK(fin.report.mirror_overlap >= 0.999);
}

TEST_CASE("emission-time decay convention agrees with the echo-time closed form")
{
    // with decay evaluated at the actual emission time, the retrieved energy
    // differs from the scalar echo-time factor only through the spread of
    // emission times about the echo, second order in gamma_ac tau_p
    const double t12 = 8e-7;
    auto mk = [&](const std::string& conv) {
        return scenario_with({ { "physical.gamma_ac", fmt_double(0.05 / t12) },
                               { "solver.decay_convention", conv } });
    };
    auto echo = run_scenario(mk("echo_time"), { false, true });
    auto emis = run_scenario(mk("emission_time"), { false, true });
    const double ratio = emis.report.energy_retrieved / echo.report.energy_retrieved;
    CHECK(std::abs(ratio - 1.0) <= 0.01);
    // the conventions are genuinely different computations
    bool identical = true;
    auto fa = echo.backward_field->plane(0);
    auto fb = emis.backward_field->plane(0);
    for (size_t n = 0; n < fa.size(); ++n)
        identical = identical && fa[n] == fb[n];
    CHECK(!identical);
}

TEST_CASE("residual population with decay matches the split-rate closed form")
{
    // gamma_ac t12 = 0.05, gamma_ad t23 = 0.1 at depth ~2: every decayed
    // fraction is tallied, so eta follows
    // 1 - e^{-2(2 gac t12 + gad t23)} (1 - e^{-aL})
    const double t12 = 8e-7, t23 = 4e-7;
    auto cfg = scenario_with({ { "physical.gamma_ac", fmt_double(0.05 / t12) },
                               { "physical.gamma_ad", fmt_double(0.10 / t23) } });
    auto art = run_scenario(cfg);
    const double depth = art.report.design.optical_depth;
    const double expected = 1.0 - std::exp(-2.0 * (2.0 * 0.05 + 0.10))
                                  * (1.0 - std::exp(-depth));
    CHECK(std::abs(art.report.residual.eta_total() - expected) / expected <= 0.02);
}
