#include "qraman/cli/config.hpp"
#include "qraman/cli/report.hpp"
#include "qraman/cli/runner.hpp"
#include "qraman/errors.hpp"
#include "qraman/oracle/prediction.hpp"
#include "qraman/validate/acceptance.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

constexpr int exit_ok = 0;
constexpr int exit_validation = 2;
constexpr int exit_resolution = 3;
constexpr int exit_acceptance = 4;

std::string output_dir(const std::string& cli_dir, const std::string& cfg_dir)
{
    if (!cli_dir.empty()) return cli_dir;
    if (const char* env = std::getenv("QRAMAN_OUT"); env && *env) return env;
    return cfg_dir;
}

int cmd_run(const std::string& config_path, const std::string& out_dir, bool with_trials)
{
    auto cfg = qraman::cli::load_config(config_path);
    qraman::cli::RunOptions opt;
    opt.with_trials = with_trials;
    opt.keep_fields = true;
    auto art = qraman::cli::run_scenario(cfg, opt);
    const std::string dir = output_dir(out_dir, cfg.output_dir);
    qraman::cli::write_artifacts(art, dir, cfg.c_light);
    std::cout << qraman::cli::render_report(art.report);
    std::cout << "\nwall_seconds = " << art.report.wall_seconds << "\n";
    std::cout << "artifacts written to " << dir << "\n";
    return exit_ok;
}

int cmd_sweep(const std::string& config_path, const std::string& param,
              const std::string& values_csv, const std::string& out_dir)
{
    std::vector<double> values;
    std::stringstream ss(values_csv);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) values.push_back(std::stod(item));

    std::ifstream f(config_path);
    if (!f)
        throw qraman::ValidationError("config: cannot open '" + config_path + "'");
    std::stringstream buf;
    buf << f.rdbuf();

    auto rows = qraman::cli::run_sweep(buf.str(), "'" + config_path + "'", param, values);
    const std::string csv = qraman::cli::render_sweep_csv(param, rows);
    std::cout << csv;
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        std::ofstream o(std::filesystem::path(out_dir) / "sweep.csv", std::ios::binary);
        o << csv;
    }
    return exit_ok;
}

int cmd_predict(const std::string& config_path)
{
    auto cfg = qraman::cli::load_config(config_path);
    const auto input = qraman::cli::build_input(cfg);
    const double delta_s = qraman::signal_bandwidth(input);
    const auto dp = qraman::cli::resolve_design(cfg, delta_s);
    const auto geom = qraman::BeamGeometry::from_angle(dp.theta, cfg.phys.k);
    const auto pred = qraman::oracle::predict(cfg.phys, geom, cfg.tl, input, delta_s, cfg.c_light);

    using qraman::cli::fmt_double;
    std::cout << "# analytic prediction\n";
    std::cout << "theta_rad = " << fmt_double(dp.theta) << "\n";
    std::cout << "K_rad_per_m = " << fmt_double(dp.K) << "\n";
    std::cout << "bandwidth_Ku_rad_per_s = " << fmt_double(dp.bandwidth) << "\n";
    std::cout << "delta_s_rad_per_s = " << fmt_double(delta_s) << "\n";
    std::cout << "alphaR_per_m = " << fmt_double(pred.alphaR) << "\n";
    std::cout << "optical_depth = " << fmt_double(pred.optical_depth) << "\n";
    std::cout << "transmitted_fraction = " << fmt_double(pred.transmitted_fraction) << "\n";
    std::cout << "stored_fraction = " << fmt_double(pred.stored_fraction) << "\n";
    std::cout << "retrieved_fraction = " << fmt_double(pred.retrieved_fraction) << "\n";
    std::cout << "residual_eta = " << fmt_double(pred.residual_eta) << "\n";
    std::cout << "residual_eta_split_rates = " << fmt_double(pred.residual_eta_split_rates) << "\n";
    std::cout << "echo_time_s = " << fmt_double(pred.echo_time) << "\n";
    if (!pred.validity_warning.empty())
        std::cout << "warning = " << pred.validity_warning << "\n";
    return exit_ok;
}

int cmd_validate(const std::string& config_dir, const std::string& out_dir)
{
    auto summary = qraman::validate::run_acceptance(config_dir, std::cout, std::cerr);
    const std::string text = qraman::validate::render_summary(summary);
    std::cout << text;
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        std::ofstream o(std::filesystem::path(out_dir) / "acceptance_summary.txt", std::ios::binary);
        o << text;
    }
    return summary.all_pass ? exit_ok : exit_acceptance;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{ "qraman: semiclassical simulator of the four-stage Raman vapor memory protocol" };
    app.require_subcommand(1);

    std::string config_path, out_dir, param, values;
    bool with_trials = false;

    auto* run = app.add_subcommand("run", "execute one scenario and write report + traces");
    run->add_option("config", config_path, "scenario config file")->required();
    run->add_option("--out", out_dir, "output directory (overrides config and QRAMAN_OUT)");
    run->add_flag("--trials", with_trials, "also run the phase-matching trial configurations");

    auto* sweep = app.add_subcommand("sweep", "re-run a scenario over a parameter list");
    sweep->add_option("config", config_path, "scenario config file")->required();
    sweep->add_option("--param", param, "parameter path (section.key or derived.optical_depth)")->required();
    sweep->add_option("--values", values, "comma-separated values")->required();
    sweep->add_option("--out", out_dir, "directory for sweep.csv");

    auto* predict = app.add_subcommand("predict", "closed-form predictions only");
    predict->add_option("config", config_path, "scenario config file")->required();

    std::string acc_dir = "configs/acceptance";
    auto* validate = app.add_subcommand("validate", "run the acceptance suite at the pinned configs");
    validate->add_option("--config-dir", acc_dir, "directory with the pinned configs");
    validate->add_option("--out", out_dir, "directory for acceptance_summary.txt");

    try {
        app.parse(argc, argv);
        if (run->parsed()) return cmd_run(config_path, out_dir, with_trials);
        if (sweep->parsed()) return cmd_sweep(config_path, param, values, out_dir);
        if (predict->parsed()) return cmd_predict(config_path);
        if (validate->parsed()) return cmd_validate(acc_dir, out_dir);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? exit_ok : exit_validation;
    } catch (const qraman::ResolutionError& e) {
        std::cerr << "resolution error: " << e.what() << "\n";
        return exit_resolution;
    } catch (const qraman::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return exit_validation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_validation;
    }
    return exit_validation;
}
