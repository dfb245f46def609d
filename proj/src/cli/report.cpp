#include "qraman/cli/report.hpp"
#include "qraman/errors.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace qraman::cli {

std::string fmt_double(double v)
{
    char buf[40];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

namespace {

std::string fmt_hex(std::uint64_t v)
{
    char buf[20];
    auto r = std::to_chars(buf, buf + sizeof buf, v, 16);
    return std::string(buf, r.ptr);
}

void kv(std::string& out, const std::string& key, const std::string& value)
{
    out += key;
    out += " = ";
    out += value;
    out += "\n";
}

} // namespace

std::string render_report(const RunReport& rep)
{
    std::string s;
    s += "# qraman run report\n";
    kv(s, "config_hash", fmt_hex(rep.config_hash));
    s += "\n[geometry]\n";
    kv(s, "theta_rad", fmt_double(rep.design.theta));
    kv(s, "K_rad_per_m", fmt_double(rep.design.K));
    kv(s, "bandwidth_Ku_rad_per_s", fmt_double(rep.design.bandwidth));
    kv(s, "alphaR_per_m", fmt_double(rep.design.alphaR));
    kv(s, "optical_depth", fmt_double(rep.design.optical_depth));
    kv(s, "margin_Ku_over_delta_s", fmt_double(rep.design.margin_ratio));
    kv(s, "delta_s_rad_per_s", fmt_double(rep.delta_s));
    s += "\n[grid]\n";
    kv(s, "solver_mode", rep.solver_mode);
    kv(s, "pi_pulse_mode", rep.pi_pulse_mode);
    kv(s, "decay_convention", rep.decay_convention);
    kv(s, "nz", std::to_string(rep.nz));
    kv(s, "nv", std::to_string(rep.nv));
    kv(s, "dt_s", fmt_double(rep.dt));
    kv(s, "nt_storage", std::to_string(rep.nt_storage));
    kv(s, "nt_retrieval", std::to_string(rep.nt_retrieval));
    s += "\n[energies]\n";
    kv(s, "energy_in", fmt_double(rep.energy_in));
    kv(s, "energy_transmitted", fmt_double(rep.energy_transmitted));
    kv(s, "transmitted_fraction", fmt_double(rep.transmitted_fraction));
    kv(s, "stored_fraction", fmt_double(rep.stored_fraction));
    kv(s, "energy_retrieved", fmt_double(rep.energy_retrieved));
    kv(s, "retrieved_fraction", fmt_double(rep.retrieved_fraction));
    kv(s, "max_abs_sigma", fmt_double(rep.max_abs_sigma));
    s += "\n[residual_population]\n";
    kv(s, "eta_total", fmt_double(rep.residual.eta_total()));
    kv(s, "eta_c", fmt_double(rep.residual.eta_c()));
    kv(s, "eta_d", fmt_double(rep.residual.eta_d()));
    kv(s, "coherent_c", fmt_double(rep.residual.coherent_c));
    kv(s, "coherent_d", fmt_double(rep.residual.coherent_d));
    kv(s, "orphan_c", fmt_double(rep.residual.orphan_c));
    kv(s, "orphan_d", fmt_double(rep.residual.orphan_d));
    kv(s, "decayed_c", fmt_double(rep.residual.decayed_c));
    kv(s, "decayed_d", fmt_double(rep.residual.decayed_d));
    s += "\n[echo]\n";
    kv(s, "echo_time_sim_s", fmt_double(rep.echo_time_sim));
    kv(s, "echo_time_predicted_s", fmt_double(rep.prediction.echo_time));
    kv(s, "mirror_overlap", fmt_double(rep.mirror_overlap));
    s += "\n[analytic_comparison]\n";
    s += "# name, simulated, predicted, rel_error, tolerance, pass\n";
    for (const auto& r : rep.comparison.rows) {
        s += r.name + ", " + fmt_double(r.simulated) + ", " + fmt_double(r.predicted)
             + ", " + fmt_double(r.rel_error) + ", " + fmt_double(r.tolerance)
             + ", " + (r.pass ? "pass" : "FAIL") + "\n";
    }
    if (rep.ratio_wrong_direction >= 0.0 || rep.ratio_no_reversal >= 0.0) {
        s += "\n[phase_matching]\n";
        if (rep.ratio_wrong_direction >= 0.0)
            kv(s, "ratio_wrong_direction", fmt_double(rep.ratio_wrong_direction));
        if (rep.ratio_no_reversal >= 0.0)
            kv(s, "ratio_no_reversal", fmt_double(rep.ratio_no_reversal));
    }
    if (!rep.comparison.notes.empty() || !rep.warnings.empty()) {
        s += "\n[notes]\n";
        for (const auto& n : rep.comparison.notes) s += "note: " + n + "\n";
        for (const auto& w : rep.warnings) s += "warning: " + w + "\n";
    }
    return s;
}

namespace {

void write_file(const std::filesystem::path& p, const std::string& content)
{
    std::ofstream f(p, std::ios::binary);
    if (!f)
        throw ValidationError("cannot write '" + p.string() + "'");
    f << content;
}

std::string envelope_trace(const FieldEnvelope& fe, int plane, double c_light)
{
    std::string s = "t, re, im, abs2\n";
    auto row = fe.plane(plane);
    for (int n = 0; n < fe.tgrid.n; ++n) {
        const double t = fe.global_time(plane, n, c_light);
        s += fmt_double(t) + ", " + fmt_double(row[n].real()) + ", "
             + fmt_double(row[n].imag()) + ", " + fmt_double(std::norm(row[n])) + "\n";
    }
    return s;
}

std::string snapshot_csv(const StageSnapshot& snap)
{
    std::string s = "v, re_sigma_ac, im_sigma_ac, re_sigma_ad, im_sigma_ad\n";
    for (size_t j = 0; j < snap.v.size(); ++j) {
        s += fmt_double(snap.v[j]) + ", "
             + fmt_double(snap.sigma_ac[j].real()) + ", " + fmt_double(snap.sigma_ac[j].imag()) + ", "
             + fmt_double(snap.sigma_ad[j].real()) + ", " + fmt_double(snap.sigma_ad[j].imag()) + "\n";
    }
    return s;
}

} // namespace

void write_artifacts(const RunArtifacts& art, const std::string& dir, double c_light)
{
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    write_file(fs::path(dir) / "report.txt", render_report(art.report));
    if (art.forward_field) {
        const auto& f = *art.forward_field;
        write_file(fs::path(dir) / "envelope_forward_z0.csv", envelope_trace(f, 0, c_light));
        write_file(fs::path(dir) / "envelope_forward_zL.csv",
                   envelope_trace(f, f.nplanes - 1, c_light));
    }
    if (art.backward_field) {
        const auto& f = *art.backward_field;
        write_file(fs::path(dir) / "envelope_backward_z0.csv", envelope_trace(f, 0, c_light));
        write_file(fs::path(dir) / "envelope_backward_zL.csv",
                   envelope_trace(f, f.nplanes - 1, c_light));
    }
    for (const auto& snap : art.snapshots)
        write_file(fs::path(dir) / ("coherence_" + stage_name(snap.stage) + ".csv"),
                   snapshot_csv(snap));
}

std::string render_sweep_csv(const std::string& param, const std::vector<SweepRow>& rows)
{
    std::string s = param + ", retrieved_fraction, analytic_fraction, rel_error\n";
    for (const auto& r : rows) {
        s += fmt_double(r.value) + ", " + fmt_double(r.retrieved_fraction) + ", "
             + fmt_double(r.analytic_fraction) + ", " + fmt_double(r.rel_error) + "\n";
    }
    return s;
}

} // namespace qraman::cli
