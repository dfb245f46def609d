#include "qraman/cli/config.hpp"
#include "qraman/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

namespace qraman::cli {

namespace {

std::string trim(const std::string& s)
{
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string lower(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

double parse_number(const std::string& key, const std::string& v)
{
    const std::string s = lower(trim(v));
    if (s == "inf" || s == "infinity")
        return std::numeric_limits<double>::infinity();
    if (s == "pi")
        return std::numbers::pi;
    try {
        size_t pos = 0;
        double d = std::stod(s, &pos);
        if (pos != s.size())
            throw std::invalid_argument("trailing characters");
        return d;
    } catch (const std::exception&) {
        throw ValidationError("config: cannot parse number for '" + key + "': '" + v + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& v)
{
    const std::string s = lower(trim(v));
    if (s == "true" || s == "yes" || s == "1") return true;
    if (s == "false" || s == "no" || s == "0") return false;
    throw ValidationError("config: cannot parse boolean for '" + key + "': '" + v + "'");
}

std::string canonical_value(const std::string& key, const std::string& v)
{
    // numbers canonicalize to their shortest round-trip form so that
    // 1e-7 and 0.0000001 hash identically; non-numeric values lower-case
    const std::string s = trim(v);
    try {
        size_t pos = 0;
        double d = std::stod(s, &pos);
        if (pos == s.size()) {
            char buf[32];
            auto r = std::to_chars(buf, buf + sizeof buf, d);
            return std::string(buf, r.ptr);
        }
    } catch (const std::exception&) {
    }
    (void)key;
    return lower(s);
}

} // namespace

std::uint64_t fnv1a64(const std::string& s, std::uint64_t h)
{
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::map<std::string, std::string> config_entries(const std::string& text)
{
    std::map<std::string, std::string> out;
    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        size_t hash_pos = line.find('#');
        if (hash_pos != std::string::npos) line.erase(hash_pos);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ValidationError("config: malformed section header at line " + std::to_string(lineno));
            section = lower(trim(line.substr(1, line.size() - 2)));
            continue;
        }
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError("config: expected 'key = value' at line " + std::to_string(lineno));
        std::string key = lower(trim(line.substr(0, eq)));
        std::string val = trim(line.substr(eq + 1));
        if (section.empty())
            throw ValidationError("config: key '" + key + "' outside any [section] at line "
                                  + std::to_string(lineno));
        out[section + "." + key] = val;
    }
    return out;
}

std::string render_config(const std::map<std::string, std::string>& entries)
{
    std::string section;
    std::string out;
    for (const auto& [path, value] : entries) {
        const size_t dot = path.find('.');
        const std::string sec = path.substr(0, dot);
        if (sec != section) {
            section = sec;
            out += "[" + section + "]\n";
        }
        out += path.substr(dot + 1) + " = " + value + "\n";
    }
    return out;
}

ScenarioConfig parse_config(const std::string& text, const std::string& origin)
{
    auto entries = config_entries(text);
    ScenarioConfig cfg;
    std::vector<std::string> errors;
    std::uint64_t h = 1469598103934665603ull;

    auto take = [&](const std::string& path) -> std::string* {
        auto it = entries.find(path);
        return it == entries.end() ? nullptr : &it->second;
    };
    auto num = [&](const std::string& path, double& dst, bool required = false) {
        if (auto* v = take(path)) {
            try {
                dst = parse_number(path, *v);
            } catch (const ValidationError& e) {
                errors.push_back(e.what());
            }
        } else if (required) {
            errors.push_back("config: missing required key '" + path + "'");
        }
    };

    num("physical.delta1", cfg.phys.delta1, true);
    num("physical.gamma_ab", cfg.phys.gamma_ab);
    num("physical.gamma_ac", cfg.phys.gamma_ac);
    num("physical.gamma_ad", cfg.phys.gamma_ad);
    num("physical.omega1_peak", cfg.phys.omega1_peak, true);
    {
        double re = 0.0, im = 0.0;
        num("physical.omega2_re", re, true);
        num("physical.omega2_im", im);
        cfg.phys.omega2 = { re, im };
    }
    num("physical.omega_pi_peak", cfg.phys.omega_pi_peak);
    num("physical.delta_pi", cfg.phys.delta_pi, true);
    num("physical.alpha0", cfg.phys.alpha0, true);
    num("physical.u", cfg.phys.u, true);
    num("physical.length", cfg.phys.length, true);
    num("physical.k", cfg.phys.k, true);

    if (auto* v = take("physical.light_shift")) {
        const std::string s = lower(trim(*v));
        if (s == "auto") cfg.light_shift_manual = false;
        else if (s == "manual") cfg.light_shift_manual = true;
        else errors.push_back("config: physical.light_shift must be auto|manual");
    }
    if (auto* v = take("physical.acknowledge_light_shift")) {
        try { cfg.acknowledge_light_shift = parse_bool("physical.acknowledge_light_shift", *v); }
        catch (const ValidationError& e) { errors.push_back(e.what()); }
    }
    if (cfg.light_shift_manual) {
        num("physical.delta2", cfg.phys.delta2, true);
    } else if (cfg.phys.delta1 != 0.0) {
        cfg.phys.delta2 = cfg.phys.delta1 - std::norm(cfg.phys.omega2) / cfg.phys.delta1;
    }

    if (auto* v = take("geometry.theta")) {
        const std::string s = lower(trim(*v));
        if (s == "auto") {
            cfg.theta_auto = true;
        } else {
            cfg.theta_auto = false;
            try { cfg.theta = parse_number("geometry.theta", *v); }
            catch (const ValidationError& e) { errors.push_back(e.what()); }
        }
    }
    num("geometry.margin", cfg.margin);

    num("timeline.t1", cfg.tl.t1);
    num("timeline.tau_p", cfg.tl.tau_p, true);
    num("timeline.tau_pi", cfg.tl.tau_pi, true);
    {
        double t12 = -1.0, t23 = -1.0;
        num("timeline.t12", t12);
        num("timeline.t23", t23);
        if (t12 >= 0.0) cfg.tl.t2 = cfg.tl.t1 + t12;
        else num("timeline.t2", cfg.tl.t2, true);
        if (t23 >= 0.0) cfg.tl.t3 = cfg.tl.t2 + t23;
        else num("timeline.t3", cfg.tl.t3, true);
    }

    if (auto* v = take("input.shape")) {
        const std::string s = lower(trim(*v));
        if (s == "gaussian") cfg.shape = EnvelopeShape::gaussian;
        else if (s == "square") cfg.shape = EnvelopeShape::square;
        else if (s == "two_hump") cfg.shape = EnvelopeShape::two_hump;
        else if (s == "custom") cfg.shape = EnvelopeShape::custom;
        else errors.push_back("config: input.shape must be gaussian|square|two_hump|custom");
    }
    num("input.hump_separation", cfg.hump_separation_taus);
    num("input.hump_ratio", cfg.hump_ratio);
    if (auto* v = take("input.samples_file")) cfg.samples_file = trim(*v);
    if (cfg.shape == EnvelopeShape::custom && cfg.samples_file.empty())
        errors.push_back("config: input.shape = custom requires input.samples_file");

    num("pulses.theta2", cfg.theta2);
    num("pulses.theta3", cfg.theta3);
    num("pulses.area_tolerance", cfg.area_tolerance);
    if (auto* v = take("pulses.shape")) {
        const std::string s = lower(trim(*v));
        if (s == "square") cfg.pulse_shape = dynamics::PiPulseShape::square;
        else if (s == "gaussian") cfg.pulse_shape = dynamics::PiPulseShape::gaussian;
        else errors.push_back("config: pulses.shape must be square|gaussian");
    }

    if (auto* v = take("solver.mode")) {
        const std::string s = lower(trim(*v));
        if (s == "local") cfg.mode = propagation::SolverMode::local;
        else if (s == "resolved") cfg.mode = propagation::SolverMode::resolved;
        else errors.push_back("config: solver.mode must be local|resolved");
    }
    if (auto* v = take("solver.pi_pulse")) {
        const std::string s = lower(trim(*v));
        if (s == "impulsive") cfg.pi_finite = false;
        else if (s == "finite") cfg.pi_finite = true;
        else errors.push_back("config: solver.pi_pulse must be impulsive|finite");
    }
    {
        double x = 0.0;
        num("solver.nz", x);
        cfg.nz = static_cast<int>(x);
        x = 0.0;
        num("solver.nv", x);
        cfg.nv = static_cast<int>(x);
    }
    num("solver.dt", cfg.dt);
    num("solver.storage_window", cfg.storage_window);
    num("solver.retrieval_window", cfg.retrieval_window);
    num("solver.control_lead", cfg.control_lead);
    num("solver.c_light", cfg.c_light);
    if (auto* v = take("solver.decay_convention")) {
        const std::string s = lower(trim(*v));
        if (s == "echo_time") cfg.decay = propagation::DecayConvention::echo_time;
        else if (s == "emission_time") cfg.decay = propagation::DecayConvention::emission_time;
        else errors.push_back("config: solver.decay_convention must be echo_time|emission_time");
    }

    if (auto* v = take("output.directory")) cfg.output_dir = trim(*v);

    // unknown-key detection
    static const char* known[] = {
        "physical.delta1", "physical.delta2", "physical.light_shift",
        "physical.acknowledge_light_shift", "physical.gamma_ab", "physical.gamma_ac",
        "physical.gamma_ad", "physical.omega1_peak", "physical.omega2_re", "physical.omega2_im",
        "physical.omega_pi_peak", "physical.delta_pi", "physical.alpha0", "physical.u",
        "physical.length", "physical.k",
        "geometry.theta", "geometry.margin",
        "timeline.t1", "timeline.t2", "timeline.t3", "timeline.t12", "timeline.t23",
        "timeline.tau_p", "timeline.tau_pi",
        "input.shape", "input.hump_separation", "input.hump_ratio", "input.samples_file",
        "pulses.theta2", "pulses.theta3", "pulses.area_tolerance", "pulses.shape",
        "solver.mode", "solver.pi_pulse", "solver.nz", "solver.nv", "solver.dt",
        "solver.storage_window", "solver.retrieval_window", "solver.control_lead",
        "solver.c_light", "solver.decay_convention",
        "output.directory",
    };
    for (const auto& [path, value] : entries) {
        bool ok = false;
        for (const char* k : known)
            if (path == k) { ok = true; break; }
        if (!ok)
            errors.push_back("config: unknown key '" + path + "'");
    }

    if (!errors.empty())
        throw ValidationError("invalid configuration " + origin + ":", errors);

    // hash over canonicalized semantic entries (output.directory excluded:
    // it does not affect results)
    for (const auto& [path, value] : entries) {
        if (path == "output.directory") continue;
        h = fnv1a64(path, h);
        h = fnv1a64("=", h);
        h = fnv1a64(canonical_value(path, value), h);
        h = fnv1a64("\n", h);
    }
    cfg.hash = h;
    return cfg;
}

ScenarioConfig load_config(const std::string& path)
{
    std::ifstream f(path);
    if (!f)
        throw ValidationError("config: cannot open '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str(), "'" + path + "'");
}

double ScenarioConfig::effective_theta2() const
{
    if (theta2 > 0.0) return theta2;
    if (phys.omega_pi_peak > 0.0 && tl.tau_pi > 0.0 && phys.delta_pi != 0.0)
        return 2.0 * phys.omega_pi_peak * phys.omega_pi_peak * tl.tau_pi / phys.delta_pi;
    return std::numbers::pi;
}

double ScenarioConfig::effective_theta3() const
{
    if (theta3 > 0.0) return theta3;
    if (phys.omega_pi_peak > 0.0 && tl.tau_pi > 0.0 && phys.delta_pi != 0.0)
        return 2.0 * phys.omega_pi_peak * phys.omega_pi_peak * tl.tau_pi / phys.delta_pi;
    return std::numbers::pi;
}

} // namespace qraman::cli
