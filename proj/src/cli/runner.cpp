#include "qraman/cli/runner.hpp"
#include "qraman/dynamics/evolution.hpp"
#include "qraman/errors.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace qraman::cli {

using namespace propagation;
using dynamics::PiPulseSpec;

Envelope build_input(const ScenarioConfig& cfg)
{
    switch (cfg.shape) {
    case EnvelopeShape::gaussian:
        return Envelope::gaussian(cfg.phys.omega1_peak, cfg.tl.t1, cfg.tl.tau_p);
    case EnvelopeShape::square:
        return Envelope::square(cfg.phys.omega1_peak, cfg.tl.t1, cfg.tl.tau_p);
    case EnvelopeShape::two_hump:
        return Envelope::two_hump(cfg.phys.omega1_peak, cfg.tl.t1, cfg.tl.tau_p,
                                  cfg.hump_separation_taus * cfg.tl.tau_p, cfg.hump_ratio);
    case EnvelopeShape::custom: {
        std::ifstream f(cfg.samples_file);
        if (!f)
            throw ValidationError("input: cannot open samples file '" + cfg.samples_file + "'");
        std::vector<double> t;
        std::vector<cplx> a;
        std::string line;
        while (std::getline(f, line)) {
            if (line.empty() || line[0] == '#') continue;
            std::replace(line.begin(), line.end(), ',', ' ');
            std::istringstream is(line);
            double tt, re, im = 0.0;
            if (is >> tt >> re) {
                is >> im;
                t.push_back(tt);
                a.push_back({ re, im });
            }
        }
        return Envelope::from_samples(std::move(t), std::move(a));
    }
    }
    throw ValidationError("input: unknown envelope shape");
}

geometry::DesignPoint resolve_design(const ScenarioConfig& cfg, double delta_s)
{
    if (cfg.theta_auto)
        return geometry::optimize_angle(delta_s, cfg.margin, cfg.phys);
    return geometry::design_point(cfg.theta, delta_s, cfg.phys);
}

std::vector<std::string> validate_scenario(const ScenarioConfig& cfg)
{
    std::vector<std::string> v;
    cfg.phys.collect_violations(v);

    double delta_s = 0.0;
    geometry::DesignPoint dp;
    try {
        delta_s = signal_bandwidth(build_input(cfg));
        dp = resolve_design(cfg, delta_s);
        BeamGeometry geom = BeamGeometry::from_angle(dp.theta, cfg.phys.k);
        geom.collect_violations(v);
        if (dp.bandwidth <= delta_s)
            v.push_back("geometry: memory bandwidth Ku = " + std::to_string(dp.bandwidth)
                        + " rad/s does not exceed the signal bandwidth delta_s = "
                        + std::to_string(delta_s) + " rad/s");
    } catch (const ValidationError& e) {
        v.push_back(e.what());
        return v; // geometry unresolved; later checks would cascade
    }

    const double wst_half = 0.5 * cfg.storage_window * cfg.tl.tau_p;
    cfg.tl.collect_violations(v, delta_s, wst_half);

    if (!cfg.light_shift_manual || cfg.acknowledge_light_shift) {
        // auto mode always compensates; manual with acknowledgment is free
    } else if (!cfg.phys.light_shift_compensated()) {
        v.push_back("physical: delta1 - delta2 does not cancel the light shift |omega2|^2/delta1 "
                    "and acknowledge_light_shift is not set");
    }

    // pulse areas
    for (auto [label, area] : { std::pair<const char*, double>{ "theta2", cfg.effective_theta2() },
                                { "theta3", cfg.effective_theta3() } }) {
        if (std::abs(area - std::numbers::pi) > cfg.area_tolerance) {
            std::ostringstream os;
            os << "pulses: |" << label << " - pi| = " << std::abs(area - std::numbers::pi)
               << " exceeds area_tolerance = " << cfg.area_tolerance;
            v.push_back(os.str());
        }
    }

    // atomic transport across the envelope (Eulerian grid validity)
    const double t13 = cfg.tl.t3 - cfg.tl.t1;
    const double travel = cfg.phys.u * t13;
    const double env_width = std::isfinite(cfg.c_light) ? cfg.c_light * cfg.tl.tau_p
                                                        : std::numeric_limits<double>::infinity();
    const double bound = 0.1 * std::min(env_width, 1.0 / dp.alphaR);
    if (travel > bound) {
        std::ostringstream os;
        os << "transport: atoms travel u (t3 - t1) = " << travel
           << " m, exceeding 10% of min(envelope width, 1/alphaR) = " << bound << " m";
        v.push_back(os.str());
    }

    // stage boundaries against solver windows and transit; one auto time
    // step of slack covers the grid's ceil rounding
    const double transit = std::isfinite(cfg.c_light) ? cfg.phys.length / cfg.c_light : 0.0;
    const double dt_slack = cfg.dt > 0.0 ? cfg.dt : 1.0 / (20.0 * delta_s);
    const double storage_end = cfg.tl.t1 + wst_half + transit + dt_slack;
    if (cfg.tl.t2 - 0.5 * cfg.tl.tau_pi < storage_end)
        v.push_back("timeline: t2 too early; the freeze pulse must start after the storage window "
                    "clears the medium");
    const double wr_half = 0.5 * cfg.retrieval_window * cfg.tl.tau_p;
    if (cfg.tl.echo_time() - wr_half < cfg.tl.t3 + 0.5 * cfg.tl.tau_pi)
        v.push_back("timeline: t12 too short; the retrieval window would open before the reversal "
                    "pulse ends (need t12 >= retrieval_window/2 * tau_p + tau_pi/2)");
    if (cfg.control_lead * cfg.tl.tau_p > cfg.tl.t12())
        v.push_back("solver: control_lead reaches before t3; reduce the lead or enlarge t12");

    if (cfg.nv > 0 && cfg.nv < 8)
        v.push_back("solver: nv must be >= 8");
    if (cfg.pi_finite && cfg.tl.t23() < 2.0 * cfg.tl.tau_pi)
        v.push_back("timeline: finite pi-pulse mode needs t23 >= 2 tau_pi so the pulses do not overlap");
    return v;
}

VelocityGrid build_velocity_grid(const ScenarioConfig& cfg, const geometry::DesignPoint& dp,
                                 bool with_trials)
{
    const double Ku = dp.bandwidth;
    const double taup = cfg.tl.tau_p;
    const double transit = std::isfinite(cfg.c_light) ? cfg.phys.length / cfg.c_light : 0.0;
    // worst-case |K u tau| across every velocity sum the run will take:
    // the storage window, the matched readout, and (for trials) the
    // unrephased readout which keeps the full t12/t23 phases
    double span = cfg.storage_window * taup;
    span = std::max(span, 0.5 * (cfg.storage_window + cfg.retrieval_window) * taup);
    if (with_trials)
        span = std::max(span, 2.0 * cfg.tl.t12() + cfg.tl.t23()
                              + 0.5 * (cfg.storage_window + cfg.retrieval_window) * taup);
    span += 2.0 * transit;
    const double span_ku = Ku * span * 1.05 + 2.0;

    if (cfg.nv > 0)
        return VelocityGrid::gauss_hermite(cfg.phys.u, cfg.nv, span_ku);

    // auto: smallest power of two whose resolved span covers the need
    // (empirically ~ 2 sqrt(2n) - 8)
    int n = 64;
    while (2.0 * std::sqrt(2.0 * n) - 8.0 < span_ku && n < 16384)
        n *= 2;
    for (; n <= 16384; n *= 2) {
        VelocityGrid g = VelocityGrid::gauss_hermite(cfg.phys.u, n);
        if (g.resolved_phase_span(1e-6, span_ku + 1.0) >= span_ku)
            return g;
    }
    std::ostringstream os;
    os << "velocity grid: required phase span " << span_ku
       << " not resolvable with <= 16384 nodes";
    throw ResolutionError(os.str());
}

namespace {

struct ProtocolState {
    EnsembleState state;
    double stored_population = 0.0;
};

// advances the post-storage ensemble through the freeze and reversal stages;
// decay is applied as scalar per-stage factors pinned to the nominal
// intervals so that closed-form factorization holds exactly
void run_middle_stages(EnsembleState& state, const ScenarioConfig& cfg,
                       const geometry::DesignPoint& dp, bool skip_pulses)
{
    const double K = dp.K;
    const auto& tl = cfg.tl;
    const double gac = cfg.phys.gamma_ac, gad = cfg.phys.gamma_ad;

    PiPulseSpec p2, p3;
    p2.area = cfg.effective_theta2();
    p2.direction = +1;
    p2.tau = tl.tau_pi;
    p2.delta = cfg.phys.delta_pi;
    p2.shape = cfg.pulse_shape;
    p3 = p2;
    p3.area = cfg.effective_theta3();
    p3.direction = -1;

    if (!cfg.pi_finite) {
        // phases leg t_ref -> t2, then scalar decay over the nominal t12
        dynamics::free_evolve_ac(state, tl.t2 - state.t_ref, 0.0, K);
        dynamics::apply_decay_ac(state, std::exp(-gac * tl.t12()));
        if (!skip_pulses) {
            dynamics::pi_pulse_rotate(state, p2, K);
            state.stage = ProtocolStage::after_freeze;
        }
        dynamics::free_evolve_ac(state, tl.t23(), 0.0, K);
        dynamics::free_evolve_ad(state, tl.t23(), 0.0);
        dynamics::apply_decay_ac(state, std::exp(-gac * tl.t23()));
        dynamics::apply_decay_ad(state, std::exp(-gad * tl.t23()));
        if (!skip_pulses) {
            dynamics::pi_pulse_rotate(state, p3, K);
            state.stage = ProtocolStage::after_reversal;
        }
    } else {
        p2.gamma_ac = gac;
        p2.gamma_ad = gad;
        p3.gamma_ac = gac;
        p3.gamma_ad = gad;
        const double dtp = 0.02 * tl.tau_pi;
        dynamics::free_evolve_ac(state, (tl.t2 - 0.5 * tl.tau_pi) - state.t_ref, 0.0, K);
        dynamics::apply_decay_ac(state, std::exp(-gac * (tl.t12() - 0.5 * tl.tau_pi)));
        if (!skip_pulses) {
            dynamics::pi_pulse_integrate(state, p2, K, dtp);
            state.stage = ProtocolStage::after_freeze;
        } else {
            dynamics::free_evolve_ac(state, tl.tau_pi, gac, K);
        }
        const double gap = tl.t23() - tl.tau_pi;
        dynamics::free_evolve_ac(state, gap, 0.0, K);
        dynamics::free_evolve_ad(state, gap, 0.0);
        dynamics::apply_decay_ac(state, std::exp(-gac * gap));
        dynamics::apply_decay_ad(state, std::exp(-gad * gap));
        if (!skip_pulses) {
            dynamics::pi_pulse_integrate(state, p3, K, dtp);
            state.stage = ProtocolStage::after_reversal;
        } else {
            dynamics::free_evolve_ac(state, tl.tau_pi, gac, K);
        }
    }
}

StageSnapshot take_snapshot(const EnsembleState& s)
{
    StageSnapshot snap;
    snap.stage = s.stage;
    snap.iz = s.nz / 2;
    snap.v = s.vgrid.nodes();
    snap.sigma_ac.resize(s.nv());
    snap.sigma_ad.resize(s.nv());
    for (int j = 0; j < s.nv(); ++j) {
        snap.sigma_ac[j] = s.sigma_ac[s.idx(snap.iz, j)];
        snap.sigma_ad[j] = s.sigma_ad[s.idx(snap.iz, j)];
    }
    return snap;
}

double echo_centroid(const FieldEnvelope& f, int plane)
{
    auto row = f.plane(plane);
    double num = 0.0, den = 0.0;
    for (int n = 0; n < f.tgrid.n; ++n) {
        const double p = std::norm(row[n]);
        num += p * f.tgrid.at(n);
        den += p;
    }
    return den > 0.0 ? num / den : 0.0;
}

} // namespace

RunArtifacts run_scenario(const ScenarioConfig& cfg, const RunOptions& opt)
{
    const auto t_start = std::chrono::steady_clock::now();

    auto violations = validate_scenario(cfg);
    if (!violations.empty())
        throw ValidationError("scenario validation failed:", violations);

    RunArtifacts art;
    RunReport& rep = art.report;
    rep.config_hash = cfg.hash;

    const Envelope input = build_input(cfg);
    rep.delta_s = signal_bandwidth(input);
    rep.tau_p = cfg.tl.tau_p;
    rep.design = resolve_design(cfg, rep.delta_s);
    if (!rep.design.warning.empty())
        rep.warnings.push_back(rep.design.warning);

    RamanMedium medium;
    medium.phys = cfg.phys;
    medium.geom = BeamGeometry::from_angle(rep.design.theta, cfg.phys.k);
    medium.c = cfg.c_light;
    medium.vgrid = build_velocity_grid(cfg, rep.design, opt.with_trials);

    SolverOptions sopt;
    sopt.mode = cfg.mode;
    sopt.nz = cfg.nz;
    sopt.dt = cfg.dt;
    sopt.storage_window = cfg.storage_window;
    sopt.retrieval_window = cfg.retrieval_window;
    sopt.control_lead = cfg.control_lead;
    sopt.decay = cfg.decay;

    rep.solver_mode = cfg.mode == SolverMode::local ? "local" : "resolved";
    rep.pi_pulse_mode = cfg.pi_finite ? "finite" : "impulsive";
    rep.decay_convention = cfg.decay == DecayConvention::echo_time ? "echo_time" : "emission_time";
    if (rep.delta_s > rep.design.bandwidth / 3.0)
        rep.warnings.push_back("bandwidth margin Ku/delta_s below 3: expect storage distortion "
                               "(clean broadband mode wants delta_s <= Ku/3)");
    {
        PiPulseSpec probe;
        probe.area = cfg.effective_theta2();
        probe.tau = cfg.tl.tau_pi;
        probe.delta = cfg.phys.delta_pi;
        probe.shape = cfg.pulse_shape;
        const double resid = probe.two_level_residual(rep.delta_s);
        if (resid > 0.1) {
            std::ostringstream os;
            os << "pi-pulse two-level validity marginal: |FT(Omega_pi)(Delta +- delta_s)|^2 = "
               << resid << " (one-photon leakage to the upper level is not negligible)";
            rep.warnings.push_back(os.str());
        }
    }

    // stage 1
    StorageResult storage = propagate_storage(input, medium, cfg.tl, sopt);
    rep.energy_in = storage.energy_in;
    rep.energy_transmitted = storage.energy_transmitted;
    rep.transmitted_fraction = storage.energy_transmitted / storage.energy_in;
    rep.stored_fraction = 1.0 - rep.transmitted_fraction;
    rep.nz = storage.state.nz;
    rep.nv = medium.vgrid.size();
    rep.dt = storage.field.tgrid.dt;
    rep.nt_storage = storage.field.tgrid.n;
    storage.state.check_perturbative();
    rep.max_abs_sigma = storage.state.max_abs_sigma();

    const double stored_population = storage.state.population_ac();
    if (opt.keep_fields) {
        art.forward_field = storage.field;
        art.snapshots.push_back(take_snapshot(storage.state));
    }

    // stages 2 and 3
    EnsembleState state = std::move(storage.state);
    run_middle_stages(state, cfg, rep.design, /*skip_pulses=*/false);
    if (opt.keep_fields)
        art.snapshots.push_back(take_snapshot(state));

    // stage 4: the readout-leg decay e^{-gamma_ac t12} is applied as a
    // tallied scalar here; the emission-time convention additionally lets
    // the window ODEs decay relative to the echo instant
    dynamics::apply_decay_ac(state, std::exp(-cfg.phys.gamma_ac * cfg.tl.t12()));
    RetrievalSetup setup;
    setup.echo_time = cfg.tl.echo_time();
    setup.control_on = cfg.tl.echo_time() - cfg.control_lead * cfg.tl.tau_p;
    setup.readout_tag = -1;
    setup.backward = true;
    if (cfg.decay == DecayConvention::echo_time) {
        setup.source_decay = 1.0;
        setup.window_gamma_ac = 0.0;
    } else {
        setup.source_decay = std::exp(+cfg.phys.gamma_ac * cfg.tl.t12());
        setup.window_gamma_ac = cfg.phys.gamma_ac;
    }

    RetrievalResult ret = propagate_retrieval(state, medium, cfg.tl, sopt, setup, rep.delta_s);
    rep.nt_retrieval = ret.field.tgrid.n;
    rep.energy_retrieved = ret.energy_out;
    rep.retrieved_fraction = ret.energy_out / rep.energy_in;
    rep.echo_time_sim = echo_centroid(ret.field, 0);
    rep.mirror_overlap = oracle::mirror_overlap(ret.field.tgrid, ret.field.plane(0),
                                                input, cfg.tl.t1, cfg.tl.echo_time());
    rep.residual = residual_population(ret.final_state, stored_population);
    if (opt.keep_fields) {
        art.backward_field = ret.field;
        art.snapshots.push_back(take_snapshot(ret.final_state));
    }

    // closed-form comparison
    rep.prediction = oracle::predict(cfg.phys, medium.geom, cfg.tl, input, rep.delta_s, cfg.c_light);
    oracle::SimSummary sim;
    sim.transmitted_fraction = rep.transmitted_fraction;
    sim.retrieved_fraction = rep.retrieved_fraction;
    sim.residual_eta = rep.residual.eta_total();
    sim.mirror_overlap = rep.mirror_overlap;
    sim.echo_time = rep.echo_time_sim;
    sim.tau_p = cfg.tl.tau_p;
    sim.stored_fraction = rep.stored_fraction;
    sim.pulse_area2 = cfg.effective_theta2();
    sim.pulse_area3 = cfg.effective_theta3();
    rep.comparison = oracle::compare(sim, rep.prediction, oracle::Tolerances{});

    if (opt.with_trials) {
        rep.ratio_wrong_direction = phase_matching_check(state, medium, cfg.tl, sopt,
                                                         +1, +1, rep.delta_s, ret.energy_out);
        // no-reversal variant: re-run storage's ensemble through the middle
        // stages with both pulses off, then attempt the correct readout
        StorageResult storage2 = propagate_storage(input, medium, cfg.tl, sopt);
        EnsembleState unreversed = std::move(storage2.state);
        run_middle_stages(unreversed, cfg, rep.design, /*skip_pulses=*/true);
        rep.ratio_no_reversal = phase_matching_check(unreversed, medium, cfg.tl, sopt,
                                                     -1, -1, rep.delta_s, ret.energy_out);
    }

    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return art;
}

std::vector<SweepRow> run_sweep(const std::string& config_text, const std::string& origin,
                                const std::string& param, const std::vector<double>& values)
{
    std::vector<SweepRow> rows;
    auto base_entries = config_entries(config_text);

    for (double value : values) {
        auto entries = base_entries;
        if (param == "derived.optical_depth") {
            // rescale alpha0 to hit the requested alphaR L at the resolved geometry
            ScenarioConfig probe = parse_config(render_config(entries), origin);
            const Envelope input = build_input(probe);
            const double ds = signal_bandwidth(input);
            const auto dp = resolve_design(probe, ds);
            const double alpha0 = probe.phys.alpha0 * value / dp.optical_depth;
            char buf[32];
            auto r = std::to_chars(buf, buf + sizeof buf, alpha0);
            entries["physical.alpha0"] = std::string(buf, r.ptr);
        } else {
            if (param.find('.') == std::string::npos)
                throw ValidationError("sweep: parameter path '" + param
                                      + "' must be section.key or derived.optical_depth");
            char buf[32];
            auto r = std::to_chars(buf, buf + sizeof buf, value);
            entries[param] = std::string(buf, r.ptr); // unknown keys rejected by the parser
        }
        ScenarioConfig cfg = parse_config(render_config(entries), origin);
        RunArtifacts art = run_scenario(cfg);
        SweepRow row;
        row.value = value;
        row.retrieved_fraction = art.report.retrieved_fraction;
        row.analytic_fraction = art.report.prediction.retrieved_fraction;
        row.rel_error = std::abs(row.retrieved_fraction - row.analytic_fraction)
                        / std::max(row.analytic_fraction, 1e-300);
        rows.push_back(row);
    }
    return rows;
}

} // namespace qraman::cli
