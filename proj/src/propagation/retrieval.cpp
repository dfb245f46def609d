#include "qraman/propagation/retrieval.hpp"
#include "qraman/dynamics/etd.hpp"
#include "qraman/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qraman::propagation {

namespace {

using dynamics::EtdCoeffs;

struct SliceWork {
    // echo source: sigma3 * exp((-i m K v - gamma)(t_global - t_ref3)), with
    // the per-slice transit offset folded into the initial phase
    std::vector<cplx> echo_init;  // per v, amplitude at the first grid instant
    std::vector<cplx> echo_step;  // per v, advance over one dt
    std::vector<EtdCoeffs> co;    // driven-coherence propagator
};

} // namespace

RetrievalResult propagate_retrieval(const EnsembleState& state, const RamanMedium& medium,
                                    const ProtocolTimeline& tl, const SolverOptions& opt,
                                    const RetrievalSetup& setup, double delta_s)
{
    const int nz = state.nz;
    const int nv = state.nv();
    const double dz = state.dz;
    const double L = medium.phys.length;
    const double K = medium.geom.K;
    const double Ku = K * medium.phys.u;
    const int m = setup.readout_tag;
    const cplx i1(0.0, 1.0);

    if (m != +1 && m != -1)
        throw ValidationError("propagate_retrieval: readout tag must be +1 or -1");

    const double dt = auto_dt(delta_s, opt);
    TimeGrid grid;
    const double W = opt.retrieval_window * tl.tau_p;
    grid.t0 = setup.echo_time - 0.5 * W;
    grid.dt = dt;
    grid.n = static_cast<int>(std::ceil(W / dt)) + 1;

    // every velocity sum taken below oscillates as exp(i K v arg); verify the
    // quadrature resolves the worst-case |K u arg| including this window
    const double t_ref3 = state.t_ref;
    double a1 = state.ac_phase_min - m * (grid.t0 - t_ref3);
    double a2 = state.ac_phase_max - m * (grid.t0 - t_ref3);
    double a3 = state.ac_phase_min - m * (grid.end() - t_ref3);
    double a4 = state.ac_phase_max - m * (grid.end() - t_ref3);
    const double arg_lo = std::min({ a1, a2, a3, a4 }) - medium.transit(L);
    const double arg_hi = std::max({ a1, a2, a3, a4 }) + medium.transit(L);
    const double span_needed = Ku * std::max({ std::abs(arg_lo), std::abs(arg_hi), W });
    const double resolved = medium.vgrid.resolved_phase_span(1e-6, span_needed + 1.0);
    if (resolved < span_needed) {
        std::ostringstream os;
        os << "propagate_retrieval: velocity grid resolves |K u tau| <= " << resolved
           << " but the readout needs " << span_needed << "; increase the node count";
        throw ResolutionError(os.str());
    }

    RetrievalResult res;
    res.field.tgrid = grid;
    res.field.delta_s = delta_s;
    res.field.dz = dz;
    res.field.nplanes = nz + 1;
    res.field.direction = setup.backward ? Direction::backward : Direction::forward;
    res.field.carrier = Carrier::signal;
    res.field.data.assign(static_cast<size_t>(nz + 1) * grid.n, 0.0);

    const double gwin = setup.window_gamma_ac;
    const cplx pref = i1 * medium.coupling() * medium.ratio();
    const cplx b_drive = -i1 * medium.ratio();

    // per-slice machinery; global time at slice center zc and advanced/retarded
    // local time t' differ by the transit of zc
    std::vector<SliceWork> work(nz);
    std::vector<int> n_on(nz); // first grid index with the control field on
    for (int iz = 0; iz < nz; ++iz) {
        const double zc = dz * (iz + 0.5);
        const double off = setup.backward ? -medium.transit(zc) : +medium.transit(zc);
        auto& w = work[iz];
        w.echo_init.resize(nv);
        w.echo_step.resize(nv);
        w.co.resize(nv);
        for (int j = 0; j < nv; ++j) {
            const double kv = K * state.vgrid.nodes()[j];
            const cplx a = -i1 * (m * kv) - gwin;
            // global time of the first sample at this slice
            const double tg0 = grid.t0 + off;
            w.echo_init[j] = setup.source_decay * state.sigma_ac[state.idx(iz, j)]
                             * std::exp(a * (tg0 - t_ref3));
            w.echo_step[j] = std::exp(a * dt);
            w.co[j] = EtdCoeffs::make(a, b_drive, dt);
        }
        const double t_on_local = setup.control_on - off;
        n_on[iz] = std::max(0, static_cast<int>(std::ceil((t_on_local - grid.t0) / dt)));
    }

    const auto& wv = state.vgrid.weights();

    // reduced polarization of the freely evolving echo coherence at slice iz
    auto echo_source = [&](int iz, std::vector<cplx>& out) {
        const auto& w = work[iz];
        std::vector<cplx> ph(w.echo_init);
        for (int n = 0; n < grid.n; ++n) {
            if (n >= n_on[iz]) {
                cplx acc = 0.0;
                for (int j = 0; j < nv; ++j) acc += wv[j] * ph[j];
                out[n] = pref * std::conj(acc);
            } else {
                out[n] = 0.0;
            }
            for (int j = 0; j < nv; ++j) ph[j] *= w.echo_step[j];
        }
    };

    // polarization of the coherence re-driven by the restored field
    auto driven_source = [&](int iz, std::span<const cplx> field, std::vector<cplx>& out,
                             std::vector<cplx>* sigma_out) {
        const auto& w = work[iz];
        std::vector<cplx> sig(nv, 0.0);
        if (opt.mode == SolverMode::local) {
            // broadband local depletion: S = -(alphaR/2) A, masked by control
            const double half_alpha = 0.5 * medium.alphaR();
            for (int n = 0; n < grid.n; ++n)
                out[n] = (n >= n_on[iz]) ? cplx(-half_alpha * field[n]) : cplx(0.0);
            if (sigma_out) {
                // still integrate the driven coherence for the bookkeeping
                for (int n = 0; n < grid.n - 1; ++n) {
                    const cplx d0 = n >= n_on[iz] ? std::conj(field[n]) : cplx(0.0);
                    const cplx d1 = n + 1 >= n_on[iz] ? std::conj(field[n + 1]) : cplx(0.0);
                    for (int j = 0; j < nv; ++j)
                        sig[j] = w.co[j].E * sig[j] + w.co[j].c1 * d0 + w.co[j].c2 * d1;
                }
                *sigma_out = sig;
            }
            return;
        }
        cplx acc = 0.0;
        out[0] = 0.0;
        for (int n = 0; n < grid.n - 1; ++n) {
            const cplx d0 = n >= n_on[iz] ? std::conj(field[n]) : cplx(0.0);
            const cplx d1 = n + 1 >= n_on[iz] ? std::conj(field[n + 1]) : cplx(0.0);
            acc = 0.0;
            for (int j = 0; j < nv; ++j) {
                sig[j] = w.co[j].E * sig[j] + w.co[j].c1 * d0 + w.co[j].c2 * d1;
                acc += wv[j] * sig[j];
            }
            out[n + 1] = pref * std::conj(acc);
        }
        if (sigma_out) *sigma_out = sig;
    };

    // march through the medium in the co-moving frame; per unit step along
    // the propagation direction the envelope gains dz * (S_echo + S_new),
    // with S = i g (omega2/delta1) <sigma*>. Backward fields enter at z = L
    // and exit at z = 0; forward trials run the other way.
    std::vector<cplx> f(grid.n, 0.0), fmid(grid.n);
    std::vector<cplx> s_echo(grid.n), s_new1(grid.n), s_new2(grid.n);

    auto step_cell = [&](int iz) {
        echo_source(iz, s_echo);
        driven_source(iz, f, s_new1, nullptr);
        for (int n = 0; n < grid.n; ++n)
            fmid[n] = f[n] + 0.5 * dz * (s_echo[n] + s_new1[n]);
        driven_source(iz, fmid, s_new2, nullptr);
        for (int n = 0; n < grid.n; ++n)
            f[n] += dz * (s_echo[n] + s_new2[n]);
    };

    if (setup.backward) {
        std::copy(f.begin(), f.end(), res.field.plane(nz).begin());
        for (int iz = nz - 1; iz >= 0; --iz) {
            step_cell(iz);
            std::copy(f.begin(), f.end(), res.field.plane(iz).begin());
        }
        res.energy_out = res.field.energy(0);
    } else {
        std::copy(f.begin(), f.end(), res.field.plane(0).begin());
        for (int iz = 0; iz < nz; ++iz) {
            step_cell(iz);
            std::copy(f.begin(), f.end(), res.field.plane(iz + 1).begin());
        }
        res.energy_out = res.field.energy(nz);
    }

    if (setup.want_final_state) {
        res.final_state = EnsembleState::zero(nz, dz, state.vgrid, grid.end());
        res.final_state.ac_tag = m;
        res.final_state.stage = ProtocolStage::after_retrieval;
        res.final_state.orphan_c = state.orphan_c;
        res.final_state.orphan_d = state.orphan_d;
        res.final_state.decayed_c = state.decayed_c;
        res.final_state.decayed_d = state.decayed_d;
        res.final_state.sigma_ad = state.sigma_ad; // untouched by the readout

        std::vector<cplx> drive(grid.n), dummy(grid.n), sig_new;
        for (int iz = 0; iz < nz; ++iz) {
            auto lo = res.field.plane(iz);
            auto hi = res.field.plane(iz + 1);
            for (int n = 0; n < grid.n; ++n) drive[n] = 0.5 * (lo[n] + hi[n]);
            driven_source(iz, drive, dummy, &sig_new);
            const auto& w = work[iz];
            // advance the echo part to the last grid instant, then re-reference
            // both parts from the slice's local end time to the common t_ref
            const double zc = dz * (iz + 0.5);
            const double off = setup.backward ? -medium.transit(zc) : +medium.transit(zc);
            for (int j = 0; j < nv; ++j) {
                const double kv = K * state.vgrid.nodes()[j];
                const cplx a = -i1 * (m * kv) - gwin;
                const cplx adj = std::exp(a * (-off)); // t_ref - (grid.end() + off)
                cplx ph = w.echo_init[j] * std::pow(w.echo_step[j], grid.n - 1);
                res.final_state.sigma_ac[res.final_state.idx(iz, j)] = (ph + sig_new[j]) * adj;
            }
        }
        // phase-derivative bounds: echo part carries the state's bounds shifted
        // by the full window readout; the re-driven part spans [-mW, 0]
        const double dend = grid.end() - t_ref3;
        double e1 = state.ac_phase_min - m * dend, e2 = state.ac_phase_max - m * dend;
        if (e1 > e2) std::swap(e1, e2);
        const double n1 = std::min(0.0, -m * W), n2 = std::max(0.0, -m * W);
        res.final_state.ac_phase_min = std::min(e1, n1) - medium.transit(L);
        res.final_state.ac_phase_max = std::max(e2, n2) + medium.transit(L);
        res.final_state.ad_phase_min = state.ad_phase_min;
        res.final_state.ad_phase_max = state.ad_phase_max;
    }
    return res;
}

double phase_matching_check(const EnsembleState& state, const RamanMedium& medium,
                            const ProtocolTimeline& tl, const SolverOptions& opt,
                            int trial_signal_dir, int trial_control_dir,
                            double delta_s, double correct_energy)
{
    if (std::abs(trial_signal_dir) != 1 || std::abs(trial_control_dir) != 1)
        throw ValidationError("phase_matching_check: directions must be +1 or -1");
    if (!(correct_energy > 0.0))
        throw ValidationError("phase_matching_check: correct-configuration energy must be > 0");

    const double Ku = medium.geom.K * medium.phys.u;
    if (Ku * tl.t12() < 10.0)
        throw ValidationError("phase_matching_check: requires the strong dephasing regime Ku t12 >= 10");

    if (trial_signal_dir != trial_control_dir)
        return 0.0; // pair beat vector ~ 2k; no Raman resonance with any stored component

    // (d, d) pairs couple to the coherence tag d*(k2 - k1)/K = d
    const int m_req = trial_signal_dir;

    RetrievalSetup setup;
    setup.echo_time = tl.echo_time();
    setup.control_on = tl.echo_time() - opt.control_lead * tl.tau_p;
    setup.readout_tag = m_req;
    setup.backward = trial_signal_dir < 0;
    setup.want_final_state = false;

    // guard: a mismatched-tag readout measures the unrephased velocity
    // average; its Doppler phase must stay away from zero over the whole
    // window, else the model would show a spurious rephasing
    if (m_req != state.ac_tag) {
        const double W = opt.retrieval_window * tl.tau_p;
        const double t0 = tl.echo_time() - 0.5 * W;
        const double dlo = t0 - state.t_ref, dhi = t0 + W - state.t_ref;
        double a1 = state.ac_phase_min - m_req * dlo, a2 = state.ac_phase_max - m_req * dlo;
        double a3 = state.ac_phase_min - m_req * dhi, a4 = state.ac_phase_max - m_req * dhi;
        const double lo = std::min({ a1, a2, a3, a4 }) - medium.transit(medium.phys.length);
        const double hi = std::max({ a1, a2, a3, a4 }) + medium.transit(medium.phys.length);
        const double guard = 8.0 / Ku;
        if (lo < guard && hi > -guard) {
            std::ostringstream os;
            os << "phase_matching_check: trial Doppler phase passes within 8/Ku of zero "
               << "(interval [" << lo * Ku << ", " << hi * Ku
               << "] in Ku units); enlarge t12/t23 or shrink the retrieval window";
            throw ValidationError(os.str());
        }
    }

    RetrievalResult trial = propagate_retrieval(state, medium, tl, opt, setup, delta_s);
    return trial.energy_out / correct_energy;
}

ResidualPopulation residual_population(const EnsembleState& final_state, double stored_population)
{
    if (!(stored_population > 0.0))
        throw ValidationError("residual_population: undefined ratio, no population was stored "
                              "(alphaR L = 0 or empty input)");
    ResidualPopulation r;
    r.stored = stored_population;
    r.coherent_c = final_state.population_ac();
    r.coherent_d = final_state.population_ad();
    r.orphan_c = final_state.population_orphan_c();
    r.orphan_d = final_state.population_orphan_d();
    r.decayed_c = final_state.population_decayed_c();
    r.decayed_d = final_state.population_decayed_d();
    return r;
}

} // namespace qraman::propagation
