#include "qraman/propagation/storage.hpp"
#include "qraman/dynamics/etd.hpp"
#include "qraman/errors.hpp"

#include <cmath>
#include <sstream>

namespace qraman::propagation {

int auto_nz(const RamanMedium& medium, const SolverOptions& opt)
{
    if (opt.nz > 0) return opt.nz;
    const double d = medium.alphaR() * medium.phys.length;
    return std::max(32, static_cast<int>(std::ceil(20.0 * d)));
}

double auto_dt(double delta_s, const SolverOptions& opt)
{
    if (opt.dt > 0.0) return opt.dt;
    return 1.0 / (20.0 * delta_s);
}

namespace {

using dynamics::EtdCoeffs;

// Per-slice ensemble line driven by the local envelope: integrates the
// light-shift-compensated Raman ODE for every velocity class and, when
// `pol` is given, accumulates the reduced polarization source
// S(t) = i g (omega2/delta1) <sigma*>(t) at every grid instant.
struct SliceIntegrator {
    const RamanMedium& medium;
    std::vector<EtdCoeffs> co;
    cplx source_prefactor;

    SliceIntegrator(const RamanMedium& m, double dt)
        : medium(m)
    {
        const int nv = m.vgrid.size();
        const cplx i1(0.0, 1.0);
        const cplx b = -i1 * m.ratio();
        co.resize(nv);
        for (int j = 0; j < nv; ++j) {
            const cplx a = -i1 * m.geom.K * m.vgrid.nodes()[j]; // no decay during storage
            co[j] = EtdCoeffs::make(a, b, dt);
        }
        source_prefactor = i1 * m.coupling() * m.ratio();
    }

    // drive = signal envelope on the slice; sigma sized nv (in/out);
    // pol (optional) sized nt receives S(t); pol[0] uses the initial sigma.
    void run(std::span<const cplx> drive, std::vector<cplx>& sigma, std::vector<cplx>* pol) const
    {
        const int nv = static_cast<int>(sigma.size());
        const int nt = static_cast<int>(drive.size());
        const auto& w = medium.vgrid.weights();
        if (pol) {
            cplx acc = 0.0;
            for (int j = 0; j < nv; ++j) acc += w[j] * sigma[j];
            (*pol)[0] = source_prefactor * std::conj(acc);
        }
        for (int n = 0; n < nt - 1; ++n) {
            const cplx d0 = std::conj(drive[n]);
            const cplx d1 = std::conj(drive[n + 1]);
            cplx acc = 0.0;
            for (int j = 0; j < nv; ++j) {
                sigma[j] = co[j].E * sigma[j] + co[j].c1 * d0 + co[j].c2 * d1;
                acc += w[j] * sigma[j];
            }
            if (pol) (*pol)[n + 1] = source_prefactor * std::conj(acc);
        }
    }
};

} // namespace

StorageResult propagate_storage(const Envelope& input, const RamanMedium& medium,
                                const ProtocolTimeline& tl, const SolverOptions& opt)
{
    const double alphaR = medium.alphaR();
    const double L = medium.phys.length;
    const double delta_s = signal_bandwidth(input);
    const double Ku = medium.geom.K * medium.phys.u;

    if (delta_s >= Ku)
        throw ValidationError("propagate_storage: signal bandwidth delta_s exceeds the memory bandwidth Ku; "
                              "the Raman storage model does not apply");

    const int nz = auto_nz(medium, opt);
    const double dz = L / nz;
    const double dt = auto_dt(delta_s, opt);
    if (dz > 1.0 / (20.0 * alphaR) * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "propagate_storage: dz = " << dz << " m exceeds 1/(20 alphaR) = "
           << 1.0 / (20.0 * alphaR) << " m";
        throw ResolutionError(os.str());
    }
    if (dt > 1.0 / (20.0 * delta_s) * (1.0 + 1e-12))
        throw ResolutionError("propagate_storage: dt exceeds 1/(20 delta_s)");

    // co-moving storage window centered on the pulse
    TimeGrid grid;
    const double W = opt.storage_window * tl.tau_p;
    grid.t0 = tl.t1 - 0.5 * W;
    grid.dt = dt;
    grid.n = static_cast<int>(std::ceil(W / dt)) + 1;

    // velocity grid must resolve the window's phase span
    const double span_needed = Ku * grid.span();
    const double resolved = medium.vgrid.resolved_phase_span(1e-6, span_needed + 1.0);
    if (resolved < span_needed) {
        std::ostringstream os;
        os << "propagate_storage: velocity grid resolves |K u tau| <= " << resolved
           << " but the storage window needs " << span_needed << "; increase the node count";
        throw ResolutionError(os.str());
    }

    StorageResult res;
    res.delta_s = delta_s;
    res.field.tgrid = grid;
    res.field.delta_s = delta_s;
    res.field.dz = dz;
    res.field.nplanes = nz + 1;
    res.field.direction = Direction::forward;
    res.field.carrier = Carrier::signal;
    res.field.data.assign(static_cast<size_t>(nz + 1) * grid.n, 0.0);

    for (int n = 0; n < grid.n; ++n)
        res.field.plane(0)[n] = input(grid.at(n));
    res.energy_in = res.field.energy(0);

    const SliceIntegrator integ(medium, dt);

    if (opt.mode == SolverMode::local) {
        for (int iz = 1; iz <= nz; ++iz) {
            const double att = std::exp(-0.5 * alphaR * dz * iz);
            auto src = res.field.plane(0);
            auto dst = res.field.plane(iz);
            for (int n = 0; n < grid.n; ++n) dst[n] = att * src[n];
        }
    } else {
        // midpoint z-march; the medium response of cell iz (center) advances
        // the field from plane iz to plane iz+1
        std::vector<cplx> f(res.field.plane(0).begin(), res.field.plane(0).end());
        std::vector<cplx> fmid(grid.n), rhs1(grid.n), rhs2(grid.n), sig;
        for (int iz = 0; iz < nz; ++iz) {
            sig.assign(medium.vgrid.size(), 0.0);
            integ.run(f, sig, &rhs1);
            for (int n = 0; n < grid.n; ++n) fmid[n] = f[n] + 0.5 * dz * rhs1[n];
            sig.assign(medium.vgrid.size(), 0.0);
            integ.run(fmid, sig, &rhs2);
            for (int n = 0; n < grid.n; ++n) f[n] += dz * rhs2[n];
            auto dst = res.field.plane(iz + 1);
            for (int n = 0; n < grid.n; ++n) dst[n] = f[n];
        }
    }
    res.energy_transmitted = res.field.energy(nz);

    // final ensemble pass: every cell driven by its cell-center field,
    // then referenced at the common global instant t_ref
    const double t_local_end = grid.end();
    const double t_ref = t_local_end + medium.transit(L);
    res.state = EnsembleState::zero(nz, dz, medium.vgrid, t_ref);
    res.state.ac_tag = +1;
    res.state.stage = ProtocolStage::after_storage;

    std::vector<cplx> drive(grid.n), sig(medium.vgrid.size());
    const int nv = medium.vgrid.size();
    for (int iz = 0; iz < nz; ++iz) {
        auto lo = res.field.plane(iz);
        auto hi = res.field.plane(iz + 1);
        for (int n = 0; n < grid.n; ++n) drive[n] = 0.5 * (lo[n] + hi[n]);
        std::fill(sig.begin(), sig.end(), cplx(0.0));
        integ.run(drive, sig, nullptr);
        const double lag = t_ref - (t_local_end + medium.transit(dz * (iz + 0.5)));
        for (int j = 0; j < nv; ++j) {
            const cplx ph = std::polar(1.0, -medium.geom.K * medium.vgrid.nodes()[j] * lag);
            res.state.sigma_ac[res.state.idx(iz, j)] = sig[j] * ph;
        }
    }
    // stored phases are exp(-i K v (t_ref - t'')) for drive instants t''
    res.state.ac_phase_min = -(t_ref - grid.t0);
    res.state.ac_phase_max = -(t_ref - (grid.end() + medium.transit(L)));
    if (res.state.ac_phase_min > res.state.ac_phase_max)
        std::swap(res.state.ac_phase_min, res.state.ac_phase_max);
    res.state.ad_phase_min = 0.0;
    res.state.ad_phase_max = 0.0;
    return res;
}

} // namespace qraman::propagation
