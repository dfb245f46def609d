#include "qraman/propagation/polarization.hpp"

#include <cmath>

namespace qraman::propagation {

PolarizationField assemble_polarization(const EnsembleState& state, const RamanMedium& medium,
                                        const TimeGrid& grid,
                                        PolarizationComponent component,
                                        double window_gamma)
{
    PolarizationField p;
    p.tgrid = grid;
    p.dz = state.dz;
    p.nz = state.nz;
    p.component = component;
    p.values.assign(static_cast<size_t>(state.nz) * grid.n, 0.0);

    const int nv = state.nv();
    const cplx i1(0.0, 1.0);
    const cplx pref = i1 * medium.coupling() * medium.ratio();
    const auto& w = state.vgrid.weights();
    const double K = medium.geom.K;

    std::vector<cplx> ph(nv), step(nv);
    for (int iz = 0; iz < state.nz; ++iz) {
        for (int j = 0; j < nv; ++j) {
            const cplx a = -i1 * (state.ac_tag * K * state.vgrid.nodes()[j]) - window_gamma;
            ph[j] = state.sigma_ac[state.idx(iz, j)] * std::exp(a * (grid.t0 - state.t_ref));
            step[j] = std::exp(a * grid.dt);
        }
        for (int n = 0; n < grid.n; ++n) {
            cplx acc = 0.0;
            for (int j = 0; j < nv; ++j) {
                acc += w[j] * ph[j];
                ph[j] *= step[j];
            }
            p.values[static_cast<size_t>(iz) * grid.n + n] = pref * std::conj(acc);
        }
    }
    return p;
}

} // namespace qraman::propagation
