#pragma once

#include "qraman/core/ensemble_state.hpp"
#include "qraman/core/field_envelope.hpp"
#include "qraman/propagation/medium.hpp"

namespace qraman::propagation {

enum class PolarizationComponent { storage, retrieval_source, retrieval_depletion };

/// Reduced macroscopic polarization: the Maxwell source in Rabi units,
/// S(z, t) = i g (omega2/delta1) sum_j w_j sigma_ac*(z, v_j, t) [rad/(s m)],
/// with the coherence evolved freely from the state's reference instant.
/// In the broadband limit the storage component is local:
/// S ~ -(alphaR/2) A(z, t).
struct PolarizationField {
    TimeGrid tgrid;
    double dz = 0.0;
    int nz = 0;
    PolarizationComponent component = PolarizationComponent::storage;
    std::vector<cplx> values; // nz x nt, row-major

    std::span<const cplx> slice(int iz) const
    {
        return { values.data() + static_cast<size_t>(iz) * tgrid.n, static_cast<size_t>(tgrid.n) };
    }
};

PolarizationField assemble_polarization(const EnsembleState& state, const RamanMedium& medium,
                                        const TimeGrid& grid,
                                        PolarizationComponent component = PolarizationComponent::retrieval_source,
                                        double window_gamma = 0.0);

} // namespace qraman::propagation
