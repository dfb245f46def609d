#pragma once

#include "qraman/core/ensemble_state.hpp"
#include "qraman/core/field_envelope.hpp"
#include "qraman/core/types.hpp"
#include "qraman/propagation/medium.hpp"

namespace qraman::propagation {

struct StorageResult {
    FieldEnvelope field;   // forward signal, co-moving time t' = t - z/c
    EnsembleState state;   // stage-1 coherence, referenced at a common global t_ref
    double delta_s = 0.0;  // measured input bandwidth [rad/s]
    double energy_in = 0.0;
    double energy_transmitted = 0.0;
};

/// Stage 1: forward propagation of the signal with stimulated Raman
/// depletion, and build-up of the velocity-resolved Raman coherence.
///
/// local mode: the envelope is attenuated uniformly, A(z) = A(0) e^{-alphaR z/2}
/// in the co-moving frame (broadband limit), and the ensemble is driven by
/// that local field.
/// resolved mode: z-marches the coupled field-ensemble system with the
/// polarization assembled from the velocity quadrature at every step.
///
/// Decay of the Raman coherence during the pulse is neglected (it is
/// carried by the free-evolution legs between stages).
StorageResult propagate_storage(const Envelope& input, const RamanMedium& medium,
                                const ProtocolTimeline& tl, const SolverOptions& opt);

} // namespace qraman::propagation
