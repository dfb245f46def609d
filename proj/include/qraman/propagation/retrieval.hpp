#pragma once

#include "qraman/core/ensemble_state.hpp"
#include "qraman/core/field_envelope.hpp"
#include "qraman/core/types.hpp"
#include "qraman/propagation/medium.hpp"

namespace qraman::propagation {

struct RetrievalSetup {
    double echo_time = 0.0;   // t3 + t12
    double control_on = 0.0;  // global switch-on of the backward control
    int readout_tag = -1;     // coherence tag addressed by the (signal, control) pair
    bool backward = true;     // signal direction; backward => output at z = 0
    double source_decay = 1.0;// echo-time-convention scalar on the echo source
    double window_gamma_ac = 0.0; // nonzero in the emission-time convention
    bool want_final_state = true;
};

struct RetrievalResult {
    FieldEnvelope field;      // local co-moving time (advanced for backward)
    EnsembleState final_state;
    double energy_out = 0.0;  // at the exit plane
};

/// Stage 4: solves the linearized envelope equation for the restored field
/// by z-integration in the co-moving frame, sourced by the freely evolving
/// echo coherence plus the coherence re-driven by the restored field itself
/// (local-depletion form in SolverMode::local, velocity-resolved otherwise).
/// Boundary condition: zero field at the entry plane of the march.
RetrievalResult propagate_retrieval(const EnsembleState& state, const RamanMedium& medium,
                                    const ProtocolTimeline& tl, const SolverOptions& opt,
                                    const RetrievalSetup& setup, double delta_s);

/// Ratio of retrieved energy in a trial (signal, control) direction pair to
/// the correct backward configuration. Directions are +-1 along k1 / k2.
/// The pair couples to the coherence component with spatial tag
/// (d2 k2 - d1 k1)/K: mixed direction pairs couple to none and return 0;
/// a pair whose tag mismatches the state couples only through the
/// unrephased Doppler phase (the transverse spatial average, identically
/// zero for plane waves, is not credited, so the ratio is an upper bound).
double phase_matching_check(const EnsembleState& state, const RamanMedium& medium,
                            const ProtocolTimeline& tl, const SolverOptions& opt,
                            int trial_signal_dir, int trial_control_dir,
                            double delta_s, double correct_energy);

struct ResidualPopulation {
    double stored = 0.0;      // reference stage-1 excited population
    double coherent_c = 0.0;  // |sigma_ac|^2 remaining
    double coherent_d = 0.0;
    double orphan_c = 0.0, orphan_d = 0.0;
    double decayed_c = 0.0, decayed_d = 0.0;

    double eta_c() const { return (coherent_c + orphan_c + decayed_c) / stored; }
    double eta_d() const { return (coherent_d + orphan_d + decayed_d) / stored; }
    double eta_total() const { return eta_c() + eta_d(); }
};

/// Fraction of the initially excited atoms left behind after retrieval,
/// normalized to the stage-1 stored population. Throws ValidationError
/// when nothing was stored (undefined ratio).
ResidualPopulation residual_population(const EnsembleState& final_state, double stored_population);

} // namespace qraman::propagation
