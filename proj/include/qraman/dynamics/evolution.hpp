#pragma once

#include "qraman/core/ensemble_state.hpp"

#include <complex>

namespace qraman::dynamics {

/// Free evolution of the a-c coherence over `duration`:
/// sigma_ac -> sigma_ac exp(-(i s K v + gamma_ac) duration) per velocity
/// class, where s is the state's spatial tag. Decayed population is
/// tallied per slice. Doppler-free a-d evolution applies only the decay.
void free_evolve_ac(EnsembleState& state, double duration, double gamma_ac, double K);
void free_evolve_ad(EnsembleState& state, double duration, double gamma_ad);

/// Scalar amplitude decay with population bookkeeping (used when the
/// protocol applies decay as per-stage factors pinned to the nominal
/// intervals, which keeps the closed-form factorization exact).
void apply_decay_ac(EnsembleState& state, double amplitude_factor);
void apply_decay_ad(EnsembleState& state, double amplitude_factor);

/// Single-class rotation of Eq.-of-motion form used by the protocol maps:
///   ac' = cos(T/2) ac + i e^{+i phi} sin(T/2) ad
///   ad' = i e^{-i phi} sin(T/2) ac + cos(T/2) ad
struct TwoLevelAmps {
    cplx ac, ad;
};
TwoLevelAmps pi_rotate(TwoLevelAmps in, double theta, double phi);

/// Rotation followed by free decay over `elapsed`:
/// ac' = e^{-gamma_ac elapsed} cos(T/2) ac + i e^{+i phi - gamma_ad elapsed} sin(T/2) ad, etc.
TwoLevelAmps pi_rotate_decayed(TwoLevelAmps in, double theta, double phi,
                               double gamma_ac, double gamma_ad, double elapsed);

enum class PiPulseShape { square, gaussian };

/// Raman pi-pulse between the two ground-state coherences.
struct PiPulseSpec {
    double area = 0.0;        // Theta = 2 Int |Omega_pi(t)|^2 dt / Delta
    double phase = 0.0;       // geometric phase phi (protocol runs use 0;
                              // spatial phases are carried by the tag)
    int direction = +1;       // sign of the pulse pair's beat vector (+K / -K)
    double tau = 0.0;         // duration (finite mode)
    double delta = 0.0;       // one-photon detuning
    PiPulseShape shape = PiPulseShape::square;
    double gamma_ac = 0.0;
    double gamma_ad = 0.0;

    /// Two-photon Rabi frequency |Omega_pi(t)|^2 / Delta at offset t from
    /// the pulse center; integrates to area/2 over the pulse.
    double two_photon_rabi(double t_from_center) const;
    /// Peak Omega_pi implied by (area, tau, delta, shape).
    double omega_pi_peak() const;
    /// Two-level validity: max |FT(Omega_pi)(Delta +- delta_s)|^2, the
    /// residual one-photon excitation amplitude squared. Must be << 1 for
    /// the pulse pair to act as a pure c-d rotation.
    double two_level_residual(double delta_s) const;
};

/// Impulsive map (instantaneous rotation evaluated at the pulse center).
/// A coherence whose tag mismatches the pulse direction is moved to the
/// orphan reservoirs with the rotation weights (its converted part is not
/// phase-matched to any later readout in this model). Decay factors
/// exp(-gamma tau) are applied only when gamma * tau > 1e-3.
void pi_pulse_rotate(EnsembleState& state, const PiPulseSpec& pulse, double K);

/// Finite-duration integration of the pulse ODEs per velocity class over
/// [-tau/2, +tau/2] around the center, retaining the Doppler term of the
/// spatially tagged coherence. Converges to pi_pulse_rotate combined with
/// half-window free evolution as tau -> 0 at fixed area.
/// Precondition: dt <= 0.02 tau.
void pi_pulse_integrate(EnsembleState& state, const PiPulseSpec& pulse, double K, double dt);

/// Single-class finite-duration pulse (test and diagnostic path).
TwoLevelAmps pi_integrate_class(TwoLevelAmps in, const PiPulseSpec& pulse,
                                double kv, double dt);

} // namespace qraman::dynamics
