#pragma once

#include "qraman/core/field_envelope.hpp"
#include "qraman/core/velocity_grid.hpp"

#include <complex>
#include <functional>
#include <vector>

namespace qraman::dynamics {

/// Optical + Raman coherence of a single velocity class, spatial factors
/// factored out (a-b relative to exp(i k1 z), a-c relative to exp(i K z)).
struct LambdaState {
    cplx sigma_ab;
    cplx sigma_ac;
};

struct LambdaDriveParams {
    cplx omega2;
    double delta1 = 0.0;
    double delta2 = 0.0;
    double gamma_ab = 0.0;
    double gamma_ac = 0.0;
    double v = 0.0; // velocity projection along the beat wave vector
    double K = 0.0;
};

/// Brute-force integration of the coupled optical/Raman coherence ODEs
/// (RK4, explicit). Serves as the oracle for the adiabatic path.
/// The optical Doppler shift enters as k1.v = -K v / 2, exact for a
/// velocity projected along the beat wave vector with |k1| = |k2|.
///
/// Preconditions: dt <= 0.05 / max(|delta1|, |omega2|, |K v|)
/// (throws ResolutionError with the required dt otherwise); the
/// perturbative bound |sigma| <= 0.3 is enforced during integration.
LambdaState integrate_lambda_full(LambdaState state,
                                  const std::function<cplx(double)>& omega1,
                                  const LambdaDriveParams& p,
                                  double t_begin, double t_end, double dt);

/// Adiabatic storage integral (light-shift-compensated Raman ODE) for every
/// velocity class of the grid, driven by the local signal envelope:
///   sigma_ac(v) = -i (omega2/delta1) Int dt' omega1*(t') e^{-(i K v + gamma_ac)(t_end - t')}
/// evaluated with the exact exponential one-step integrator. Decay during
/// the pulse is included only when include_decay is set (it is negligible
/// for gamma_ac tau_p << 1 and the closed-form solution drops it).
///
/// Throws ValidationError if the light shift is not compensated
/// (|delta1 - delta2 - |omega2|^2/delta1| above tolerance) unless
/// acknowledge_uncompensated is set, in which case the residual two-photon
/// detuning is kept in the integration.
std::vector<cplx> integrate_storage_adiabatic(const TimeGrid& grid,
                                              std::span<const cplx> omega1,
                                              cplx omega2, double delta1, double delta2,
                                              double gamma_ac,
                                              const VelocityGrid& vgrid, double K,
                                              bool include_decay = false,
                                              bool acknowledge_uncompensated = false);

/// Single velocity class variant (kv = K v), same integration scheme.
cplx storage_adiabatic_class(const TimeGrid& grid, std::span<const cplx> omega1,
                             cplx omega2, double delta1, double delta2,
                             double gamma_ac, double kv);

} // namespace qraman::dynamics
