#pragma once

#include <complex>
#include <string>
#include <vector>

namespace qraman {

/// Physical constants of the medium and driving fields, all SI
/// (rad/s, 1/s, 1/m, m/s, m). Atomic density and dipole moments enter
/// only through alpha0 and the Rabi frequencies.
struct PhysicalConfig {
    double delta1 = 0.0;            // one-photon detuning of the signal leg
    double delta2 = 0.0;            // one-photon detuning of the control leg
    double gamma_ab = 0.0;          // optical coherence decay
    double gamma_ac = 0.0;          // storage Raman coherence decay
    double gamma_ad = 0.0;          // shelved Raman coherence decay
    double omega1_peak = 0.0;       // peak signal Rabi frequency
    std::complex<double> omega2;    // control Rabi frequency (constant)
    double omega_pi_peak = 0.0;     // pi-pulse Rabi frequency (0: derived from area)
    double delta_pi = 0.0;          // pi-pulse one-photon detuning
    double alpha0 = 0.0;            // linear absorption coefficient on a-b
    double u = 0.0;                 // most probable speed
    double length = 0.0;            // medium length L
    double k = 0.0;                 // optical wavenumber (k1 ~ k2 ~ k)

    double light_shift() const { return std::norm(omega2) / delta1; }
    bool light_shift_compensated(double rel_tol = 1e-9) const;

    /// Adiabaticity ratio delta1 / max(|omega1|, |omega2|, gamma_ab, k*u).
    double adiabaticity_ratio() const;

    /// Appends precondition violations (>= 10 adiabaticity ratio, positive
    /// rates/lengths) to `out`, prefixed with "physical:".
    void collect_violations(std::vector<std::string>& out) const;
};

/// Beam-angle bookkeeping. Propagation is solved along z || k1; the angle
/// enters only through the beat wave vector magnitude K = |k2 - k1|.
struct BeamGeometry {
    double theta = 0.0; // angle (k1, k2) [rad]
    double k = 0.0;     // optical wavenumber [rad/m]
    double K = 0.0;     // 2 k sin(theta/2) [rad/m]

    static BeamGeometry from_angle(double theta, double k);

    /// Memory bandwidth K u [rad/s].
    double bandwidth(double u) const { return K * u; }

    void collect_violations(std::vector<std::string>& out) const;
};

/// Pulse centers and durations of the four-stage protocol.
struct ProtocolTimeline {
    double t1 = 0.0;     // signal pulse center
    double t2 = 0.0;     // freeze pi-pulse center
    double t3 = 0.0;     // reversal pi-pulse center
    double tau_p = 0.0;  // signal duration parameter
    double tau_pi = 0.0; // pi-pulse duration

    double t12() const { return t2 - t1; }
    double t23() const { return t3 - t2; }
    double echo_time() const { return t3 + t12(); }

    /// delta_s tau_pi <= 0.1 ("resonantly excite all the atoms") and
    /// ordering/positivity checks. delta_s in rad/s.
    void collect_violations(std::vector<std::string>& out, double delta_s,
                            double storage_window_halfwidth) const;
};

} // namespace qraman
