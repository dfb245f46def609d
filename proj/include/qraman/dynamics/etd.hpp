#pragma once

#include <complex>

namespace qraman::dynamics {

/// Exact one-step propagator for sigma' = a sigma + b D(t) with D linearly
/// interpolated across the step: sigma_{n+1} = E sigma_n + c1 D_n + c2 D_{n+1}.
/// Unconditionally stable; the oscillatory linear part is integrated exactly.
struct EtdCoeffs {
    std::complex<double> E, c1, c2;

    static EtdCoeffs make(std::complex<double> a, std::complex<double> b, double dt)
    {
        using cplx = std::complex<double>;
        const cplx z = a * dt;
        cplx phi1, phi2;
        if (std::abs(z) > 1e-4) {
            const cplx ez = std::exp(z);
            phi1 = (ez - 1.0) / z;
            phi2 = (ez - 1.0 - z) / (z * z);
        } else {
            phi1 = 1.0 + z * (1.0 / 2.0 + z * (1.0 / 6.0 + z * (1.0 / 24.0 + z / 120.0)));
            phi2 = 0.5 + z * (1.0 / 6.0 + z * (1.0 / 24.0 + z * (1.0 / 120.0 + z / 720.0)));
        }
        EtdCoeffs c;
        c.E = std::exp(z);
        c.c1 = b * dt * (phi1 - phi2);
        c.c2 = b * dt * phi2;
        return c;
    }
};

} // namespace qraman::dynamics
