#pragma once

#include "qraman/core/types.hpp"

#include <complex>
#include <string>

namespace qraman::geometry {

/// One point of the bandwidth-vs-optical-depth trade-off.
struct DesignPoint {
    double theta = 0.0;        // beam angle [rad]
    double K = 0.0;            // beat wave vector [rad/m]
    double bandwidth = 0.0;    // K u [rad/s]
    double alphaR = 0.0;       // Raman absorption coefficient [1/m]
    double optical_depth = 0.0;// alphaR * L
    double margin_ratio = 0.0; // K u / delta_s
    std::string warning;       // set for degenerate limits
};

/// K = 2 k sin(theta/2), theta in (0, pi].
/// Note: the 2 theta sin(theta/2) form sometimes quoted for K/k is
/// dimensionally inconsistent with |k2 - k1| for equal-magnitude wave
/// vectors; the vector identity used here also matches the
/// 10 mrad <-> K/k ~ 1e-2 small-angle regime.
double relative_wavevector(double theta, double k);

/// alphaR = (k/K) (|omega2|^2 / delta1^2) alpha0.
/// Strictly decreasing in K; K = 0 is a singular geometry.
double raman_absorption(double k, double K, std::complex<double> omega2,
                        double delta1, double alpha0);

/// Smallest angle whose bandwidth K u covers margin * delta_s; this
/// maximizes alphaR subject to the bandwidth constraint since alphaR
/// varies inversely with K. Throws ValidationError when
/// margin * delta_s > 2 k u (reports the maximum achievable bandwidth).
DesignPoint optimize_angle(double delta_s, double margin, const PhysicalConfig& cfg);

/// Design point for an explicitly chosen angle.
DesignPoint design_point(double theta, double delta_s, const PhysicalConfig& cfg);

} // namespace qraman::geometry
