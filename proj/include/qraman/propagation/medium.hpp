#pragma once

#include "qraman/core/types.hpp"
#include "qraman/core/velocity_grid.hpp"
#include "qraman/geometry/design.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace qraman::propagation {

/// Medium + beam bundle used by the envelope solvers. All coupling closes
/// through alpha0: the Maxwell source in Rabi units is
/// d(omega1)/dz = i g (omega2/delta1) <sigma*> with g = k u alpha0 / (2 sqrt(pi)),
/// which reproduces alphaR = (k/K) |omega2/delta1|^2 alpha0 in the
/// broadband local limit.
struct RamanMedium {
    PhysicalConfig phys;
    BeamGeometry geom;
    VelocityGrid vgrid;
    double c = 299792458.0; // set to infinity for the instantaneous-propagation cross-check

    double alphaR() const
    {
        return geometry::raman_absorption(phys.k, geom.K, phys.omega2, phys.delta1, phys.alpha0);
    }
    double coupling() const
    {
        return phys.k * phys.u * phys.alpha0 / (2.0 * std::sqrt(std::numbers::pi));
    }
    cplx ratio() const { return phys.omega2 / phys.delta1; }
    double transit(double z) const { return std::isfinite(c) ? z / c : 0.0; }
};

enum class SolverMode { local, resolved };
enum class DecayConvention { echo_time, emission_time };

struct SolverOptions {
    SolverMode mode = SolverMode::local;
    int nz = 0;                     // 0: auto, ceil(20 alphaR L), min 32
    double dt = 0.0;                // 0: auto, 1/(20 delta_s)
    double storage_window = 10.0;   // total width, units of tau_p
    double retrieval_window = 14.0; // total width, units of tau_p
    double control_lead = 5.0;      // control on this many tau_p before the echo
    DecayConvention decay = DecayConvention::echo_time;
};

int auto_nz(const RamanMedium& medium, const SolverOptions& opt);
double auto_dt(double delta_s, const SolverOptions& opt);

} // namespace qraman::propagation
