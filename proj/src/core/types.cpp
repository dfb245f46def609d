#include "qraman/core/types.hpp"
#include "qraman/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace qraman {

namespace {

std::string fmt(double v)
{
    std::ostringstream os;
    os << v;
    return os.str();
}

} // namespace

bool PhysicalConfig::light_shift_compensated(double rel_tol) const
{
    double target = delta1 - light_shift();
    return std::abs(delta2 - target) <= rel_tol * std::max(std::abs(delta1), 1.0);
}

double PhysicalConfig::adiabaticity_ratio() const
{
    double m = std::max({ std::abs(omega1_peak), std::abs(omega2), gamma_ab, k * u });
    return m > 0.0 ? std::abs(delta1) / m : std::numeric_limits<double>::infinity();
}

void PhysicalConfig::collect_violations(std::vector<std::string>& out) const
{
    if (gamma_ab < 0 || gamma_ac < 0 || gamma_ad < 0)
        out.push_back("physical: decay rates must be >= 0");
    if (!(alpha0 > 0))
        out.push_back("physical: alpha0 must be > 0");
    if (!(u > 0))
        out.push_back("physical: most probable speed u must be > 0");
    if (!(length > 0))
        out.push_back("physical: medium length must be > 0");
    if (!(k > 0))
        out.push_back("physical: optical wavenumber k must be > 0");
    if (delta1 == 0.0)
        out.push_back("physical: delta1 must be nonzero");
    double r = adiabaticity_ratio();
    if (r < 10.0)
        out.push_back("physical: adiabaticity precondition violated: delta1 / max(|omega1|, |omega2|, gamma_ab, k*u) = "
                      + fmt(r) + " < 10");
}

BeamGeometry BeamGeometry::from_angle(double theta, double k)
{
    BeamGeometry g;
    g.theta = theta;
    g.k = k;
    g.K = 2.0 * k * std::sin(0.5 * theta);
    return g;
}

void BeamGeometry::collect_violations(std::vector<std::string>& out) const
{
    if (!(theta > 0.0) || theta > std::numbers::pi + 1e-15)
        out.push_back("geometry: beam angle must lie in (0, pi], got " + fmt(theta));
    if (!(K > 0.0) || K > 2.0 * k * (1.0 + 1e-15))
        out.push_back("geometry: K = 2 k sin(theta/2) must lie in (0, 2k]");
}

void ProtocolTimeline::collect_violations(std::vector<std::string>& out, double delta_s,
                                          double storage_window_halfwidth) const
{
    if (!(t1 < t2 && t2 < t3))
        out.push_back("timeline: pulse centers must be ordered t1 < t2 < t3");
    if (!(tau_p > 0))
        out.push_back("timeline: tau_p must be > 0");
    if (!(tau_pi > 0))
        out.push_back("timeline: tau_pi must be > 0");
    if (delta_s * tau_pi > 0.1)
        out.push_back("timeline: pi-pulse bandwidth condition delta_s * tau_pi <= 0.1 violated: "
                      + fmt(delta_s * tau_pi)
                      + " (pulse too long to resonantly excite all stored velocity classes)");
    if (t12() < 5.0 * tau_p)
        out.push_back("timeline: t12 must be >> tau_p (phase-matching argument); require t12 >= 5 tau_p, got t12/tau_p = "
                      + fmt(t12() / tau_p));
    if (storage_window_halfwidth > 0.0 && t2 - 0.5 * tau_pi < t1 + storage_window_halfwidth)
        out.push_back("timeline: freeze pulse overlaps the storage window; need t2 - tau_pi/2 >= t1 + "
                      + fmt(storage_window_halfwidth));
}

} // namespace qraman
