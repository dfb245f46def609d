#include "qraman/geometry/design.hpp"
#include "qraman/errors.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace qraman::geometry {

double relative_wavevector(double theta, double k)
{
    if (!(theta > 0.0) || theta > std::numbers::pi + 1e-15)
        throw ValidationError("relative_wavevector: theta must lie in (0, pi]");
    if (!(k > 0.0))
        throw ValidationError("relative_wavevector: k must be > 0");
    return 2.0 * k * std::sin(0.5 * theta);
}

double raman_absorption(double k, double K, std::complex<double> omega2,
                        double delta1, double alpha0)
{
    if (!(K > 0.0))
        throw ValidationError("raman_absorption: K = 0 is a singular geometry (collinear beams); "
                              "the adiabatic Raman model diverges");
    if (delta1 == 0.0)
        throw ValidationError("raman_absorption: delta1 must be nonzero");
    if (alpha0 < 0.0)
        throw ValidationError("raman_absorption: alpha0 must be >= 0");
    return (k / K) * std::norm(omega2) / (delta1 * delta1) * alpha0;
}

DesignPoint design_point(double theta, double delta_s, const PhysicalConfig& cfg)
{
    DesignPoint p;
    p.theta = theta;
    p.K = relative_wavevector(theta, cfg.k);
    p.bandwidth = p.K * cfg.u;
    p.alphaR = raman_absorption(cfg.k, p.K, cfg.omega2, cfg.delta1, cfg.alpha0);
    p.optical_depth = p.alphaR * cfg.length;
    p.margin_ratio = delta_s > 0.0 ? p.bandwidth / delta_s : 0.0;
    return p;
}

DesignPoint optimize_angle(double delta_s, double margin, const PhysicalConfig& cfg)
{
    if (!(margin > 1.0))
        throw ValidationError("optimize_angle: bandwidth margin must exceed 1");
    if (!(delta_s > 0.0))
        throw ValidationError("optimize_angle: delta_s must be > 0");
    const double ku = cfg.k * cfg.u;
    const double need = margin * delta_s;
    if (need > 2.0 * ku) {
        std::ostringstream os;
        os << "optimize_angle: requested bandwidth margin * delta_s = " << need
           << " rad/s exceeds the maximum achievable Ku = 2 k u = " << 2.0 * ku
           << " rad/s (counter-propagating limit)";
        throw ValidationError(os.str());
    }

    const double x = need / (2.0 * ku);
    const double theta = 2.0 * std::asin(x);
    DesignPoint p = design_point(theta, delta_s, cfg);
    if (x < 1e-9)
        p.warning = "geometry limit: theta -> 0, alphaR diverges; result is outside the model's validity";
    return p;
}

} // namespace qraman::geometry
