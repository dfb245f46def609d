#include "qraman/dynamics/lambda_system.hpp"
#include "qraman/dynamics/etd.hpp"
#include "qraman/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qraman::dynamics {

LambdaState integrate_lambda_full(LambdaState state,
                                  const std::function<cplx(double)>& omega1,
                                  const LambdaDriveParams& p,
                                  double t_begin, double t_end, double dt)
{
    const double fastest = std::max({ std::abs(p.delta1), std::abs(p.omega2),
                                      std::abs(p.K * p.v) });
    if (fastest > 0.0 && dt > 0.05 / fastest) {
        std::ostringstream os;
        os << "integrate_lambda_full: step " << dt << " s does not resolve the fastest scale; need dt <= "
           << 0.05 / fastest << " s";
        throw ResolutionError(os.str());
    }
    if (!(t_end > t_begin) || dt <= 0.0)
        throw ValidationError("integrate_lambda_full: need t_end > t_begin and dt > 0");

    // y_ab = rho_ab e^{+i k1 z(t)}, y_ac = rho_ac e^{-i K z(t)} per atom;
    // with v along the beat wave vector, k1.v = -K v / 2 exactly.
    const cplx i1(0.0, 1.0);
    const cplx a_ab = i1 * (p.delta1 - 0.5 * p.K * p.v) - p.gamma_ab;
    const cplx a_ac = i1 * (p.delta1 - p.delta2 - p.K * p.v) - p.gamma_ac;
    const cplx o2 = p.omega2;
    const cplx o2c = std::conj(o2);

    auto rhs = [&](double t, const LambdaState& y, LambdaState& d) {
        const cplx o1c = std::conj(omega1(t));
        d.sigma_ab = a_ab * y.sigma_ab + i1 * o1c + i1 * o2c * y.sigma_ac;
        d.sigma_ac = a_ac * y.sigma_ac + i1 * o2 * y.sigma_ab;
    };

    const long nsteps = static_cast<long>(std::ceil((t_end - t_begin) / dt));
    const double h = (t_end - t_begin) / nsteps;
    LambdaState y = state, k1, k2, k3, k4, tmp;
    long check_every = std::max(1L, nsteps / 64);
    for (long n = 0; n < nsteps; ++n) {
        const double t = t_begin + h * n;
        rhs(t, y, k1);
        tmp.sigma_ab = y.sigma_ab + 0.5 * h * k1.sigma_ab;
        tmp.sigma_ac = y.sigma_ac + 0.5 * h * k1.sigma_ac;
        rhs(t + 0.5 * h, tmp, k2);
        tmp.sigma_ab = y.sigma_ab + 0.5 * h * k2.sigma_ab;
        tmp.sigma_ac = y.sigma_ac + 0.5 * h * k2.sigma_ac;
        rhs(t + 0.5 * h, tmp, k3);
        tmp.sigma_ab = y.sigma_ab + h * k3.sigma_ab;
        tmp.sigma_ac = y.sigma_ac + h * k3.sigma_ac;
        rhs(t + h, tmp, k4);
        y.sigma_ab += (h / 6.0) * (k1.sigma_ab + 2.0 * k2.sigma_ab + 2.0 * k3.sigma_ab + k4.sigma_ab);
        y.sigma_ac += (h / 6.0) * (k1.sigma_ac + 2.0 * k2.sigma_ac + 2.0 * k3.sigma_ac + k4.sigma_ac);
        if (n % check_every == 0) {
            double m = std::max(std::abs(y.sigma_ab), std::abs(y.sigma_ac));
            if (m > 0.3) {
                std::ostringstream os;
                os << "integrate_lambda_full: perturbative bound exceeded, |sigma| = " << m
                   << " > 0.3; weak-signal treatment invalid";
                throw ValidationError(os.str());
            }
        }
    }
    return y;
}

std::vector<cplx> integrate_storage_adiabatic(const TimeGrid& grid,
                                              std::span<const cplx> omega1,
                                              cplx omega2, double delta1, double delta2,
                                              double gamma_ac,
                                              const VelocityGrid& vgrid, double K,
                                              bool include_decay,
                                              bool acknowledge_uncompensated)
{
    const double shift_residual = delta1 - delta2 - std::norm(omega2) / delta1;
    const double tol = 1e-9 * std::max(std::abs(delta1), 1.0);
    if (std::abs(shift_residual) > tol && !acknowledge_uncompensated)
        throw ValidationError("integrate_storage_adiabatic: light shift |omega2|^2/delta1 not compensated "
                              "by delta1 - delta2 and acknowledgment flag not set");

    const int nv = vgrid.size();
    const int nt = grid.n;
    const cplx i1(0.0, 1.0);
    const cplx b = -i1 * omega2 / delta1;
    const double g = include_decay ? gamma_ac : 0.0;

    std::vector<EtdCoeffs> co(nv);
    for (int j = 0; j < nv; ++j) {
        const cplx a = i1 * shift_residual - i1 * K * vgrid.nodes()[j] - g;
        co[j] = EtdCoeffs::make(a, b, grid.dt);
    }

    std::vector<cplx> sigma(nv, 0.0);
    for (int n = 0; n < nt - 1; ++n) {
        const cplx d0 = std::conj(omega1[n]);
        const cplx d1 = std::conj(omega1[n + 1]);
        for (int j = 0; j < nv; ++j)
            sigma[j] = co[j].E * sigma[j] + co[j].c1 * d0 + co[j].c2 * d1;
    }
    return sigma;
}

cplx storage_adiabatic_class(const TimeGrid& grid, std::span<const cplx> omega1,
                             cplx omega2, double delta1, double delta2,
                             double gamma_ac, double kv)
{
    const cplx i1(0.0, 1.0);
    const double shift_residual = delta1 - delta2 - std::norm(omega2) / delta1;
    const cplx a = i1 * shift_residual - i1 * kv - gamma_ac;
    const auto co = EtdCoeffs::make(a, -i1 * omega2 / delta1, grid.dt);
    cplx s = 0.0;
    for (int n = 0; n < grid.n - 1; ++n)
        s = co.E * s + co.c1 * std::conj(omega1[n]) + co.c2 * std::conj(omega1[n + 1]);
    return s;
}

} // namespace qraman::dynamics
