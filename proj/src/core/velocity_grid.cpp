#include "qraman/core/velocity_grid.hpp"
#include "qraman/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <sstream>

namespace qraman {

namespace {

// Orthonormal Hermite pair (h_n, h_{n-1}) at x, returned scaled by 2^(-e2).
// Outside the oscillatory region the values grow like exp(x^2/2); the exact
// power-of-two rescaling keeps the recurrence finite without perturbing it.
void hermite_pair(int n, double x, double& hn, double& hnm1, int& e2)
{
    double h0 = std::pow(std::numbers::pi, -0.25);
    double h1 = std::sqrt(2.0) * x * h0;
    e2 = 0;
    if (n == 0) { hn = h0; hnm1 = 0.0; return; }
    double a = h0, b = h1;
    for (int k = 1; k < n; ++k) {
        double c = x * std::sqrt(2.0 / (k + 1)) * b - std::sqrt(double(k) / (k + 1)) * a;
        a = b;
        b = c;
        if (std::abs(b) > 0x1p+500) {
            a = std::ldexp(a, -500);
            b = std::ldexp(b, -500);
            e2 += 500;
        }
    }
    hn = b;
    hnm1 = a;
}

} // namespace

VelocityGrid VelocityGrid::gauss_hermite(double u, int n,
                                         double required_phase_span,
                                         double char_fn_tol)
{
    if (n < 8)
        throw ValidationError("velocity grid: node count must be >= 8, got " + std::to_string(n));
    if (!(u > 0.0))
        throw ValidationError("velocity grid: most probable speed must be > 0");

    // Golub-Welsch: nodes are eigenvalues of the Jacobi matrix with zero
    // diagonal and off-diagonal beta_k = sqrt(k/2).
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd sub(n - 1);
    for (int k = 1; k < n; ++k)
        sub[k - 1] = std::sqrt(k / 2.0);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw ResolutionError("velocity grid: tridiagonal eigensolve failed");

    VelocityGrid g;
    g.u_ = u;
    g.nodes_.resize(n);
    g.weights_.resize(n);

    double hn, hnm1;
    int e2 = 0;
    for (int j = 0; j < n; ++j) {
        double x = es.eigenvalues()[j];
        // Two Newton polish steps; h_n'(x) = sqrt(2n) h_{n-1}(x)
        // (the rescaling exponent cancels in the ratio).
        for (int it = 0; it < 2; ++it) {
            hermite_pair(n, x, hn, hnm1, e2);
            x -= hn / (std::sqrt(2.0 * n) * hnm1);
        }
        hermite_pair(n, x, hn, hnm1, e2);
        g.nodes_[j] = u * x;
        // w = 1 / (sqrt(pi) n h_{n-1}^2 2^{2 e2}); edge nodes of large grids
        // legitimately underflow to zero weight
        const double base = 1.0 / (std::sqrt(std::numbers::pi) * n * hnm1 * hnm1);
        g.weights_[j] = std::ldexp(base, -2 * e2);
    }

    double s = 0.0;
    for (double w : g.weights_) s += w;
    for (double& w : g.weights_) w /= s;

    if (required_phase_span > 0.0) {
        double res = g.characteristic_residual(required_phase_span);
        if (res > char_fn_tol) {
            std::ostringstream os;
            os << "velocity grid: " << n << " nodes cannot resolve phase span |K u tau| <= "
               << required_phase_span << "; achieved residual " << res
               << " exceeds " << char_fn_tol
               << " (resolved span " << g.resolved_phase_span(char_fn_tol, required_phase_span) << ")";
            throw ResolutionError(os.str());
        }
    }
    return g;
}

double VelocityGrid::weight_sum() const
{
    double s = 0.0;
    for (double w : weights_) s += w;
    return s;
}

std::complex<double> VelocityGrid::characteristic_function(double omega) const
{
    std::complex<double> s = 0.0;
    for (int j = 0; j < size(); ++j)
        s += weights_[j] * std::polar(1.0, omega * nodes_[j] / u_);
    return s;
}

double VelocityGrid::characteristic_residual(double span, double step) const
{
    double worst = 0.0;
    for (double w = 0.0; w <= span + 1e-12; w += step) {
        double r = std::abs(characteristic_function(w) - std::exp(-w * w / 4.0));
        if (r > worst) worst = r;
    }
    return worst;
}

double VelocityGrid::resolved_phase_span(double tol, double max_span) const
{
    const double step = 0.25;
    double ok = 0.0;
    for (double w = 0.0; w <= max_span; w += step) {
        double r = std::abs(characteristic_function(w) - std::exp(-w * w / 4.0));
        if (r > tol) break;
        ok = w;
    }
    return ok;
}

} // namespace qraman
