#pragma once

#include <complex>
#include <vector>

namespace qraman {

/// Quadrature over the one-dimensional Maxwell-Boltzmann distribution
/// W(v) = exp(-v^2/u^2) / (u sqrt(pi)) of the velocity projection along
/// the beat wave vector. Nodes and weights are Gauss-Hermite; weights are
/// normalized so that sum(w) == 1.
///
/// Every ensemble average in the solvers is a fixed-order sum over these
/// nodes, so results are bit-reproducible.
class VelocityGrid {
public:
    /// Builds an n-node grid for most probable speed u.
    /// If required_phase_span > 0, verifies that the discrete characteristic
    /// function reproduces exp(-(K u tau)^2 / 4) to char_fn_tol for all
    /// |K u tau| up to the span, and throws ResolutionError naming the
    /// achieved residual otherwise.
    static VelocityGrid gauss_hermite(double u, int n,
                                      double required_phase_span = 0.0,
                                      double char_fn_tol = 1e-6);

    double u() const { return u_; }
    int size() const { return static_cast<int>(nodes_.size()); }
    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& weights() const { return weights_; }

    double weight_sum() const;

    /// sum_j w_j exp(i * omega * v_j / u); the continuum value is exp(-omega^2/4).
    std::complex<double> characteristic_function(double omega) const;

    /// Residual |quadrature - exp(-omega^2/4)| maximized over a scan of
    /// [0, span] in steps of `step`.
    double characteristic_residual(double span, double step = 0.5) const;

    /// Largest omega = |K u tau| such that the characteristic-function
    /// residual stays below tol on [0, omega]; scanned up to max_span.
    double resolved_phase_span(double tol = 1e-6, double max_span = 400.0) const;

private:
    double u_ = 0.0;
    std::vector<double> nodes_;   // v_j [m/s]
    std::vector<double> weights_; // dimensionless, sum = 1
};

} // namespace qraman
