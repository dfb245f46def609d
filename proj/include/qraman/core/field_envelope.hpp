#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

namespace qraman {

using cplx = std::complex<double>;

struct TimeGrid {
    double t0 = 0.0; // first sample time
    double dt = 0.0;
    int n = 0;

    double at(int i) const { return t0 + dt * i; }
    double end() const { return t0 + dt * (n - 1); }
    double span() const { return dt * (n - 1); }
};

enum class EnvelopeShape { gaussian, square, two_hump, custom };

/// Input signal envelope in Rabi units [rad/s], evaluable at any time.
/// Analytic shapes are exact; custom sample tables are linearly interpolated.
class Envelope {
public:
    static Envelope gaussian(double peak, double center, double tau);
    static Envelope square(double peak, double center, double width);
    /// Asymmetric double Gaussian: humps at center -/+ separation/2,
    /// second hump scaled by `ratio`.
    static Envelope two_hump(double peak, double center, double tau,
                             double separation, double ratio);
    static Envelope from_samples(std::vector<double> t, std::vector<cplx> a);

    cplx operator()(double t) const;

    EnvelopeShape shape() const { return shape_; }
    double peak() const { return peak_; }
    double center() const { return center_; }
    /// Nominal duration parameter tau_p (gaussian sigma / square width).
    double duration() const { return tau_; }

    /// Envelope shifted in time by dt_shift (same shape).
    Envelope shifted(double dt_shift) const;

private:
    EnvelopeShape shape_ = EnvelopeShape::gaussian;
    double peak_ = 0.0, center_ = 0.0, tau_ = 0.0;
    double separation_ = 0.0, ratio_ = 0.0;
    std::vector<double> st_;
    std::vector<cplx> sa_;
};

enum class Direction { forward, backward };
enum class Carrier { signal, control };

/// Complex slowly-varying envelope sampled on a (z, t) grid.
/// Time is the local co-moving coordinate of the tagged direction:
/// t' = t - z/c for forward fields, t' = t + z/c for backward fields.
struct FieldEnvelope {
    TimeGrid tgrid;
    double dz = 0.0;
    int nplanes = 0; // z planes 0..L inclusive
    Direction direction = Direction::forward;
    Carrier carrier = Carrier::signal;
    double delta_s = 0.0;   // measured signal bandwidth the grid was sized for
    std::vector<cplx> data; // nplanes x tgrid.n, row-major

    std::span<const cplx> plane(int iz) const
    {
        return { data.data() + static_cast<size_t>(iz) * tgrid.n, static_cast<size_t>(tgrid.n) };
    }
    std::span<cplx> plane(int iz)
    {
        return { data.data() + static_cast<size_t>(iz) * tgrid.n, static_cast<size_t>(tgrid.n) };
    }

    double z_of_plane(int iz) const { return dz * iz; }
    /// Global time of sample it at plane iz (undoes the co-moving shift).
    double global_time(int iz, int it, double c) const;

    /// Trapezoid integral of |A|^2 dt at plane iz.
    double energy(int iz) const;
};

/// FWHM of the power spectrum |FT(A)|^2 [rad/s], located around the
/// spectral peak. Throws ValidationError for an all-zero envelope.
double signal_bandwidth(const TimeGrid& grid, std::span<const cplx> a);
double signal_bandwidth(const Envelope& env, double window_halfwidth_taus = 8.0,
                        int oversample = 32);

} // namespace qraman
