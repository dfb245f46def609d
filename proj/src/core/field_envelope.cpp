#include "qraman/core/field_envelope.hpp"
#include "qraman/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qraman {

Envelope Envelope::gaussian(double peak, double center, double tau)
{
    Envelope e;
    e.shape_ = EnvelopeShape::gaussian;
    e.peak_ = peak;
    e.center_ = center;
    e.tau_ = tau;
    return e;
}

Envelope Envelope::square(double peak, double center, double width)
{
    Envelope e;
    e.shape_ = EnvelopeShape::square;
    e.peak_ = peak;
    e.center_ = center;
    e.tau_ = width;
    return e;
}

Envelope Envelope::two_hump(double peak, double center, double tau,
                            double separation, double ratio)
{
    Envelope e;
    e.shape_ = EnvelopeShape::two_hump;
    e.peak_ = peak;
    e.center_ = center;
    e.tau_ = tau;
    e.separation_ = separation;
    e.ratio_ = ratio;
    return e;
}

Envelope Envelope::from_samples(std::vector<double> t, std::vector<cplx> a)
{
    if (t.size() != a.size() || t.size() < 2)
        throw ValidationError("custom envelope: need at least two (t, amplitude) samples");
    if (!std::is_sorted(t.begin(), t.end()))
        throw ValidationError("custom envelope: sample times must be increasing");
    Envelope e;
    e.shape_ = EnvelopeShape::custom;
    double pk = 0.0;
    for (const auto& v : a) pk = std::max(pk, std::abs(v));
    e.peak_ = pk;
    e.center_ = 0.5 * (t.front() + t.back());
    e.tau_ = 0.25 * (t.back() - t.front());
    e.st_ = std::move(t);
    e.sa_ = std::move(a);
    return e;
}

cplx Envelope::operator()(double t) const
{
    switch (shape_) {
    case EnvelopeShape::gaussian: {
        double x = (t - center_) / tau_;
        return peak_ * std::exp(-0.5 * x * x);
    }
    case EnvelopeShape::square:
        return (std::abs(t - center_) <= 0.5 * tau_) ? cplx(peak_) : cplx(0.0);
    case EnvelopeShape::two_hump: {
        double xa = (t - (center_ - 0.5 * separation_)) / tau_;
        double xb = (t - (center_ + 0.5 * separation_)) / tau_;
        return peak_ * (std::exp(-0.5 * xa * xa) + ratio_ * std::exp(-0.5 * xb * xb));
    }
    case EnvelopeShape::custom: {
        if (t <= st_.front() || t >= st_.back()) return 0.0;
        auto it = std::upper_bound(st_.begin(), st_.end(), t);
        size_t i = static_cast<size_t>(it - st_.begin());
        double f = (t - st_[i - 1]) / (st_[i] - st_[i - 1]);
        return sa_[i - 1] + f * (sa_[i] - sa_[i - 1]);
    }
    }
    return 0.0;
}

Envelope Envelope::shifted(double dt_shift) const
{
    Envelope e = *this;
    e.center_ += dt_shift;
    if (e.shape_ == EnvelopeShape::custom)
        for (auto& t : e.st_) t += dt_shift;
    return e;
}

double FieldEnvelope::global_time(int iz, int it, double c) const
{
    double z = z_of_plane(iz);
    double shift = std::isfinite(c) ? z / c : 0.0;
    return direction == Direction::forward ? tgrid.at(it) + shift
                                           : tgrid.at(it) - shift;
}

double FieldEnvelope::energy(int iz) const
{
    auto row = plane(iz);
    double s = 0.0;
    for (int i = 0; i < tgrid.n; ++i) {
        double w = (i == 0 || i == tgrid.n - 1) ? 0.5 : 1.0;
        s += w * std::norm(row[i]);
    }
    return s * tgrid.dt;
}

namespace {

double power_spectrum(const TimeGrid& g, std::span<const cplx> a, double omega)
{
    // trapezoid DFT; |.|^2 is shift-invariant by construction
    cplx s = 0.0;
    for (int i = 0; i < g.n; ++i) {
        double w = (i == 0 || i == g.n - 1) ? 0.5 : 1.0;
        s += w * a[i] * std::polar(1.0, omega * g.at(i));
    }
    return std::norm(s * g.dt);
}

} // namespace

double signal_bandwidth(const TimeGrid& grid, std::span<const cplx> a)
{
    double amax = 0.0;
    for (const auto& v : a) amax = std::max(amax, std::abs(v));
    if (amax <= 0.0)
        throw ValidationError("signal bandwidth undefined: envelope is identically zero");

    const double span = grid.span();
    const double wmax = std::numbers::pi / grid.dt * 0.5;
    const double dw = 2.0 * std::numbers::pi / span / 16.0;

    // locate the spectral peak
    double peak_w = 0.0, peak_p = power_spectrum(grid, a, 0.0);
    for (double w = -wmax; w <= wmax; w += dw) {
        double p = power_spectrum(grid, a, w);
        if (p > peak_p) { peak_p = p; peak_w = w; }
    }
    // golden-section refine around the peak
    double lo = peak_w - dw, hi = peak_w + dw;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
    double fc = power_spectrum(grid, a, c), fd = power_spectrum(grid, a, d);
    for (int it = 0; it < 60; ++it) {
        if (fc > fd) { hi = d; d = c; fd = fc; c = hi - gr * (hi - lo); fc = power_spectrum(grid, a, c); }
        else         { lo = c; c = d; fc = fd; d = lo + gr * (hi - lo); fd = power_spectrum(grid, a, d); }
    }
    peak_w = 0.5 * (lo + hi);
    peak_p = power_spectrum(grid, a, peak_w);
    const double half = 0.5 * peak_p;

    // bisect the half-max crossing on each side of the peak
    auto crossing = [&](double dir) {
        double w_in = peak_w;
        double w_out = peak_w;
        double step = dw;
        while (power_spectrum(grid, a, w_out) > half) {
            w_in = w_out;
            w_out += dir * step;
            step *= 1.5;
            if (std::abs(w_out - peak_w) > 4.0 * wmax)
                throw ValidationError("signal bandwidth undefined: no half-maximum crossing found");
        }
        for (int i = 0; i < 80; ++i) {
            double mid = 0.5 * (w_in + w_out);
            if (power_spectrum(grid, a, mid) > half) w_in = mid; else w_out = mid;
        }
        return 0.5 * (w_in + w_out);
    };
    return crossing(+1.0) - crossing(-1.0);
}

double signal_bandwidth(const Envelope& env, double window_halfwidth_taus, int oversample)
{
    TimeGrid g;
    double hw = window_halfwidth_taus * env.duration();
    g.n = oversample * static_cast<int>(2 * window_halfwidth_taus) + 1;
    g.t0 = env.center() - hw;
    g.dt = 2.0 * hw / (g.n - 1);
    std::vector<cplx> a(g.n);
    for (int i = 0; i < g.n; ++i) a[i] = env(g.at(i));
    return signal_bandwidth(g, a);
}

} // namespace qraman
