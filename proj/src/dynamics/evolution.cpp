#include "qraman/dynamics/evolution.hpp"
#include "qraman/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qraman::dynamics {

void free_evolve_ac(EnsembleState& state, double duration, double gamma_ac, double K)
{
    if (duration < 0.0)
        throw ValidationError("free_evolve: duration must be >= 0");
    const int nv = state.nv();
    const double decay = std::exp(-gamma_ac * duration);
    const double pop_loss = 1.0 - decay * decay;
    const auto& w = state.vgrid.weights();
    std::vector<cplx> phase(nv);
    for (int j = 0; j < nv; ++j)
        phase[j] = std::polar(decay, -state.ac_tag * K * state.vgrid.nodes()[j] * duration);
    for (int iz = 0; iz < state.nz; ++iz) {
        double lost = 0.0;
        for (int j = 0; j < nv; ++j) {
            auto& s = state.sigma_ac[state.idx(iz, j)];
            if (pop_loss > 0.0) lost += w[j] * std::norm(s) * pop_loss;
            s *= phase[j];
        }
        state.decayed_c[iz] += lost;
    }
    state.ac_phase_min -= state.ac_tag * duration;
    state.ac_phase_max -= state.ac_tag * duration;
    if (state.ac_phase_min > state.ac_phase_max)
        std::swap(state.ac_phase_min, state.ac_phase_max);
    state.t_ref += duration;
}

void free_evolve_ad(EnsembleState& state, double duration, double gamma_ad)
{
    if (duration < 0.0)
        throw ValidationError("free_evolve: duration must be >= 0");
    const double decay = std::exp(-gamma_ad * duration);
    const double pop_loss = 1.0 - decay * decay;
    const auto& w = state.vgrid.weights();
    for (int iz = 0; iz < state.nz; ++iz) {
        double lost = 0.0;
        for (int j = 0; j < state.nv(); ++j) {
            auto& s = state.sigma_ad[state.idx(iz, j)];
            if (pop_loss > 0.0) lost += w[j] * std::norm(s) * pop_loss;
            s *= decay;
        }
        state.decayed_d[iz] += lost;
    }
    // a-d evolution is Doppler-free; t_ref advances with the ac call
}

void apply_decay_ac(EnsembleState& state, double f)
{
    const double loss = 1.0 - f * f;
    const auto& w = state.vgrid.weights();
    for (int iz = 0; iz < state.nz; ++iz) {
        double lost = 0.0;
        for (int j = 0; j < state.nv(); ++j) {
            auto& s = state.sigma_ac[state.idx(iz, j)];
            lost += w[j] * std::norm(s) * loss;
            s *= f;
        }
        state.decayed_c[iz] += lost;
    }
}

void apply_decay_ad(EnsembleState& state, double f)
{
    const double loss = 1.0 - f * f;
    const auto& w = state.vgrid.weights();
    for (int iz = 0; iz < state.nz; ++iz) {
        double lost = 0.0;
        for (int j = 0; j < state.nv(); ++j) {
            auto& s = state.sigma_ad[state.idx(iz, j)];
            lost += w[j] * std::norm(s) * loss;
            s *= f;
        }
        state.decayed_d[iz] += lost;
    }
}

TwoLevelAmps pi_rotate(TwoLevelAmps in, double theta, double phi)
{
    const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
    const cplx i1(0.0, 1.0);
    TwoLevelAmps out;
    out.ac = c * in.ac + i1 * std::polar(1.0, +phi) * s * in.ad;
    out.ad = i1 * std::polar(1.0, -phi) * s * in.ac + c * in.ad;
    return out;
}

TwoLevelAmps pi_rotate_decayed(TwoLevelAmps in, double theta, double phi,
                               double gamma_ac, double gamma_ad, double elapsed)
{
    const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
    const double dac = std::exp(-gamma_ac * elapsed);
    const double dad = std::exp(-gamma_ad * elapsed);
    const cplx i1(0.0, 1.0);
    TwoLevelAmps out;
    out.ac = dac * c * in.ac + i1 * std::polar(dad, +phi) * s * in.ad;
    out.ad = i1 * std::polar(dad, -phi) * s * in.ac + dad * c * in.ad;
    return out;
}

double PiPulseSpec::two_photon_rabi(double t) const
{
    if (shape == PiPulseShape::square)
        return (std::abs(t) <= 0.5 * tau) ? area / (2.0 * tau) : 0.0;
    // gaussian |Omega|^2 profile truncated at +-tau/2, sigma = tau/8;
    // normalized so the integral over the window is area/2
    const double sig = tau / 8.0;
    const double norm = area / (2.0 * std::sqrt(2.0 * std::numbers::pi) * sig *
                                std::erf(tau / (2.0 * std::sqrt(2.0) * sig)));
    if (std::abs(t) > 0.5 * tau) return 0.0;
    return norm * std::exp(-0.5 * t * t / (sig * sig));
}

double PiPulseSpec::omega_pi_peak() const
{
    // square: Theta = 2 |Omega|^2 tau / Delta
    if (shape == PiPulseShape::square)
        return std::sqrt(std::abs(area * delta) / (2.0 * tau));
    return std::sqrt(std::abs(two_photon_rabi(0.0) * delta));
}

double PiPulseSpec::two_level_residual(double delta_s) const
{
    const double peak = omega_pi_peak();
    auto ft_mag = [&](double w) {
        if (shape == PiPulseShape::square)
            return peak * tau * std::abs(w == 0.0 ? 1.0 : std::sin(0.5 * w * tau) / (0.5 * w * tau));
        // amplitude envelope e^{-t^2/(4 s^2)}, s = tau/8
        const double sa = tau / 8.0 * std::sqrt(2.0);
        return peak * std::sqrt(2.0 * std::numbers::pi) * sa * std::exp(-0.5 * w * w * sa * sa);
    };
    double worst = 0.0;
    for (int i = 0; i <= 100; ++i) {
        const double w = delta - delta_s + 2.0 * delta_s * i / 100.0;
        const double m = ft_mag(w);
        worst = std::max(worst, m * m);
    }
    return worst;
}

namespace {

void orphan_mismatched_ac(EnsembleState& state, double theta)
{
    const double c2 = std::cos(0.5 * theta) * std::cos(0.5 * theta);
    const double s2 = 1.0 - c2;
    for (size_t i = 0; i < state.sigma_ac.size(); ++i) {
        const double p = std::norm(state.sigma_ac[i]);
        if (p > 0.0) {
            state.orphan_c[i] += c2 * p;
            state.orphan_d[i] += s2 * p;
            state.sigma_ac[i] = 0.0;
        }
    }
    state.ac_phase_min = state.ad_phase_min;
    state.ac_phase_max = state.ad_phase_max;
}

void mix_phase_bounds(EnsembleState& state, double theta)
{
    // a pi pulse swaps the components; a partial pulse mixes them and the
    // bounds become the union
    if (std::abs(std::cos(0.5 * theta)) < 1e-9) {
        std::swap(state.ac_phase_min, state.ad_phase_min);
        std::swap(state.ac_phase_max, state.ad_phase_max);
    } else if (std::abs(std::sin(0.5 * theta)) >= 1e-9) {
        const double lo = std::min(state.ac_phase_min, state.ad_phase_min);
        const double hi = std::max(state.ac_phase_max, state.ad_phase_max);
        state.ac_phase_min = state.ad_phase_min = lo;
        state.ac_phase_max = state.ad_phase_max = hi;
    }
}

} // namespace

void pi_pulse_rotate(EnsembleState& state, const PiPulseSpec& pulse, double /*K*/)
{
    if (pulse.direction != +1 && pulse.direction != -1)
        throw ValidationError("pi_pulse_rotate: direction sign must be +1 or -1");
    if (state.ac_tag != pulse.direction) {
        // the stored a-c component is not addressed by this pulse pair's
        // beat vector; its rotated parts leave the phase-matched chain
        orphan_mismatched_ac(state, pulse.area);
        state.ac_tag = pulse.direction;
    }
    const double c = std::cos(0.5 * pulse.area), s = std::sin(0.5 * pulse.area);
    const cplx i1(0.0, 1.0);
    const cplx fp = i1 * std::polar(1.0, +pulse.phase) * s;
    const cplx fm = i1 * std::polar(1.0, -pulse.phase) * s;
    for (size_t i = 0; i < state.sigma_ac.size(); ++i) {
        const cplx ac = state.sigma_ac[i], ad = state.sigma_ad[i];
        state.sigma_ac[i] = c * ac + fp * ad;
        state.sigma_ad[i] = fm * ac + c * ad;
    }
    mix_phase_bounds(state, pulse.area);
}

TwoLevelAmps pi_integrate_class(TwoLevelAmps y, const PiPulseSpec& pulse,
                                double kv, double dt)
{
    if (dt > 0.02 * pulse.tau)
        throw ResolutionError("pi_pulse_integrate: need dt <= 0.02 tau_pi");
    const cplx i1(0.0, 1.0);
    const cplx a_ac = -(i1 * kv + pulse.gamma_ac);
    const cplx cp = i1 * std::polar(1.0, +pulse.phase);
    const cplx cm = i1 * std::polar(1.0, -pulse.phase);
    // cap the per-step phase advance so RK4 stays accurate for fast classes
    const double fastest = std::max({ std::abs(kv), pulse.two_photon_rabi(0.0),
                                      pulse.gamma_ac, pulse.gamma_ad });
    double h = dt;
    if (fastest > 0.0) h = std::min(h, 0.1 / fastest);
    const long nsteps = static_cast<long>(std::ceil(pulse.tau / h));
    h = pulse.tau / nsteps;

    auto rhs = [&](double t, const TwoLevelAmps& s, TwoLevelAmps& d) {
        const double ob = pulse.two_photon_rabi(t);
        d.ac = a_ac * s.ac + cp * ob * s.ad;
        d.ad = cm * ob * s.ac - pulse.gamma_ad * s.ad;
    };
    TwoLevelAmps k1, k2, k3, k4, tmp;
    for (long n = 0; n < nsteps; ++n) {
        const double t = -0.5 * pulse.tau + h * n;
        rhs(t, y, k1);
        tmp = { y.ac + 0.5 * h * k1.ac, y.ad + 0.5 * h * k1.ad };
        rhs(t + 0.5 * h, tmp, k2);
        tmp = { y.ac + 0.5 * h * k2.ac, y.ad + 0.5 * h * k2.ad };
        rhs(t + 0.5 * h, tmp, k3);
        tmp = { y.ac + h * k3.ac, y.ad + h * k3.ad };
        rhs(t + h, tmp, k4);
        y.ac += (h / 6.0) * (k1.ac + 2.0 * k2.ac + 2.0 * k3.ac + k4.ac);
        y.ad += (h / 6.0) * (k1.ad + 2.0 * k2.ad + 2.0 * k3.ad + k4.ad);
    }
    return y;
}

void pi_pulse_integrate(EnsembleState& state, const PiPulseSpec& pulse, double K, double dt)
{
    if (pulse.direction != +1 && pulse.direction != -1)
        throw ValidationError("pi_pulse_integrate: direction sign must be +1 or -1");
    if (state.ac_tag != pulse.direction) {
        orphan_mismatched_ac(state, pulse.area);
        state.ac_tag = pulse.direction;
    }
    const int nv = state.nv();
    for (int iz = 0; iz < state.nz; ++iz) {
        for (int j = 0; j < nv; ++j) {
            const size_t i = state.idx(iz, j);
            TwoLevelAmps y{ state.sigma_ac[i], state.sigma_ad[i] };
            const double kv = pulse.direction * K * state.vgrid.nodes()[j];
            y = pi_integrate_class(y, pulse, kv, dt);
            state.sigma_ac[i] = y.ac;
            state.sigma_ad[i] = y.ad;
        }
    }
    mix_phase_bounds(state, pulse.area);
    state.ac_phase_min -= pulse.tau; // Doppler accrued during the pulse
    state.ac_phase_max += pulse.tau;
    state.t_ref += pulse.tau;
}

} // namespace qraman::dynamics
