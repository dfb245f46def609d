#include "qraman/oracle/prediction.hpp"
#include "qraman/errors.hpp"
#include "qraman/geometry/design.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace qraman::oracle {

AnalyticPrediction predict(const PhysicalConfig& phys, const BeamGeometry& geom,
                           const ProtocolTimeline& tl, const Envelope& input,
                           double delta_s, double c_light)
{
    AnalyticPrediction p;
    p.alphaR = geometry::raman_absorption(phys.k, geom.K, phys.omega2, phys.delta1, phys.alpha0);
    p.optical_depth = p.alphaR * phys.length;
    const double e = std::exp(-p.optical_depth);
    p.transmitted_fraction = e;
    p.stored_fraction = 1.0 - e;

    const double t12 = tl.t12(), t23 = tl.t23();
    p.amplitude_decay = std::exp(-2.0 * phys.gamma_ac * t12 - phys.gamma_ad * t23);
    p.retrieved_fraction = (1.0 - e) * (1.0 - e) * p.amplitude_decay * p.amplitude_decay;

    // residual fraction as printed (gamma_ac on every leg) and with the
    // t23 leg decaying at gamma_ad; they coincide when the two rates match
    p.residual_eta = 1.0 - std::exp(-2.0 * phys.gamma_ac * (t23 + 2.0 * t12)) * (1.0 - e);
    {
        const double a = std::exp(-2.0 * phys.gamma_ac * t12);
        const double b = std::exp(-2.0 * phys.gamma_ad * t23);
        p.residual_eta_split_rates = 1.0 - a * a * b * (1.0 - e);
    }
    p.echo_time = tl.echo_time();

    const double Ku = geom.K * phys.u;
    p.broadband_valid = delta_s <= Ku;
    if (!p.broadband_valid) {
        std::ostringstream os;
        os << "broadband validity delta_s <= Ku violated (delta_s = " << delta_s
           << ", Ku = " << Ku << "); predictions assume uniform attenuation";
        p.validity_warning = os.str();
    }

    const double alphaR = p.alphaR;
    const double L = phys.length;
    const double echo = p.echo_time;
    const double t1 = tl.t1;
    const double decay = p.amplitude_decay;
    const Envelope in = input;
    const double cinv = std::isfinite(c_light) ? 1.0 / c_light : 0.0;
    p.restored_envelope = [=](double z, double t) -> cplx {
        const double arg = t1 - (t - echo) - z * cinv;
        return in(arg) * std::exp(-0.5 * alphaR * z) * decay * (1.0 - std::exp(-alphaR * (L - z)));
    };
    return p;
}

namespace {

ComparisonRow make_row(const std::string& name, double sim, double pred, double tol)
{
    ComparisonRow r;
    r.name = name;
    r.simulated = sim;
    r.predicted = pred;
    const double denom = std::max(std::abs(pred), 1e-300);
    r.rel_error = std::abs(sim - pred) / denom;
    r.tolerance = tol;
    r.pass = r.rel_error <= tol;
    return r;
}

} // namespace

ValidationReport compare(const SimSummary& sim, const AnalyticPrediction& pred,
                         const Tolerances& tol)
{
    ValidationReport rep;
    rep.rows.push_back(make_row("transmitted_fraction", sim.transmitted_fraction,
                                pred.transmitted_fraction, tol.transmitted));

    // a deliberately mis-set pulse area scales the retrieved energy by
    // sin^2(T/2) per pulse; fold that into the expectation and flag it
    // the coherence passes one conversion per pulse, so the echo amplitude
    // scales as sin(T2/2) sin(T3/2) and the energy as the square
    double area_scale = 1.0;
    const double s2 = std::sin(0.5 * sim.pulse_area2), s3 = std::sin(0.5 * sim.pulse_area3);
    if (std::abs(sim.pulse_area2 - std::numbers::pi) > 1e-12 ||
        std::abs(sim.pulse_area3 - std::numbers::pi) > 1e-12) {
        area_scale = (s2 * s2) * (s3 * s3);
        std::ostringstream os;
        os << "pulse-area transfer deficit: expected energy scaling sin^2(T2/2) sin^2(T3/2) = "
           << area_scale;
        rep.notes.push_back(os.str());
    }
    rep.rows.push_back(make_row("retrieved_fraction", sim.retrieved_fraction,
                                pred.retrieved_fraction * area_scale, tol.retrieved));

    // residual population: report against both printed conventions
    const bool same_rates = std::abs(pred.residual_eta - pred.residual_eta_split_rates) < 1e-15;
    rep.rows.push_back(make_row("residual_eta_vs_printed", sim.residual_eta,
                                pred.residual_eta, tol.residual));
    if (!same_rates) {
        rep.rows.push_back(make_row("residual_eta_vs_split_rates", sim.residual_eta,
                                    pred.residual_eta_split_rates, tol.residual));
        rep.notes.push_back("gamma_ad != gamma_ac: the printed residual formula keeps gamma_ac on the "
                            "t23 leg; the split-rate variant is the simulation-consistent bookkeeping");
        // the printed-form row is informational in this regime
        rep.rows[rep.rows.size() - 2].pass = true;
    }

    {
        ComparisonRow r;
        r.name = "mirror_overlap";
        r.simulated = sim.mirror_overlap;
        r.predicted = 1.0;
        r.rel_error = 1.0 - sim.mirror_overlap;
        r.tolerance = 1.0 - tol.overlap_min;
        r.pass = sim.mirror_overlap >= tol.overlap_min;
        rep.rows.push_back(r);
    }
    {
        ComparisonRow r;
        r.name = "echo_time";
        r.simulated = sim.echo_time;
        r.predicted = pred.echo_time;
        const double scale = sim.tau_p > 0 ? sim.tau_p : 1.0;
        r.rel_error = std::abs(sim.echo_time - pred.echo_time) / scale;
        r.tolerance = tol.echo_time;
        r.pass = r.rel_error <= r.tolerance;
        rep.rows.push_back(r);
    }
    if (!pred.validity_warning.empty())
        rep.notes.push_back(pred.validity_warning);

    for (const auto& r : rep.rows)
        rep.all_pass = rep.all_pass && r.pass;
    return rep;
}

double mirror_overlap(const TimeGrid& grid, std::span<const cplx> retrieved,
                      const Envelope& input, double t1, double echo_time)
{
    cplx dot = 0.0;
    double nm = 0.0, nf = 0.0;
    for (int n = 0; n < grid.n; ++n) {
        const cplx m = input(t1 - (grid.at(n) - echo_time));
        const double w = (n == 0 || n == grid.n - 1) ? 0.5 : 1.0;
        dot += w * std::conj(m) * retrieved[n];
        nm += w * std::norm(m);
        nf += w * std::norm(retrieved[n]);
    }
    if (nm <= 0.0 || nf <= 0.0)
        throw ValidationError("mirror_overlap: zero envelope");
    return std::abs(dot) / std::sqrt(nm * nf);
}

} // namespace qraman::oracle
