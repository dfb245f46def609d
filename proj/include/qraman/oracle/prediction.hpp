#pragma once

#include "qraman/core/field_envelope.hpp"
#include "qraman/core/types.hpp"

#include <functional>
#include <string>
#include <vector>

namespace qraman::oracle {

/// Closed-form predictions for one protocol run.
struct AnalyticPrediction {
    double alphaR = 0.0;
    double optical_depth = 0.0;
    double stored_fraction = 0.0;          // 1 - e^{-alphaR L}
    double transmitted_fraction = 0.0;     // e^{-alphaR L}
    double retrieved_fraction = 0.0;       // (1 - e^{-aL})^2 e^{-2(2 gac t12 + gad t23)}
    double residual_eta = 0.0;             // 1 - e^{-2 gac (t23 + 2 t12)} (1 - e^{-aL}), as printed
    double residual_eta_split_rates = 0.0; // same bookkeeping with gamma_ad kept on the t23 leg
    double echo_time = 0.0;                // t3 + t12
    double amplitude_decay = 0.0;          // e^{-2 gac t12 - gad t23}
    bool broadband_valid = true;           // delta_s <= Ku
    std::string validity_warning;

    /// Restored envelope A(z, t), forward-stage input given at z = 0.
    std::function<cplx(double z, double t)> restored_envelope;
};

AnalyticPrediction predict(const PhysicalConfig& phys, const BeamGeometry& geom,
                           const ProtocolTimeline& tl, const Envelope& input,
                           double delta_s, double c_light);

/// One compared quantity.
struct ComparisonRow {
    std::string name;
    double simulated = 0.0;
    double predicted = 0.0;
    double rel_error = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct Tolerances {
    double transmitted = 0.02;
    double retrieved = 0.03;
    double residual = 0.02;
    double overlap_min = 0.999;
    double echo_time = 0.02; // in units of tau_p
};

struct SimSummary {
    double transmitted_fraction = 0.0;
    double retrieved_fraction = 0.0;
    double residual_eta = 0.0;
    double mirror_overlap = 0.0;
    double echo_time = 0.0;
    double tau_p = 0.0;
    double stored_fraction = 0.0;
    double pulse_area2 = 0.0; // stage-2 pulse area actually applied
    double pulse_area3 = 0.0;
};

struct ValidationReport {
    std::vector<ComparisonRow> rows;
    std::vector<std::string> notes;
    bool all_pass = true;
};

/// Per-quantity relative errors against the closed forms, plus the
/// time-mirror overlap check and a pulse-area transfer-deficit note when a
/// pulse area is off pi (expected energy scaling sin^2(T2/2) sin^2(T3/2)).
ValidationReport compare(const SimSummary& sim, const AnalyticPrediction& pred,
                         const Tolerances& tol);

/// Normalized overlap |<mirror, field>| / (||mirror|| ||field||) of the
/// retrieved envelope at z = 0 with the time-mirrored input about the echo.
double mirror_overlap(const TimeGrid& grid, std::span<const cplx> retrieved,
                      const Envelope& input, double t1, double echo_time);

} // namespace qraman::oracle
