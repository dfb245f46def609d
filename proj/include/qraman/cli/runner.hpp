#pragma once

#include "qraman/cli/config.hpp"
#include "qraman/core/ensemble_state.hpp"
#include "qraman/geometry/design.hpp"
#include "qraman/oracle/prediction.hpp"
#include "qraman/propagation/retrieval.hpp"
#include "qraman/propagation/storage.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qraman::cli {

struct StageSnapshot {
    ProtocolStage stage;
    int iz = 0; // snapshot slice (mid-cell)
    std::vector<double> v;
    std::vector<cplx> sigma_ac;
    std::vector<cplx> sigma_ad;
};

struct RunReport {
    std::uint64_t config_hash = 0;
    geometry::DesignPoint design;
    double delta_s = 0.0;
    double tau_p = 0.0;

    int nz = 0, nv = 0;
    double dt = 0.0;
    int nt_storage = 0, nt_retrieval = 0;
    std::string solver_mode;
    std::string pi_pulse_mode;
    std::string decay_convention;

    double energy_in = 0.0;
    double energy_transmitted = 0.0;
    double transmitted_fraction = 0.0;
    double stored_fraction = 0.0;
    double energy_retrieved = 0.0;
    double retrieved_fraction = 0.0;
    propagation::ResidualPopulation residual;
    double mirror_overlap = 0.0;
    double echo_time_sim = 0.0;
    double max_abs_sigma = 0.0;

    oracle::AnalyticPrediction prediction;
    oracle::ValidationReport comparison;

    // phase-matching trials (A7); negative when not run
    double ratio_wrong_direction = -1.0;
    double ratio_no_reversal = -1.0;

    std::vector<std::string> warnings;
    double wall_seconds = 0.0; // stdout only, excluded from the report file
};

struct RunOptions {
    bool with_trials = false;
    bool keep_fields = false; // retain (z,t) envelopes and stage snapshots
};

struct RunArtifacts {
    RunReport report;
    std::optional<FieldEnvelope> forward_field;
    std::optional<FieldEnvelope> backward_field;
    std::vector<StageSnapshot> snapshots;
};

/// Executes the four-stage protocol for one scenario.
RunArtifacts run_scenario(const ScenarioConfig& cfg, const RunOptions& opt = {});

/// Sweep: re-runs the scenario with `param` (section.key path, or the
/// virtual path derived.optical_depth) set to each value.
struct SweepRow {
    double value = 0.0;
    double retrieved_fraction = 0.0;
    double analytic_fraction = 0.0;
    double rel_error = 0.0;
};
std::vector<SweepRow> run_sweep(const std::string& config_text, const std::string& origin,
                                const std::string& param, const std::vector<double>& values);

/// Collects every cross-field validation violation for a scenario
/// (adiabaticity, bandwidth margin, timeline, transport bound, pulse areas).
std::vector<std::string> validate_scenario(const ScenarioConfig& cfg);

/// Velocity grid sized for the scenario (power-of-two nodes, scan-checked).
VelocityGrid build_velocity_grid(const ScenarioConfig& cfg, const geometry::DesignPoint& dp,
                                 bool with_trials);

/// The envelope described by the scenario's [input] section.
Envelope build_input(const ScenarioConfig& cfg);

/// Geometry resolution (explicit angle or optimize_angle) plus the measured
/// input bandwidth delta_s.
geometry::DesignPoint resolve_design(const ScenarioConfig& cfg, double delta_s);

} // namespace qraman::cli
