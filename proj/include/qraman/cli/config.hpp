#pragma once

#include "qraman/core/field_envelope.hpp"
#include "qraman/core/types.hpp"
#include "qraman/dynamics/evolution.hpp"
#include "qraman/propagation/medium.hpp"

#include <cstdint>
#include <map>
#include <string>

namespace qraman::cli {

/// Scenario description parsed from the sectioned key-value config format.
/// All physical inputs are SI.
struct ScenarioConfig {
    PhysicalConfig phys;

    bool theta_auto = true; // geometry.theta = auto -> optimize_angle
    double theta = 0.0;
    double margin = 3.0;

    ProtocolTimeline tl;

    EnvelopeShape shape = EnvelopeShape::gaussian;
    double hump_separation_taus = 3.0; // two_hump: separation in units of tau_p
    double hump_ratio = 0.6;
    std::string samples_file;

    double theta2 = 0.0, theta3 = 0.0; // pulse areas; 0 resolves to pi or omega_pi
    double area_tolerance = 0.05;
    dynamics::PiPulseShape pulse_shape = dynamics::PiPulseShape::square;
    bool pi_finite = false;

    propagation::SolverMode mode = propagation::SolverMode::local;
    int nz = 0;
    int nv = 0;       // 0: auto-sized from the required phase span
    double dt = 0.0;  // 0: auto
    double storage_window = 10.0;
    double retrieval_window = 14.0;
    double control_lead = 5.0;
    propagation::DecayConvention decay = propagation::DecayConvention::echo_time;
    double c_light = 299792458.0;

    bool light_shift_manual = false;
    bool acknowledge_light_shift = false;

    std::string output_dir = "out";

    std::uint64_t hash = 0; // over semantically significant fields only

    /// Effective pulse areas (explicit, or derived from omega_pi_peak, or pi).
    double effective_theta2() const;
    double effective_theta3() const;
};

/// Parses the sectioned format:
///   # comment
///   [section]
///   key = value
/// Unknown keys are validation errors (reported exhaustively).
/// The hash covers parsed (section.key, value) pairs after numeric
/// canonicalization, so comments and formatting do not affect it.
ScenarioConfig parse_config(const std::string& text, const std::string& origin);
ScenarioConfig load_config(const std::string& path);

/// Raw section.key -> value view of a config text (used by sweeps).
std::map<std::string, std::string> config_entries(const std::string& text);
std::string render_config(const std::map<std::string, std::string>& entries);

std::uint64_t fnv1a64(const std::string& s, std::uint64_t h = 1469598103934665603ull);

} // namespace qraman::cli
