#pragma once

#include "qraman/cli/runner.hpp"

#include <string>

namespace qraman::cli {

/// Shortest round-trip decimal form (locale-independent).
std::string fmt_double(double v);

/// Deterministic structured-text report; excludes wall-clock time so that
/// identical configs produce byte-identical files.
std::string render_report(const RunReport& rep);

/// Writes report.txt, the envelope traces (t, Re, Im, |A|^2 at z = 0 and
/// z = L for each direction, global time), and per-stage coherence
/// snapshots (v, Re/Im sigma_ac, Re/Im sigma_ad) under `dir`.
void write_artifacts(const RunArtifacts& art, const std::string& dir, double c_light);

std::string render_sweep_csv(const std::string& param, const std::vector<SweepRow>& rows);

} // namespace qraman::cli
