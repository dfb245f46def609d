#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qraman::validate {

struct CriterionResult {
    std::string id;
    std::string description;
    bool pass = false;
    std::string detail;    // deterministic measured-vs-expected text
    double seconds = 0.0;  // not part of the summary bytes
};

struct AcceptanceSummary {
    std::vector<CriterionResult> results;
    bool all_pass = true;
};

/// Runs every acceptance criterion against the pinned configs in
/// `config_dir`. One pass/fail line per criterion goes to `lines`;
/// timing chatter goes to `timing` (may be the same stream).
AcceptanceSummary run_acceptance(const std::string& config_dir, std::ostream& lines,
                                 std::ostream& timing);

/// Deterministic machine-readable summary (identical bytes across runs).
std::string render_summary(const AcceptanceSummary& s);

} // namespace qraman::validate
