// Acceptance suite runner: one pass/fail line per criterion on stdout,
// timing chatter on stderr, nonzero exit on any failure.

#include "qraman/errors.hpp"
#include "qraman/validate/acceptance.hpp"

#include <iostream>
#include <string>

int main(int argc, char** argv)
{
    std::string dir = "configs/acceptance";
    if (argc > 1) dir = argv[1];
    try {
        auto summary = qraman::validate::run_acceptance(dir, std::cout, std::cerr);
        std::cout << qraman::validate::render_summary(summary);
        return summary.all_pass ? 0 : 4;
    } catch (const qraman::ValidationError& e) {
        std::cerr << "acceptance aborted: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "acceptance aborted: " << e.what() << "\n";
        return 3;
    }
}
