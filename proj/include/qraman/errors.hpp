#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace qraman {

/// Precondition or cross-field configuration violation. Maps to exit code 2.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg)
        : std::runtime_error(msg) {}
    ValidationError(const std::string& header, const std::vector<std::string>& items)
        : std::runtime_error(join(header, items)), violations(items) {}

    std::vector<std::string> violations;

private:
    static std::string join(const std::string& header, const std::vector<std::string>& items)
    {
        std::string s = header;
        for (const auto& it : items) {
            s += "\n  - ";
            s += it;
        }
        return s;
    }
};

/// Grid cannot resolve the requested dynamics (velocity span, step size,
/// non-convergence between refinements). Maps to exit code 3.
class ResolutionError : public std::runtime_error {
public:
    explicit ResolutionError(const std::string& msg)
        : std::runtime_error(msg) {}
};

} // namespace qraman
