#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mktphase {

/// Coarse failure class; the CLI prints it as a machine-readable prefix.
enum class ErrorCategory {
    parse,      ///< malformed input record
    input,      ///< well-formed input violating a precondition
    domain,     ///< numerically undefined quantity (zero variance, empty risk mass)
    numerical,  ///< solver did not converge
    io,         ///< file system failure
    config,     ///< bad run configuration
};

std::string_view category_name(ErrorCategory c) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& what)
        : std::runtime_error(what), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

}  // namespace mktphase
