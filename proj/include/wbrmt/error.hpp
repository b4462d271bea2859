#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wbrmt {

enum class ErrorCode {
    invalid_input,
    degenerate_series,
    invalid_filter,
    size,
    inconsistent,
    scale_range,
    insufficient_data,
    degenerate_segment,
    fit_range,
    grid,
    constraint,
    numerical_failure,
    unfolding,
    fit,
    parameter,
    domain,
    config,
    io,
};

std::string_view to_string(ErrorCode code);

/// Exception carried across module boundaries. `module()` names the
/// component that raised it so the CLI can surface it with context.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string module, const std::string& message)
        : std::runtime_error(module + ": " + message), code_(code), module_(std::move(module)) {}

    ErrorCode code() const noexcept { return code_; }
    const std::string& module() const noexcept { return module_; }

private:
    ErrorCode code_;
    std::string module_;
};

}  // namespace wbrmt
