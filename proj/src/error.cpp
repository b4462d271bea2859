#include "wbrmt/error.hpp"

namespace wbrmt {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::invalid_input: return "invalid_input";
        case ErrorCode::degenerate_series: return "degenerate_series";
        case ErrorCode::invalid_filter: return "invalid_filter";
        case ErrorCode::size: return "size";
        case ErrorCode::inconsistent: return "inconsistent";
        case ErrorCode::scale_range: return "scale_range";
        case ErrorCode::insufficient_data: return "insufficient_data";
        case ErrorCode::degenerate_segment: return "degenerate_segment";
        case ErrorCode::fit_range: return "fit_range";
        case ErrorCode::grid: return "grid";
        case ErrorCode::constraint: return "constraint";
        case ErrorCode::numerical_failure: return "numerical_failure";
        case ErrorCode::unfolding: return "unfolding";
        case ErrorCode::fit: return "fit";
        case ErrorCode::parameter: return "parameter";
        case ErrorCode::domain: return "domain";
        case ErrorCode::config: return "config";
        case ErrorCode::io: return "io";
    }
    return "unknown";
}

}  // namespace wbrmt
