#ifndef ILLUMINATI_ERRORS_HPP
#define ILLUMINATI_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace illuminati {

enum class ErrorCode {
    index_out_of_range,
    shape_mismatch,
    empty_dataset,
    non_finite_loss,
    unsupported_activation,
    format_version,
    parse_error,
    validation_error,
    domain_error,
    not_undirected,
    invalid_budget,
    missing_explanation,
    missing_attribute_scores,
    too_large,
    invalid_count,
    io_error,
};

inline std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::index_out_of_range: return "IndexOutOfRange";
    case ErrorCode::shape_mismatch: return "ShapeMismatch";
    case ErrorCode::empty_dataset: return "EmptyDataset";
    case ErrorCode::non_finite_loss: return "NonFiniteLoss";
    case ErrorCode::unsupported_activation: return "UnsupportedActivation";
    case ErrorCode::format_version: return "VersionMismatch";
    case ErrorCode::parse_error: return "ParseError";
    case ErrorCode::validation_error: return "ValidationError";
    case ErrorCode::domain_error: return "DomainError";
    case ErrorCode::not_undirected: return "NotUndirected";
    case ErrorCode::invalid_budget: return "InvalidBudget";
    case ErrorCode::missing_explanation: return "MissingExplanation";
    case ErrorCode::missing_attribute_scores: return "MissingAttributeScores";
    case ErrorCode::too_large: return "TooLarge";
    case ErrorCode::invalid_count: return "InvalidCount";
    case ErrorCode::io_error: return "IoError";
    }
    return "Unknown";
}

/// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
    {
    }

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace illuminati

#endif // ILLUMINATI_ERRORS_HPP
