#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace magnomech {

enum class ErrorKind {
    NonPositiveRate,
    NegativeOccupation,
    NegativeCoupling,
    InvalidUnit,
    NonPositiveRatio,
    StepTooLarge,
    NonFinite,
    ZeroEta,
    FrameMismatch,
    WrongVariant,
    OutOfTrajectoryRange,
    UnphysicalState,
    UnstableDrift,
    DegenerateDiscriminant,
    SingularState,
    NotConverged,
    InsufficientSamples,
    InvalidArgument,
    ConfigError,
    Internal,
};

inline constexpr std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::NonPositiveRate: return "NonPositiveRate";
        case ErrorKind::NegativeOccupation: return "NegativeOccupation";
        case ErrorKind::NegativeCoupling: return "NegativeCoupling";
        case ErrorKind::InvalidUnit: return "InvalidUnit";
        case ErrorKind::NonPositiveRatio: return "NonPositiveRatio";
        case ErrorKind::StepTooLarge: return "StepTooLarge";
        case ErrorKind::NonFinite: return "NonFinite";
        case ErrorKind::ZeroEta: return "ZeroEta";
        case ErrorKind::FrameMismatch: return "FrameMismatch";
        case ErrorKind::WrongVariant: return "WrongVariant";
        case ErrorKind::OutOfTrajectoryRange: return "OutOfTrajectoryRange";
        case ErrorKind::UnphysicalState: return "UnphysicalState";
        case ErrorKind::UnstableDrift: return "UnstableDrift";
        case ErrorKind::DegenerateDiscriminant: return "DegenerateDiscriminant";
        case ErrorKind::SingularState: return "SingularState";
        case ErrorKind::NotConverged: return "NotConverged";
        case ErrorKind::InsufficientSamples: return "InsufficientSamples";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::ConfigError: return "ConfigError";
        case ErrorKind::Internal: return "Internal";
    }
    return "Unknown";
}

/// Every failure raised by the library carries a machine-readable kind and,
/// where one exists, the name of the offending field.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string message, std::string field = {})
        : std::runtime_error(std::string(to_string(kind)) + ": " + message),
          kind_(kind),
          field_(std::move(field)) {}

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& field() const noexcept { return field_; }

private:
    ErrorKind kind_;
    std::string field_;
};

}  // namespace magnomech
