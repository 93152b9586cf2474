#pragma once

#include <stdexcept>
#include <string>

namespace pantostar {

enum class Errc {
    NonPositiveWeight,
    CompressionNotGreaterThanOne,
    HorizonTooShort,
    TooFewEdges,
    TimeOutOfRange,
    StepTooLarge,
    UndefinedControl,
    MissingMandatoryNode,
    NotPositiveDefinite,
    EvaluationAtKinkWithoutSideSelector,
    InvalidInput,
};

constexpr const char* to_string(Errc code) noexcept {
    switch (code) {
        case Errc::NonPositiveWeight: return "NonPositiveWeight";
        case Errc::CompressionNotGreaterThanOne: return "CompressionNotGreaterThanOne";
        case Errc::HorizonTooShort: return "HorizonTooShort";
        case Errc::TooFewEdges: return "TooFewEdges";
        case Errc::TimeOutOfRange: return "TimeOutOfRange";
        case Errc::StepTooLarge: return "StepTooLarge";
        case Errc::UndefinedControl: return "UndefinedControl";
        case Errc::MissingMandatoryNode: return "MissingMandatoryNode";
        case Errc::NotPositiveDefinite: return "NotPositiveDefinite";
        case Errc::EvaluationAtKinkWithoutSideSelector: return "EvaluationAtKinkWithoutSideSelector";
        case Errc::InvalidInput: return "InvalidInput";
    }
    return "UnknownError";
}

/// Domain error carrying a machine-checkable code alongside the message.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace pantostar
