#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mednlu {

enum class Errc {
    InvalidArgument,
    EmptyInput,
    UnknownLabel,
    UnknownGoldLabel,
    GoldNotInChoices,
    ScoreOutOfScale,
    PoolTooSmall,
    SeparatorCollision,
    NoChoiceFound,
    MissingGoldOffsets,
    LengthMismatch,
    ZeroVariance,
    TooFewPoints,
    DuplicateDataset,
    MalformedRecord,
    SchemaMismatch,
    IndexOutOfRange,
    EmptyTaskPool,
    CannotSatisfyDistinctness,
    Transport,
    AuthRejected,
    ResponseMalformed,
    ShapeMismatch,
    NameSetMismatch,
    CorruptHeader,
    TruncatedPayload,
    ChecksumMismatch,
};

std::string_view errc_name(Errc c);

/// Single exception type for the whole library; carries a machine-checkable code.
class NluError : public std::runtime_error {
public:
    NluError(Errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message),
          code_(code),
          message_(message) {}

    Errc code() const noexcept { return code_; }
    const std::string& message() const noexcept { return message_; }

private:
    Errc code_;
    std::string message_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
    throw NluError(code, message);
}

} // namespace mednlu
