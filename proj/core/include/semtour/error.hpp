#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

#include "semtour/enum_names.hpp"

namespace semtour {

// Closed set of failure cases. The wire name of each code is the enumerator
// name; the HTTP layer maps every code to exactly one status.
enum class ErrorCode {
    // dataspace
    HighlightOutsideSelection,
    AlreadySequenced,
    UnknownScene,
    // knowledge graph
    DuplicateId,
    DanglingSource,
    UnknownEntity,
    UnknownRelationType,
    SelfLoopForbidden,
    UnknownEdge,
    AmbiguousContainer,
    // tours
    UnknownDocument,
    NoMatches,
    EmptyTour,
    SessionMismatch,
    // sessions
    NotInTour,
    NotAdjacentToCurrent,
    SourceNotVisited,
    UseStepOrBranch,
    RangeOutOfBounds,
    SpanOutOfBounds,
    UnknownEvent,
    TacitProvenanceRequired,
    // persistence
    IoError,
    SchemaError,
    // service lookups
    UnknownGraph,
    UnknownTour,
    UnknownSession,
    RouteNotFound,
    // generic precondition violation
    InvalidArgument,
};

template <>
struct EnumNames<ErrorCode> {
    static constexpr std::array<std::string_view, 29> names = {
        "HighlightOutsideSelection", "AlreadySequenced",   "UnknownScene",
        "DuplicateId",               "DanglingSource",     "UnknownEntity",
        "UnknownRelationType",       "SelfLoopForbidden",  "UnknownEdge",
        "AmbiguousContainer",        "UnknownDocument",    "NoMatches",
        "EmptyTour",                 "SessionMismatch",    "NotInTour",
        "NotAdjacentToCurrent",      "SourceNotVisited",   "UseStepOrBranch",
        "RangeOutOfBounds",          "SpanOutOfBounds",    "UnknownEvent",
        "TacitProvenanceRequired",   "IoError",            "SchemaError",
        "UnknownGraph",              "UnknownTour",        "UnknownSession",
        "RouteNotFound",             "InvalidArgument",
    };
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, std::map<std::string, std::string> detail = {});

    ErrorCode code() const noexcept { return code_; }
    const std::string& message() const noexcept { return message_; }
    const std::map<std::string, std::string>& detail() const noexcept { return detail_; }

private:
    ErrorCode code_;
    std::string message_;
    std::map<std::string, std::string> detail_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message,
                       std::map<std::string, std::string> detail = {});

}  // namespace semtour
