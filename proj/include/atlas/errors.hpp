#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace atlas {

// Base class for all library errors. kind() is the stable machine-readable
// name surfaced on the CLI's error line.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& msg)
        : std::runtime_error(msg), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define ATLAS_DEFINE_ERROR(Name)                                        \
    class Name : public Error {                                         \
    public:                                                             \
        explicit Name(const std::string& msg) : Error(#Name, msg) {}    \
    }

ATLAS_DEFINE_ERROR(DimensionMismatch);
ATLAS_DEFINE_ERROR(DomainViolation);
ATLAS_DEFINE_ERROR(BudgetExhausted);
ATLAS_DEFINE_ERROR(ZeroVectorDraw);
ATLAS_DEFINE_ERROR(OriginOutsideDomain);
ATLAS_DEFINE_ERROR(OriginNotAcceptable);
ATLAS_DEFINE_ERROR(NoAcceptableControl);
ATLAS_DEFINE_ERROR(InsufficientSamples);
ATLAS_DEFINE_ERROR(DegenerateDirections);
ATLAS_DEFINE_ERROR(EmptyIntersection);
ATLAS_DEFINE_ERROR(AllOriginsFailed);
ATLAS_DEFINE_ERROR(StateFeedbackDimMismatch);
ATLAS_DEFINE_ERROR(DimensionTooHigh);
ATLAS_DEFINE_ERROR(FormatVersionMismatch);
ATLAS_DEFINE_ERROR(CorruptFile);
ATLAS_DEFINE_ERROR(ConfigInvalid);
ATLAS_DEFINE_ERROR(FileUnreadable);

#undef ATLAS_DEFINE_ERROR

// Carries the index of the waypoint that could not be reached.
class WaypointInfeasible : public Error {
public:
    WaypointInfeasible(int index, const std::string& msg)
        : Error("WaypointInfeasible", msg), index_(index) {}

    int index() const noexcept { return index_; }

private:
    int index_;
};

} // namespace atlas
