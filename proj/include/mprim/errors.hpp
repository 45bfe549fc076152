#ifndef MPRIM_ERRORS_HPP
#define MPRIM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mprim {

/// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct MalformedInput : Error       { using Error::Error; };
struct DegenerateSequence : Error   { using Error::Error; };
struct PositionOnlyInput : Error    { using Error::Error; };
struct DegenerateInput : Error      { using Error::Error; };
struct OutOfDomain : Error          { using Error::Error; };
struct SingularVelocity : Error     { using Error::Error; };
struct VanishingCurvature : Error   { using Error::Error; };
struct DegenerateLimb : Error       { using Error::Error; };
struct DegenerateDirection : Error  { using Error::Error; };
struct TooShort : Error             { using Error::Error; };
struct EmptyData : Error            { using Error::Error; };
struct NonFiniteData : Error        { using Error::Error; };
struct InvalidPrior : Error         { using Error::Error; };
struct DimensionMismatch : Error    { using Error::Error; };
struct InconsistentIndicators : Error { using Error::Error; };
struct EmptyClass : Error           { using Error::Error; };
struct EmptyCurve : Error           { using Error::Error; };
struct UnknownClassRef : Error      { using Error::Error; };
struct NoFeatures : Error           { using Error::Error; };
struct EmptyHypotheses : Error      { using Error::Error; };
struct DegenerateFrame : Error      { using Error::Error; };
struct EmptyManifold : Error        { using Error::Error; };
struct InvalidScript : Error        { using Error::Error; };
struct CountMismatch : Error        { using Error::Error; };
struct DegenerateConfiguration : Error { using Error::Error; };
struct SingleClassData : Error      { using Error::Error; };
struct NonConvergence : Error       { using Error::Error; };
struct DegenerateScores : Error     { using Error::Error; };
struct ConfigError : Error          { using Error::Error; };

}  // namespace mprim

#endif
