#pragma once

#include <stdexcept>
#include <string>

namespace tloc {

struct NonDivisibleConductor : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct Unrealizable : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct PrecisionTooSmall : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InvalidParams : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NoSuchGenerator : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnknownSubfield : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct TauNotInvolution : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DepthInsufficient : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct CocycleInvalid : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct FundamentalClassUnsupported : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct WrongValuation : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NonIntegerConductor : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnsupportedExtension : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace tloc
