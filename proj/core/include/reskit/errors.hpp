// errors.hpp — typed error conditions shared by all modules

#pragma once

#include <stdexcept>
#include <string>

namespace reskit {

enum class ErrorCode {
    // linop
    SingularShift,
    DefectiveMatrix,
    NotSelfAdjoint,
    // feshbach
    NotNested,
    NotInKernel,
    // resonance
    A1Violated,
    A4Violated,
    DegenerateLevelShift,
    LimitNotConverged,
    OutsideWindow,
    CircleTouchesSpectrum,
    NotSeparating,
    PairingAmbiguous,
    FixedPointDiverged,
    EmptyResonanceSet,
    // propagator
    QuadratureNotConverged,
    NotPartiallyStable,
    WindowTooSmall,
    // bath
    WindowTooNarrow,
    ClusterOutsideContinuum,
    UnsupportedCoupling,
    // spinboson
    NonIntegrableDensity,
    IntegralNotDamped,
    LabelNotInClosedSet,
    InfraredDivergent,
    // generic
    InvalidArgument,
    IoError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

} // namespace reskit
