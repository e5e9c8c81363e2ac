#pragma once

#include <stdexcept>
#include <string>

namespace kgphase {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define KGPHASE_DEFINE_ERROR(Name)                                     \
    class Name : public Error {                                        \
    public:                                                            \
        explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
    }

KGPHASE_DEFINE_ERROR(InvalidGrid);
KGPHASE_DEFINE_ERROR(IncompatibleDomain);
KGPHASE_DEFINE_ERROR(InvalidParams);
KGPHASE_DEFINE_ERROR(LengthMismatch);
KGPHASE_DEFINE_ERROR(NonHermitianSpectrum);
KGPHASE_DEFINE_ERROR(NonFinite);
KGPHASE_DEFINE_ERROR(Unsupported);
KGPHASE_DEFINE_ERROR(StageSolveDiverged);
KGPHASE_DEFINE_ERROR(CenterOnLoop);
KGPHASE_DEFINE_ERROR(CenterOnTrack);
KGPHASE_DEFINE_ERROR(NonInteger);
KGPHASE_DEFINE_ERROR(DegenerateLoop);
KGPHASE_DEFINE_ERROR(InsufficientData);
KGPHASE_DEFINE_ERROR(MissingSnapshot);

#undef KGPHASE_DEFINE_ERROR

}  // namespace kgphase
