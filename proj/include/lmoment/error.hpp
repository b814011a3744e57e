#pragma once

#include <stdexcept>
#include <string>

namespace lmoment {

/// Coarse classification used by the CLI to pick an exit code.
enum class ErrorClass {
    usage,        // bad arguments or violated preconditions
    data,         // malformed or insufficient eigenvalue data
    numerical,    // a quadrature or convergence certificate could not be met
};

class Error : public std::runtime_error {
public:
    Error(ErrorClass cls, const std::string& what) : std::runtime_error(what), cls_(cls) {}
    ErrorClass error_class() const noexcept { return cls_; }

private:
    ErrorClass cls_;
};

#define LMOMENT_DEFINE_ERROR(Name, cls)                                        \
    class Name : public Error {                                                \
    public:                                                                    \
        explicit Name(const std::string& what) : Error(ErrorClass::cls, what) {} \
    };

LMOMENT_DEFINE_ERROR(CompositeModulus, usage)
LMOMENT_DEFINE_ERROR(ModulusTooSmall, usage)
LMOMENT_DEFINE_ERROR(NotCoprime, usage)
LMOMENT_DEFINE_ERROR(PrincipalCharacter, usage)
LMOMENT_DEFINE_ERROR(OddCharacter, usage)
LMOMENT_DEFINE_ERROR(PoleError, usage)
LMOMENT_DEFINE_ERROR(InvalidArgument, usage)

LMOMENT_DEFINE_ERROR(FormatError, data)
LMOMENT_DEFINE_ERROR(BoundViolation, data)
LMOMENT_DEFINE_ERROR(GapError, data)
LMOMENT_DEFINE_ERROR(InsufficientData, data)

LMOMENT_DEFINE_ERROR(QuadratureFailure, numerical)
LMOMENT_DEFINE_ERROR(NonConvergence, numerical)

#undef LMOMENT_DEFINE_ERROR

}  // namespace lmoment
