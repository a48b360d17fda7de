#ifndef FRAMEOPT_ERROR_HPP
#define FRAMEOPT_ERROR_HPP

#include <stdexcept>
#include <string>

namespace frameopt {

// Common base so callers can catch everything thrown by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid argument to a math primitive (logit outside (0,1), tau <= 0, ...).
struct DomainError : Error {
    using Error::Error;
};

// Malformed configuration, problem document or CLI input.
struct ConfigError : Error {
    using Error::Error;
};

// Structurally inconsistent model (bad references, non-contiguous ids, ...).
struct ModelError : Error {
    using Error::Error;
};

// Singular stiffness: the model admits a rigid-body or internal mechanism.
struct MechanismError : Error {
    using Error::Error;
};

// Numerical failure (residual check, eigeniteration, repeated eigenvalue).
struct NumericalError : Error {
    using Error::Error;
};

// Filesystem / serialization failure.
struct IoError : Error {
    using Error::Error;
};

} // namespace frameopt

#endif
