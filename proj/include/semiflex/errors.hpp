#pragma once

#include <stdexcept>
#include <string>

namespace semiflex {

// Base class so the CLI can map the whole family onto one exit code.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Grid construction produced no unknowns (R_h empty).
struct EmptyInterior : Error {
    using Error::Error;
};

// char_poly found a stencil whose Fourier symbol has an imaginary part.
struct NonSymmetricStencil : Error {
    using Error::Error;
};

// Sparse factorization failed; the assembled matrix is not SPD.
struct FactorizationFailure : Error {
    using Error::Error;
};

// Bridge-coefficient denominator r(k) vanished (gamma at an edge).
struct DegenerateDenominator : Error {
    using Error::Error;
};

// Conditioning block D of a Schur complement is not positive definite.
struct SingularConditioning : Error {
    using Error::Error;
};

// Rate report asked for on a ladder with too few mesh points.
struct InsufficientLadder : Error {
    using Error::Error;
};

// Weyl fit lacks the required number of trusted eigenvalues.
struct InsufficientTrustedWindow : Error {
    using Error::Error;
};

// Iterative eigensolver exhausted its budget before convergence.
struct NoConvergence : Error {
    using Error::Error;
};

// Interpolation evaluated outside the closed domain.
struct OutOfDomain : Error {
    using Error::Error;
};

// File could not be opened or written.
struct IOFailure : Error {
    using Error::Error;
};

} // namespace semiflex
