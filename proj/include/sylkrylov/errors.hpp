#pragma once

#include <stdexcept>
#include <string>

namespace sylkrylov {

/// Incompatible matrix shapes passed to an operation.
class DimensionError : public std::invalid_argument {
public:
    explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

/// A structural invariant of a matrix argument does not hold
/// (e.g. a CSR index out of range, a nonsymmetric operator where
/// a symmetric one is required).
class InvalidMatrixError : public std::invalid_argument {
public:
    explicit InvalidMatrixError(const std::string& what) : std::invalid_argument(what) {}
};

/// The starting block of a Krylov basis is numerically rank deficient.
class RankDeficientStartError : public std::runtime_error {
public:
    explicit RankDeficientStartError(const std::string& what) : std::runtime_error(what) {}
};

/// A Krylov process produced a rank-deficient block that is not a clean
/// invariant-subspace exhaustion. `invariant_subspace` distinguishes the
/// exhaustion case for callers that can continue without growing the basis.
class BreakdownError : public std::runtime_error {
public:
    explicit BreakdownError(const std::string& what, bool invariant_subspace = false)
        : std::runtime_error(what), invariant_subspace_(invariant_subspace) {}
    bool invariant_subspace() const { return invariant_subspace_; }

private:
    bool invariant_subspace_;
};

/// The Kronecker-sum operator is singular (A and -B share an eigenvalue).
class SingularOperatorError : public std::runtime_error {
public:
    explicit SingularOperatorError(const std::string& what) : std::runtime_error(what) {}
};

/// File could not be opened, read, or written.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// File contents violate the expected format.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sylkrylov
