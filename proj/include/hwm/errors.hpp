#pragma once

#include <stdexcept>

namespace hwm {

/// Base type for every failure reported by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// matrix_to_spin received a matrix whose trace exceeds tolerance.
struct NonTraceless : Error { using Error::Error; };

/// A spin expected to satisfy s.s = 0 does not.
struct NotNull : Error { using Error::Error; };

/// Two poles, or a pole and a reflected pole, coincide to working precision.
struct DegeneratePoles : Error { using Error::Error; };

/// B_j A_j is not a scalar multiple of A_j, so no velocity can be extracted.
struct NotProportional : Error { using Error::Error; };

/// The shifted pole matrix X(0) + t L(0) - x I is numerically singular.
struct ResolventSingular : Error { using Error::Error; };

/// A reconstructed field value has imaginary parts above tolerance.
struct NonRealField : Error { using Error::Error; };

/// Eigenbasis too ill-conditioned to extract residues (pole collision).
struct DefectiveMatrix : Error { using Error::Error; };

/// Poles approached each other during time integration.
struct PoleCollision : Error { using Error::Error; };

/// A pole approached the real axis during time integration.
struct BoundaryApproach : Error { using Error::Error; };

/// A datum file does not match the expected schema.
struct SchemaError : Error { using Error::Error; };

/// Default relative tolerance for algebraic predicates (traceless, null, ...).
inline constexpr double kDefaultTol = 1e-10;

}  // namespace hwm
