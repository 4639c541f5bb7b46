#pragma once

#include <stdexcept>
#include <string>

namespace nccs {

/// Shapes, dimensions or algebras of operands do not match.
class StructuralError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A documented precondition of an operation was violated
/// (non-flat input, non-unitary gauge, insufficient quadrature, ...).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A configurable resource cap (Fourier support, crossed-product support)
/// was exceeded.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A logarithm was requested for a unitary with an eigenvalue on the
/// branch cut.
class BranchError : public ContractError {
 public:
  using ContractError::ContractError;
};

/// A free-product word grew past the configured length cap.
class TruncationError : public ResourceError {
 public:
  using ResourceError::ResourceError;
};

/// Operation is outside the supported computational model.
class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace nccs
