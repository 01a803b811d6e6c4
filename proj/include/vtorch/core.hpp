#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace vtorch {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;

// Error taxonomy. Everything the library throws derives from Error, so the
// CLI can map failures to exit codes in one place.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Requested rectangle is not an integer multiple of the element size.
struct NonConformingSize : Error { using Error::Error; };
// A boundary predicate matched no node (misconfigured benchmark).
struct EmptySelection : Error { using Error::Error; };
// Assembled matrix violates the symmetry invariant (tangent derivation bug).
struct AsymmetricMatrix : Error { using Error::Error; };
// Factorization broke down or the residual target is unreachable.
struct SingularMatrix : Error { using Error::Error; };
// Newton failed to converge within the iteration budget (triggers dt halving).
struct NoConvergence : Error { using Error::Error; };
// Time step shrank below dt_min while retrying a failed step.
struct StepCollapse : Error { using Error::Error; };
// Config text could not be parsed (reported with line number).
struct ParseError : Error { using Error::Error; };
// Config parsed but a value is out of range (reported with key name).
struct ValidationError : Error { using Error::Error; };
// Filesystem failure (reported with path).
struct IoError : Error { using Error::Error; };
// preset() called with an unrecognized benchmark name.
struct UnknownPreset : Error { using Error::Error; };

}  // namespace vtorch
