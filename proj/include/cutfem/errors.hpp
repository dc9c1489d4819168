#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace cutfem {

/// Failure categories surfaced by the library. Each maps to one of the
/// contract error cases of the operations that can raise it.
enum class ErrorCode {
  diverged_projection,
  degenerate_gradient,
  surface_outside_mesh,
  contract_violation,
  unsupported_degree,
  degenerate_geometry,
  solver_not_converged,
  matrix_not_psd,
  zero_matrix,
  kernel_mismatch,
  invalid_config,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

/// Raised when the closest-point iteration fails; carries the last iterate.
class DivergedProjection : public Error {
 public:
  DivergedProjection(const Eigen::Vector3d& last, const std::string& message)
      : Error(ErrorCode::diverged_projection, message), last_iterate_(last) {}

  const Eigen::Vector3d& last_iterate() const { return last_iterate_; }

 private:
  Eigen::Vector3d last_iterate_;
};

}  // namespace cutfem
