#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>

namespace altmin {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Thin singular value decomposition A = U * diag(S) * V^T.
///
/// `S` is nonincreasing and nonnegative. `rank_tol` is the threshold below
/// which a singular value is treated as zero:
/// max(rows, cols) * machine epsilon * S[0].
struct SvdFactors {
  Matrix U;
  Vector S;
  Matrix V;
  double rank_tol = 0.0;

  std::size_t rank() const;
};

/// Throws Error{NonFinite} when any entry is NaN or infinite.
void require_finite(const Matrix& A, const char* what);

SvdFactors svd(const Matrix& A);

/// Moore-Penrose pseudoinverse, truncated at `rank_tol` (defaults to the
/// SvdFactors tolerance).
Matrix pseudoinverse(const Matrix& A, std::optional<double> rank_tol = std::nullopt);

/// A^+ Y: the minimum-norm least-squares solution of A X = Y.
Matrix pinv_solve(const Matrix& A, const Matrix& Y,
                  std::optional<double> rank_tol = std::nullopt);

/// Orthogonal projector V V^T onto the row space of A (cols x cols).
Matrix row_space_projector(const Matrix& A);

struct SingularExtremes {
  double sigma_min = 0.0;
  double sigma_max = 0.0;
};

/// sigma_min is the min(rows, cols)-th singular value.
SingularExtremes extreme_singular_values(const Matrix& A);

}  // namespace altmin
