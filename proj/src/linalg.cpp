#include "altmin/linalg.hpp"

#include "altmin/error.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace altmin {

namespace {

std::string dims(const Matrix& A) {
  return std::to_string(A.rows()) + "x" + std::to_string(A.cols());
}

}  // namespace

std::size_t SvdFactors::rank() const {
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < S.size(); ++i) {
    if (S[i] > rank_tol) ++r;
  }
  return r;
}

void require_finite(const Matrix& A, const char* what) {
  if (!A.allFinite()) {
    throw Error(ErrorCode::NonFinite, std::string(what) + " (" + dims(A) + ") contains NaN or Inf");
  }
}

SvdFactors svd(const Matrix& A) {
  require_finite(A, "svd input");
  if (A.rows() == 0 || A.cols() == 0) {
    throw Error(ErrorCode::ShapeMismatch, "svd of empty matrix " + dims(A));
  }
  Eigen::BDCSVD<Matrix> dec(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (dec.info() != Eigen::Success) {
    throw Error(ErrorCode::NoConvergence, "svd failed for " + dims(A) + " matrix");
  }
  SvdFactors f;
  f.U = dec.matrixU();
  f.S = dec.singularValues();
  f.V = dec.matrixV();
  const double largest = f.S.size() > 0 ? f.S[0] : 0.0;
  f.rank_tol = static_cast<double>(std::max(A.rows(), A.cols())) *
               std::numeric_limits<double>::epsilon() * largest;
  return f;
}

Matrix pseudoinverse(const Matrix& A, std::optional<double> rank_tol) {
  const SvdFactors f = svd(A);
  const double tol = rank_tol.value_or(f.rank_tol);
  Vector inv_s = Vector::Zero(f.S.size());
  for (Eigen::Index i = 0; i < f.S.size(); ++i) {
    if (f.S[i] > tol) inv_s[i] = 1.0 / f.S[i];
  }
  return f.V * inv_s.asDiagonal() * f.U.transpose();
}

Matrix pinv_solve(const Matrix& A, const Matrix& Y, std::optional<double> rank_tol) {
  if (A.rows() != Y.rows()) {
    throw Error(ErrorCode::ShapeMismatch,
                "pinv_solve: A is " + dims(A) + " but Y is " + dims(Y));
  }
  require_finite(Y, "pinv_solve rhs");
  const SvdFactors f = svd(A);
  const double tol = rank_tol.value_or(f.rank_tol);
  Matrix UtY = f.U.transpose() * Y;
  for (Eigen::Index i = 0; i < f.S.size(); ++i) {
    UtY.row(i) *= f.S[i] > tol ? 1.0 / f.S[i] : 0.0;
  }
  return f.V * UtY;
}

Matrix row_space_projector(const Matrix& A) {
  const SvdFactors f = svd(A);
  const auto r = static_cast<Eigen::Index>(f.rank());
  const Matrix Vr = f.V.leftCols(r);
  return Vr * Vr.transpose();
}

SingularExtremes extreme_singular_values(const Matrix& A) {
  const SvdFactors f = svd(A);
  return {f.S[f.S.size() - 1], f.S[0]};
}

}  // namespace altmin
