#include "altmin/collapse.hpp"

#include "altmin/error.hpp"

#include <string>

namespace altmin {

namespace {

Matrix block_sums(const Matrix& A, const BlockPartition& partition) {
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(partition.count()), A.cols());
  for (std::size_t b = 0; b < partition.count(); ++b) {
    const auto off = static_cast<Eigen::Index>(partition.offset(b));
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(partition.size(b)); ++i) {
      out.row(static_cast<Eigen::Index>(b)) += A.row(off + i);
    }
  }
  return out;
}

}  // namespace

CollapsedSystem build_collapsed(const Matrix& B, const Matrix& Y, const BlockPartition& partition) {
  const auto n = static_cast<Eigen::Index>(partition.total());
  if (B.rows() != n || Y.rows() != n) {
    throw Error(ErrorCode::ShapeMismatch,
                "build_collapsed: B has " + std::to_string(B.rows()) + " rows, Y has " +
                    std::to_string(Y.rows()) + ", partition covers " + std::to_string(n));
  }
  return {block_sums(B, partition), block_sums(Y, partition), partition};
}

Matrix init_rlocal(const CollapsedSystem& sys) { return pinv_solve(sys.B_tilde, sys.Y_tilde); }

KSparseInit init_ksparse(const Matrix& Y) {
  return {Permutation::identity(static_cast<std::size_t>(Y.rows())), Y};
}

}  // namespace altmin
