#pragma once

#include "altmin/linalg.hpp"
#include "altmin/permutation.hpp"

namespace altmin {

/// Per-block row sums of B and Y. Summing inside a block discards the
/// unknown within-block order, so each block yields one labelled equation
/// B_tilde.row(b) * X = Y_tilde.row(b).
struct CollapsedSystem {
  Matrix B_tilde;  // s x d
  Matrix Y_tilde;  // s x m
  BlockPartition partition;
};

/// Rows inside each block are added in ascending index order.
CollapsedSystem build_collapsed(const Matrix& B, const Matrix& Y, const BlockPartition& partition);

/// Minimum-norm solution B_tilde^+ Y_tilde. Equals X* for a noiseless
/// instance once B_tilde has full column rank; otherwise it is the projection
/// of X* onto the row space of B_tilde.
Matrix init_rlocal(const CollapsedSystem& sys);

struct KSparseInit {
  Permutation P0;
  Matrix Yhat0;
};

/// Identity start: P0 = I and Yhat0 = Y.
KSparseInit init_ksparse(const Matrix& Y);

}  // namespace altmin
