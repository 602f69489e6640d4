#pragma once

#include "altmin/linalg.hpp"
#include "altmin/permutation.hpp"

#include <optional>
#include <vector>

namespace altmin {

struct GroundTruth {
  Permutation P_star;
  Matrix X_star;
};

/// Y = P* B X* + W.
struct ProblemInstance {
  Matrix B;  // n x d
  Matrix Y;  // n x m, observed (permuted) measurements
  std::optional<GroundTruth> truth;
  double sigma = 0.0;
  std::optional<BlockPartition> partition;
  /// Unpermuted targets, when known (real-data ingestion keeps them).
  std::optional<Matrix> Y_star;
  /// row_order[i] is the original file row of row i, after block sorting.
  std::vector<std::size_t> row_order;

  std::size_t n() const { return static_cast<std::size_t>(B.rows()); }
  std::size_t d() const { return static_cast<std::size_t>(B.cols()); }
  std::size_t m() const { return static_cast<std::size_t>(Y.cols()); }
};

/// Throws Error{ShapeMismatch} / Error{NonFinite} / Error{InvalidConfig}.
void validate(const ProblemInstance& instance);

}  // namespace altmin
