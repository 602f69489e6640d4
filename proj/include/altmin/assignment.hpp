#pragma once

#include "altmin/linalg.hpp"
#include "altmin/permutation.hpp"

#include <span>

namespace altmin {

struct Assignment {
  Permutation permutation;
  double value = 0.0;  // sum_i C(i, permutation[i])
};

/// Maximizes sum_i C(i, p[i]) over all permutations p of a square reward.
///
/// Shortest augmenting paths with dual potentials (Jonker-Volgenant style
/// augmentation), O(n^3) worst case. Among several optima the one returned
/// is fixed by the row scan order, so repeated calls agree.
Assignment solve_lap(const Matrix& reward);

/// Solves each diagonal block independently and stitches the answers into
/// one block-diagonal permutation. `blocks[b]` must be size(b) x size(b).
Permutation solve_blockwise(std::span<const Matrix> blocks, const BlockPartition& partition);

}  // namespace altmin
