#pragma once

#include "altmin/linalg.hpp"
#include "altmin/rng.hpp"

#include <cstddef>
#include <variant>
#include <vector>

namespace altmin {

/// A bijection on {0, ..., n-1}. Row i of P*A is row map[i] of A.
class Permutation {
 public:
  Permutation() = default;
  /// Throws Error{InvalidConfig} if `map` is not a bijection.
  explicit Permutation(std::vector<std::size_t> map);

  static Permutation identity(std::size_t n);

  std::size_t size() const { return map_.size(); }
  const std::vector<std::size_t>& map() const { return map_; }
  std::size_t operator[](std::size_t i) const { return map_[i]; }

  Permutation inverse() const;

  friend bool operator==(const Permutation&, const Permutation&) = default;

 private:
  std::vector<std::size_t> map_;
};

/// The permutation r with apply(r, A) == apply(p, apply(q, A)).
Permutation compose(const Permutation& p, const Permutation& q);

Matrix apply(const Permutation& p, const Matrix& A);
/// apply(p.inverse(), A) without materializing the inverse; P^T A.
Matrix apply_transpose(const Permutation& p, const Matrix& A);

/// Contiguous row blocks of positive sizes.
class BlockPartition {
 public:
  BlockPartition() = default;
  /// Throws Error{InvalidConfig} on an empty list or a zero size.
  explicit BlockPartition(std::vector<std::size_t> sizes);

  /// Blocks of `r` rows; the last block takes the remainder when r does not divide n.
  static BlockPartition equal(std::size_t n, std::size_t r);
  /// `s` blocks whose sizes differ by at most one.
  static BlockPartition balanced(std::size_t n, std::size_t s);

  std::size_t count() const { return sizes_.size(); }
  std::size_t total() const { return offsets_.empty() ? 0 : offsets_.back(); }
  std::size_t size(std::size_t b) const { return sizes_[b]; }
  std::size_t offset(std::size_t b) const { return offsets_[b]; }
  std::size_t max_size() const;
  const std::vector<std::size_t>& sizes() const { return sizes_; }
  /// Block index holding `row`.
  std::size_t block_of(std::size_t row) const;

  friend bool operator==(const BlockPartition& a, const BlockPartition& b) {
    return a.sizes_ == b.sizes_;
  }

 private:
  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> offsets_;  // count() + 1 entries
};

struct RLocalModel {
  BlockPartition partition;
};

struct KSparseModel {
  std::size_t k = 0;
};

using PermutationModel = std::variant<RLocalModel, KSparseModel>;

/// Uniform over block-diagonal permutations of `partition`.
Permutation sample_rlocal(const BlockPartition& partition, Rng& rng);

/// Uniform over permutations with exactly k displaced rows.
/// Throws Error{InvalidK} for k == 1 or k > n.
Permutation sample_ksparse(std::size_t n, std::size_t k, Rng& rng);

Permutation sample(const PermutationModel& model, std::size_t n, Rng& rng);

std::size_t hamming_distortion(const Permutation& p, const Permutation& q);

/// n minus the number of fixed points.
std::size_t offdiagonal_count(const Permutation& p);

bool is_block_diagonal(const Permutation& p, const BlockPartition& partition);

}  // namespace altmin
