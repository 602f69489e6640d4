#include "altmin/permutation.hpp"

#include "altmin/error.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace altmin {

Permutation::Permutation(std::vector<std::size_t> map) : map_(std::move(map)) {
  std::vector<bool> seen(map_.size(), false);
  for (std::size_t v : map_) {
    if (v >= map_.size() || seen[v]) {
      throw Error(ErrorCode::InvalidConfig,
                  "index list of length " + std::to_string(map_.size()) + " is not a bijection");
    }
    seen[v] = true;
  }
}

Permutation Permutation::identity(std::size_t n) {
  std::vector<std::size_t> m(n);
  std::iota(m.begin(), m.end(), std::size_t{0});
  return Permutation(std::move(m));
}

Permutation Permutation::inverse() const {
  std::vector<std::size_t> inv(map_.size());
  for (std::size_t i = 0; i < map_.size(); ++i) inv[map_[i]] = i;
  return Permutation(std::move(inv));
}

Permutation compose(const Permutation& p, const Permutation& q) {
  if (p.size() != q.size()) {
    throw Error(ErrorCode::ShapeMismatch, "compose: sizes " + std::to_string(p.size()) +
                                              " and " + std::to_string(q.size()));
  }
  std::vector<std::size_t> r(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) r[i] = q[p[i]];
  return Permutation(std::move(r));
}

namespace {

void check_rows(const Permutation& p, const Matrix& A, const char* op) {
  if (static_cast<Eigen::Index>(p.size()) != A.rows()) {
    throw Error(ErrorCode::ShapeMismatch, std::string(op) + ": permutation of size " +
                                              std::to_string(p.size()) + " applied to " +
                                              std::to_string(A.rows()) + " rows");
  }
}

}  // namespace

Matrix apply(const Permutation& p, const Matrix& A) {
  check_rows(p, A, "apply");
  Matrix out(A.rows(), A.cols());
  for (std::size_t i = 0; i < p.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = A.row(static_cast<Eigen::Index>(p[i]));
  }
  return out;
}

Matrix apply_transpose(const Permutation& p, const Matrix& A) {
  check_rows(p, A, "apply_transpose");
  Matrix out(A.rows(), A.cols());
  for (std::size_t i = 0; i < p.size(); ++i) {
    out.row(static_cast<Eigen::Index>(p[i])) = A.row(static_cast<Eigen::Index>(i));
  }
  return out;
}

BlockPartition::BlockPartition(std::vector<std::size_t> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.empty()) throw Error(ErrorCode::InvalidConfig, "partition has no blocks");
  offsets_.reserve(sizes_.size() + 1);
  offsets_.push_back(0);
  for (std::size_t s : sizes_) {
    if (s == 0) throw Error(ErrorCode::InvalidConfig, "partition block of size 0");
    offsets_.push_back(offsets_.back() + s);
  }
}

BlockPartition BlockPartition::equal(std::size_t n, std::size_t r) {
  if (n == 0 || r == 0) {
    throw Error(ErrorCode::InvalidConfig, "equal partition needs n >= 1 and r >= 1");
  }
  std::vector<std::size_t> sizes(n / r, r);
  if (n % r != 0) sizes.push_back(n % r);
  return BlockPartition(std::move(sizes));
}

BlockPartition BlockPartition::balanced(std::size_t n, std::size_t s) {
  if (s == 0 || s > n) {
    throw Error(ErrorCode::InvalidConfig,
                "balanced partition needs 1 <= s <= n, got s=" + std::to_string(s) +
                    " n=" + std::to_string(n));
  }
  std::vector<std::size_t> sizes(s, n / s);
  for (std::size_t b = 0; b < n % s; ++b) ++sizes[b];
  return BlockPartition(std::move(sizes));
}

std::size_t BlockPartition::max_size() const {
  return sizes_.empty() ? 0 : *std::max_element(sizes_.begin(), sizes_.end());
}

std::size_t BlockPartition::block_of(std::size_t row) const {
  auto it = std::upper_bound(offsets_.begin(), offsets_.end(), row);
  return static_cast<std::size_t>(it - offsets_.begin()) - 1;
}

Permutation sample_rlocal(const BlockPartition& partition, Rng& rng) {
  std::vector<std::size_t> map(partition.total());
  std::iota(map.begin(), map.end(), std::size_t{0});
  for (std::size_t b = 0; b < partition.count(); ++b) {
    auto first = map.begin() + static_cast<std::ptrdiff_t>(partition.offset(b));
    std::shuffle(first, first + static_cast<std::ptrdiff_t>(partition.size(b)), rng.engine());
  }
  return Permutation(std::move(map));
}

Permutation sample_ksparse(std::size_t n, std::size_t k, Rng& rng) {
  if (k == 1 || k > n) {
    throw Error(ErrorCode::InvalidK, "k-sparse permutation needs k in {0, 2, ..., n}; got k=" +
                                         std::to_string(k) + " with n=" + std::to_string(n));
  }
  std::vector<std::size_t> map(n);
  std::iota(map.begin(), map.end(), std::size_t{0});
  if (k == 0) return Permutation(std::move(map));

  // Uniform k-subset via partial Fisher-Yates, then sorted for a stable layout.
  std::vector<std::size_t> pool = map;
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t j = i + rng.index(n - i);
    std::swap(pool[i], pool[j]);
  }
  std::vector<std::size_t> support(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(support.begin(), support.end());

  // Uniform derangement of the support by rejection; acceptance rate tends to 1/e.
  std::vector<std::size_t> sigma(k);
  auto has_fixed_point = [&] {
    for (std::size_t i = 0; i < k; ++i)
      if (sigma[i] == i) return true;
    return false;
  };
  do {
    std::iota(sigma.begin(), sigma.end(), std::size_t{0});
    std::shuffle(sigma.begin(), sigma.end(), rng.engine());
  } while (has_fixed_point());

  for (std::size_t i = 0; i < k; ++i) map[support[i]] = support[sigma[i]];
  return Permutation(std::move(map));
}

Permutation sample(const PermutationModel& model, std::size_t n, Rng& rng) {
  if (const auto* rl = std::get_if<RLocalModel>(&model)) {
    if (rl->partition.total() != n) {
      throw Error(ErrorCode::InvalidConfig, "partition covers " +
                                                std::to_string(rl->partition.total()) +
                                                " rows, instance has " + std::to_string(n));
    }
    return sample_rlocal(rl->partition, rng);
  }
  return sample_ksparse(n, std::get<KSparseModel>(model).k, rng);
}

std::size_t hamming_distortion(const Permutation& p, const Permutation& q) {
  if (p.size() != q.size()) {
    throw Error(ErrorCode::ShapeMismatch, "hamming_distortion: sizes " +
                                              std::to_string(p.size()) + " and " +
                                              std::to_string(q.size()));
  }
  std::size_t d = 0;
  for (std::size_t i = 0; i < p.size(); ++i) d += p[i] != q[i] ? 1 : 0;
  return d;
}

std::size_t offdiagonal_count(const Permutation& p) {
  std::size_t moved = 0;
  for (std::size_t i = 0; i < p.size(); ++i) moved += p[i] != i ? 1 : 0;
  return moved;
}

bool is_block_diagonal(const Permutation& p, const BlockPartition& partition) {
  if (p.size() != partition.total()) return false;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (partition.block_of(i) != partition.block_of(p[i])) return false;
  }
  return true;
}

}  // namespace altmin
