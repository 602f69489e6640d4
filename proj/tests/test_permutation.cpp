#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "altmin/error.hpp"
#include "altmin/permutation.hpp"
#include "oracles.hpp"

#include <map>

using namespace altmin;

namespace {

Permutation random_perm(std::size_t n, Rng& rng) { return sample_rlocal(BlockPartition({n}), rng); }

}  // namespace

TEST_CASE("construction rejects non-bijections") {
  CHECK_THROWS_AS(Permutation({0, 0, 1}), Error);
  CHECK_THROWS_AS(Permutation({0, 3, 1}), Error);
  CHECK_NOTHROW(Permutation({2, 0, 1}));
}

TEST_CASE("apply moves rows") {
  Matrix A(2, 1);
  A << 1, 2;
  CHECK(apply(Permutation::identity(2), A) == A);
  const Matrix swapped = apply(Permutation({1, 0}), A);
  CHECK(swapped(0, 0) == 2);
  CHECK(swapped(1, 0) == 1);
  CHECK_THROWS_AS(apply(Permutation::identity(3), A), Error);
}

TEST_CASE("apply inverse round trip and composition") {
  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const Permutation p = random_perm(9, rng), q = random_perm(9, rng);
    const Matrix A = gaussian_matrix(9, 3, rng);
    CHECK(apply(p, apply(p.inverse(), A)) == A);
    CHECK(apply_transpose(p, A) == apply(p.inverse(), A));
    CHECK(apply(p, apply(q, A)) == apply(compose(p, q), A));
  }
}

TEST_CASE("block partitions") {
  CHECK_THROWS_AS(BlockPartition(std::vector<std::size_t>{}), Error);
  CHECK_THROWS_AS(BlockPartition({2, 0}), Error);
  const BlockPartition eq = BlockPartition::equal(10, 4);
  CHECK(eq.sizes() == std::vector<std::size_t>{4, 4, 2});
  CHECK(eq.total() == 10);
  CHECK(eq.block_of(0) == 0);
  CHECK(eq.block_of(4) == 1);
  CHECK(eq.block_of(9) == 2);
  CHECK(BlockPartition::balanced(10, 3).sizes() == std::vector<std::size_t>{4, 3, 3});
  CHECK(eq.max_size() == 4);
}

TEST_CASE("sample_rlocal stays inside blocks") {
  Rng rng(2);
  const BlockPartition singles = BlockPartition::equal(7, 1);
  CHECK(sample_rlocal(singles, rng) == Permutation::identity(7));
  const BlockPartition mixed({3, 1, 5, 2});
  for (int trial = 0; trial < 200; ++trial) {
    CHECK(is_block_diagonal(sample_rlocal(mixed, rng), mixed));
  }
}

TEST_CASE("sample_rlocal is uniform over Pi_2 x Pi_2") {
  const BlockPartition part({2, 2});
  std::map<std::vector<std::size_t>, int> counts;
  constexpr int seeds = 4000;
  for (int s = 0; s < seeds; ++s) {
    Rng rng(static_cast<std::uint64_t>(s));
    counts[sample_rlocal(part, rng).map()]++;
  }
  CHECK(counts.size() == 4);
  for (const auto& [perm, c] : counts) CHECK(std::abs(double(c) / seeds - 0.25) <= 0.03);
}

TEST_CASE("sample_rlocal with one block covers all of Pi_n") {
  std::map<std::vector<std::size_t>, int> counts;
  for (int s = 0; s < 3000; ++s) {
    Rng rng(static_cast<std::uint64_t>(s));
    counts[sample_rlocal(BlockPartition({3}), rng).map()]++;
  }
  CHECK(counts.size() == 6);
}

TEST_CASE("sample_ksparse edge cases") {
  Rng rng(3);
  CHECK(sample_ksparse(5, 0, rng) == Permutation::identity(5));
  CHECK(sample_ksparse(2, 2, rng) == Permutation({1, 0}));
  for (std::size_t bad : {std::size_t{1}, std::size_t{6}}) {
    try {
      sample_ksparse(5, bad, rng);
      FAIL("expected InvalidK");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InvalidK);
    }
  }
}

TEST_CASE("sample_ksparse is uniform over the eight 3-sparse permutations of 4") {
  // Enumerate the admissible set independently: permutations of 4 with exactly one fixed point.
  std::map<std::vector<std::size_t>, int> counts;
  for (const auto& p : oracle::all_permutations(4)) {
    int fixed = 0;
    for (std::size_t i = 0; i < 4; ++i) fixed += p[i] == i;
    if (fixed == 1) counts[p] = 0;
  }
  REQUIRE(counts.size() == 8);
  constexpr int seeds = 9000;
  for (int s = 0; s < seeds; ++s) {
    Rng rng(static_cast<std::uint64_t>(s));
    auto it = counts.find(sample_ksparse(4, 3, rng).map());
    REQUIRE(it != counts.end());
    it->second++;
  }
  for (const auto& [perm, c] : counts) CHECK(std::abs(double(c) / seeds - 0.125) <= 0.02);
}

TEST_CASE("sample_ksparse displaces exactly k rows") {
  for (std::size_t n = 2; n <= 12; ++n) {
    for (std::size_t k : {std::size_t{0}, std::size_t{2}, std::size_t{3}, n}) {
      if (k > n) continue;
      for (std::uint64_t s = 0; s < 30; ++s) {
        Rng rng(s * 131 + n);
        const Permutation p = sample_ksparse(n, k, rng);
        CHECK(offdiagonal_count(p) == k);
        CHECK(hamming_distortion(Permutation::identity(n), p) == k);
      }
    }
  }
}

TEST_CASE("hamming distortion") {
  const Permutation id = Permutation::identity(5);
  CHECK(hamming_distortion(id, id) == 0);
  CHECK(hamming_distortion(id, Permutation({0, 2, 1, 4, 3})) == 4);
  CHECK_THROWS_AS(hamming_distortion(id, Permutation::identity(4)), Error);
  CHECK(offdiagonal_count(Permutation({3, 2, 1, 0})) == 4);
  CHECK(offdiagonal_count(id) == 0);

  Rng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const Permutation p = random_perm(8, rng), q = random_perm(8, rng), r = random_perm(8, rng);
    CHECK(offdiagonal_count(p) == hamming_distortion(Permutation::identity(8), p));
    CHECK(hamming_distortion(p, q) != 1);
    CHECK(hamming_distortion(p, q) == hamming_distortion(q, p));
    CHECK(hamming_distortion(p, r) <= hamming_distortion(p, q) + hamming_distortion(q, r));
  }
}

TEST_CASE("rng substreams are deterministic") {
  Rng a(42), b(42);
  CHECK(a.split(3).normal() == b.split(3).normal());
  a.normal();  // advancing the parent does not change its substreams
  CHECK(a.split(3).normal() == b.split(3).normal());
  CHECK(a.split(3).normal() != a.split(4).normal());
}
