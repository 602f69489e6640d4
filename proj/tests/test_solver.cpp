#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "altmin/data.hpp"
#include "altmin/error.hpp"
#include "altmin/solver.hpp"
#include "oracles.hpp"

#include <vector>

using namespace altmin;

namespace {

ProblemInstance tiny_instance(std::uint64_t seed, PermutationModel model, double sigma = 0.0) {
  SynthConfig c;
  c.n = 6;
  c.d = 3;
  c.m = 2;
  c.model = std::move(model);
  c.sigma = sigma;
  c.seed = seed;
  return generate(c);
}

}  // namespace

TEST_CASE("objective matches the explicit triple loop") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix B = gaussian_matrix(7, 3, rng), Y = gaussian_matrix(7, 2, rng);
    const Matrix X = gaussian_matrix(3, 2, rng);
    const Permutation p = sample_ksparse(7, 7, rng);
    CHECK(objective(B, Y, p, X) == doctest::Approx(oracle::naive_objective(B, Y, p, X)).epsilon(1e-12));
  }
}

TEST_CASE("objective at X = 0 is ||Y||^2 and at the truth is zero") {
  const ProblemInstance inst = tiny_instance(4, KSparseModel{4});
  CHECK(objective(inst.B, inst.Y, inst.truth->P_star, Matrix::Zero(3, 2)) ==
        doctest::Approx(inst.Y.squaredNorm()));
  CHECK(objective(inst.B, inst.Y, inst.truth->P_star, inst.truth->X_star) <
        1e-20 * inst.Y.squaredNorm());
}

TEST_CASE("permutation update on a perfect prediction keeps the identity optimal") {
  Rng rng(5);
  const SolverConfig cfg;
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix Y = gaussian_matrix(6, 2, rng);
    const Permutation p = permutation_update_from_prediction(Y, Y, cfg);
    const Matrix C = Y * Y.transpose();
    CHECK(oracle::assignment_value(C, p) == doctest::Approx(oracle::brute_force_lap(C)));
    CHECK(oracle::assignment_value(C, p) ==
          doctest::Approx(oracle::assignment_value(C, Permutation::identity(6))));
  }
}

TEST_CASE("a single-block partition gives the full assignment") {
  Rng rng(6);
  SolverConfig ks;
  SolverConfig rl;
  rl.mode = Mode::RLocal;
  rl.partition = BlockPartition({8});
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix Y = gaussian_matrix(8, 3, rng), Yhat = gaussian_matrix(8, 3, rng);
    CHECK(permutation_update_from_prediction(Y, Yhat, ks) ==
          permutation_update_from_prediction(Y, Yhat, rl));
  }
}

TEST_CASE("permutation update never increases F for fixed X") {
  Rng rng(7);
  SolverConfig ks;
  SolverConfig rl;
  rl.mode = Mode::RLocal;
  rl.partition = BlockPartition({3, 3});
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix B = gaussian_matrix(6, 3, rng), Y = gaussian_matrix(6, 2, rng);
    const Matrix X = gaussian_matrix(3, 2, rng);
    const Permutation old_any = sample_ksparse(6, 6, rng);
    const Permutation old_local = sample_rlocal(*rl.partition, rng);
    CHECK(objective(B, Y, permutation_update(B, Y, X, ks), X) <=
          objective(B, Y, old_any, X) + 1e-12);
    const Permutation p = permutation_update(B, Y, X, rl);
    CHECK(is_block_diagonal(p, *rl.partition));
    CHECK(objective(B, Y, p, X) <= objective(B, Y, old_local, X) + 1e-12);
  }
}

TEST_CASE("permutation update minimizes F over the admissible set") {
  Rng rng(8);
  const SolverConfig cfg;
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix B = gaussian_matrix(6, 3, rng), Y = gaussian_matrix(6, 2, rng);
    const Matrix X = gaussian_matrix(3, 2, rng);
    const double got = objective(B, Y, permutation_update(B, Y, X, cfg), X);
    double best = 1e300;
    for (const auto& map : oracle::all_permutations(6))
      best = std::min(best, objective(B, Y, Permutation(map), X));
    CHECK(got == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("signal update recovers X exactly without noise") {
  const ProblemInstance inst = tiny_instance(9, KSparseModel{6});
  const Matrix X = signal_update(inst.B, inst.Y, inst.truth->P_star);
  CHECK((X - inst.truth->X_star).norm() <= 1e-10 * inst.truth->X_star.norm());
}

TEST_CASE("signal update with B = I returns the unpermuted measurements") {
  Rng rng(10);
  const Matrix Y = gaussian_matrix(5, 2, rng);
  const Permutation p = sample_ksparse(5, 5, rng);
  CHECK((signal_update(Matrix::Identity(5, 5), Y, p) - apply_transpose(p, Y)).norm() < 1e-12);
}

TEST_CASE("signal update is the least-squares optimum") {
  Rng rng(11);
  const Matrix B = gaussian_matrix(9, 3, rng), Y = gaussian_matrix(9, 2, rng);
  const Permutation p = sample_ksparse(9, 9, rng);
  const Matrix X = signal_update(B, Y, p);
  const double f = objective(B, Y, p, X);
  CHECK(f == doctest::Approx(oracle::ls_residual(B, apply_transpose(p, Y))).epsilon(1e-10));
  for (int trial = 0; trial < 100; ++trial)
    CHECK(f <= objective(B, Y, p, X + 0.1 * gaussian_matrix(3, 2, rng)) + 1e-12);
}

TEST_CASE("signal update equals the pseudoinverse of the permuted design") {
  Rng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix B = gaussian_matrix(8, 3, rng), Y = gaussian_matrix(8, 2, rng);
    const Permutation p = sample_ksparse(8, 8, rng);
    const Matrix direct = pseudoinverse(apply(p, B)) * Y;
    CHECK((signal_update(B, Y, p) - direct).norm() <= 1e-10 * (1 + direct.norm()));
  }
}

TEST_CASE("relative change") {
  const std::vector<double> halved{10, 5}, flat{3, 3}, drop{4, 1}, zeros{0, 0}, one{1};
  CHECK(relative_change(halved) == doctest::Approx(0.5));
  CHECK(relative_change(flat) == 0.0);
  CHECK(relative_change(drop) == doctest::Approx(0.75));
  CHECK(relative_change(zeros) == 0.0);
  const std::vector<double> longer{8, 4, 3};
  CHECK(relative_change(longer) == doctest::Approx(0.25));
  try {
    relative_change(one);
    FAIL("expected TooFewIterations");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TooFewIterations);
  }
}

TEST_CASE("identity truth converges in one iteration") {
  SynthConfig c;
  c.n = 20;
  c.d = 4;
  c.m = 3;
  c.seed = 13;
  const ProblemInstance inst = generate(c);
  const SolveResult res = solve(inst, SolverConfig{});
  CHECK(res.iters == 1);
  CHECK(res.converged);
  CHECK(res.P_hat == Permutation::identity(20));
  CHECK(res.objective_trace.back() < 1e-20 * inst.Y.squaredNorm());
}

TEST_CASE("objective trace is nonincreasing") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    SynthConfig c;
    c.n = 40;
    c.d = 5;
    c.m = 3;
    c.sigma = seed % 2 ? 0.1 : 0.0;
    c.seed = seed;
    SolverConfig cfg;
    if (seed % 3 == 0) {
      c.model = RLocalModel{BlockPartition::equal(40, 10)};
      cfg.mode = Mode::RLocal;
    } else {
      c.model = KSparseModel{20};
    }
    const SolveResult res = solve(generate(c), cfg);
    const auto& tr = res.objective_trace;
    for (std::size_t i = 1; i < tr.size(); ++i) CHECK(tr[i] <= tr[i - 1] + 1e-9 * tr.front());
  }
}

TEST_CASE("r-local solve stays block diagonal") {
  SynthConfig c;
  c.n = 30;
  c.d = 4;
  c.m = 2;
  c.sigma = 0.5;
  c.model = RLocalModel{BlockPartition::equal(30, 6)};
  c.seed = 14;
  const ProblemInstance inst = generate(c);
  SolverConfig cfg;
  cfg.mode = Mode::RLocal;
  const SolveResult res = solve(inst, cfg);
  CHECK(is_block_diagonal(res.P_hat, *inst.partition));
}

TEST_CASE("r-local mode without a partition is a configuration error") {
  ProblemInstance inst = tiny_instance(15, KSparseModel{0});
  inst.partition.reset();
  SolverConfig cfg;
  cfg.mode = Mode::RLocal;
  CHECK_THROWS_AS(solve(inst, cfg), Error);
}

TEST_CASE("warm start at the truth is a fixed point") {
  const ProblemInstance inst = tiny_instance(16, KSparseModel{6});
  WarmStart warm;
  warm.X = inst.truth->X_star;
  const SolveResult res = solve(inst, SolverConfig{}, warm);
  CHECK(res.P_hat == inst.truth->P_star);
  CHECK((res.X_hat - inst.truth->X_star).norm() < 1e-10);

  WarmStart by_perm;
  by_perm.P = inst.truth->P_star;
  CHECK(solve(inst, SolverConfig{}, by_perm).P_hat == inst.truth->P_star);
}

TEST_CASE("small blocks are recovered exactly at desk scale") {
  int exact = 0;
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    SynthConfig c;
    c.model = RLocalModel{BlockPartition::equal(100, 5)};
    c.seed = seed;
    const ProblemInstance inst = generate(c);
    SolverConfig cfg;
    cfg.mode = Mode::RLocal;
    const SolveResult res = solve(inst, cfg);
    exact += hamming_distortion(res.P_hat, inst.truth->P_star) == 0;
  }
  CHECK(exact > 7);
}

TEST_CASE("solver never beats the exhaustive minimum") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const ProblemInstance inst = tiny_instance(seed, KSparseModel{6}, 0.2);
    const SolveResult res = solve(inst, SolverConfig{});
    const double floor = oracle::brute_force_min_objective(inst.B, inst.Y);
    CHECK(res.objective_trace.back() >= floor - 1e-9 * inst.Y.squaredNorm());
  }
}
