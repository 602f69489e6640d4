#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "altmin/error.hpp"
#include "altmin/theory.hpp"

#include <cmath>
#include <sstream>

using namespace altmin;
using namespace altmin::theory;

namespace {

double detail(const BoundReport& rep, const char* prefix, double t) {
  std::ostringstream os;
  os << prefix << "@" << t;
  return rep.details.at(os.str());
}

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Io;
}

}  // namespace

TEST_CASE("jl threshold arithmetic") {
  CHECK(jl_threshold(100, 75, 0.0) == doctest::Approx(0.5));
  CHECK(jl_threshold(100, 36, 0.25) == doctest::Approx(1.0));
  CHECK(jl_threshold(1000, 999, 0.3) < jl_threshold(1000, 900, 0.3));
  CHECK(code_of([] { jl_threshold(10, 10, 0.1); }) == ErrorCode::InvalidRange);
  CHECK(code_of([] { jl_threshold(10, 0, 0.1); }) == ErrorCode::InvalidRange);
  CHECK(code_of([] { jl_threshold(10, 5, -1.0); }) == ErrorCode::InvalidRange);
}

TEST_CASE("explicit constants") {
  const BoundParams p{.d = 80, .s = 40};
  CHECK(p.c1() == doctest::Approx(40 + 0.5 * std::sqrt(40.0)));
  CHECK(p.K1() == doctest::Approx(2 * (std::sqrt(40.0) + 1)));
  CHECK(BoundParams{.d = 30, .s = 5}.c2() == doctest::Approx(std::sqrt(39.5)));
  CHECK(BoundParams{.n = 200, .k = 20}.c3() == doctest::Approx(2 * std::sqrt(180.0) + 2 * std::sqrt(60.0)));
  const BoundParams scaled{.d = 80, .s = 40, .K = 2};
  CHECK(scaled.c1() == doctest::Approx(4 * p.c1()));
  CHECK(scaled.c2() == doctest::Approx(2 * std::sqrt(40 + 2.5 * std::sqrt(40.0) + 2)));
}

TEST_CASE("binomial margin") {
  CHECK(binomial_margin(0.5, 10000) == doctest::Approx(0.015));
  CHECK(binomial_margin(0.0, 100) == 0.0);
  CHECK(binomial_margin(1.0, 100) == 0.0);
}

TEST_CASE("collapsed-init relative error concentrates") {
  const Rng rng(21);
  const BoundReport rep = check_lemma1(100, 75, 0.5, 500, rng);
  CHECK(rep.passed);
  CHECK(rep.empirical <= 0.05);
  CHECK(rep.threshold == doctest::Approx(0.75));
  CHECK(rep.details.at("median_relative_error") == doctest::Approx(0.5).epsilon(0.2));
  CHECK(std::abs(rep.details.at("median_relative_error") - 0.5) <= 0.1);
  CHECK(rep.empirical >= 0.0);
  CHECK(rep.empirical <= 1.0);

  const BoundReport huge = check_lemma1(100, 75, 10.0, 100, rng);
  CHECK(huge.empirical == 0.0);
}

TEST_CASE("multi-column check reduces to the scalar one") {
  const Rng rng(22);
  const BoundReport one = check_lemma1(40, 30, 0.4, 200, rng);
  const BoundReport multi = check_theorem1(40, 30, 1, 0.4, 200, rng);
  CHECK(one.empirical == multi.empirical);
  CHECK(one.details == multi.details);

  const BoundReport eight = check_theorem1(64, 48, 8, 0.5, 300, rng);
  CHECK(eight.passed);
  CHECK(eight.empirical <= 0.05);
  CHECK(eight.threshold == doctest::Approx(jl_threshold(64, 48, 0.5)));
}

TEST_CASE("tail frequencies fall along the grid") {
  const Rng rng(23);
  const std::vector<double> grid{0.05, 0.1, 0.2, 0.4, 0.8};
  const BoundReport rep = check_lemma1(60, 40, 0.2, 300, rng, grid);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    CHECK(detail(rep, "exceed", grid[i]) <= detail(rep, "exceed", grid[i - 1]));
    CHECK(detail(rep, "outside_band", grid[i]) <= detail(rep, "outside_band", grid[i - 1]));
  }

  const BoundReport l2 = check_lemma2(80, 40, 2.0, 400, rng);
  for (double g : {0.5, 1.0, 2.0, 4.0})
    CHECK(detail(l2, "exceed", 2 * g) <= detail(l2, "exceed", g));
}

TEST_CASE("residual-space error tail against explicit constants") {
  const Rng rng(24);
  const BoundReport rep = check_lemma2(80, 40, 2.0, 2000, rng);
  CHECK(rep.passed);
  CHECK(rep.empirical <= std::exp(-2.0) + 0.02);
  CHECK(rep.threshold == doctest::Approx(BoundParams{.d = 80, .s = 40}.c1() +
                                         2 * BoundParams{.d = 80, .s = 40}.K1()));

  const BoundReport zero = check_lemma2(80, 40, 0.0, 200, rng);
  CHECK(*zero.bound == 1.0);
  CHECK(zero.passed);
}

TEST_CASE("tilde_e clips from below") {
  CHECK(tilde_e(3.0, 7.0) == 7.0);
  CHECK(tilde_e(12.0, 7.0) == 12.0);
  for (double e : {0.0, 1.0, 6.9, 7.0, 7.1, 100.0}) {
    CHECK(tilde_e(e, 7.0) >= e);
    CHECK(tilde_e(e, 7.0) >= 7.0);
  }
}

TEST_CASE("summed-norm error tail") {
  const Rng rng(25);
  const BoundReport rep = check_theorem2(60, 30, 4, 1.0, 1000, rng);
  CHECK(rep.passed);
  const double K1 = BoundParams{.d = 60, .s = 30}.K1();
  const std::vector<double> grid{2 * std::sqrt(4 * K1)};
  CHECK(check_theorem2(60, 30, 4, 1.0, 1000, rng).details.at("exceed_at_t_small") <= 0.1);
  CHECK(check_theorem2(60, 30, 4, grid[0], 1000, rng).empirical <= 0.15);
  CHECK(rep.details.at("c2") == doctest::Approx(std::sqrt(30 + 2.5 * std::sqrt(30.0) + 2)));
}

TEST_CASE("identity-start forward error") {
  const Rng rng(26);
  const BoundReport rep = check_lemma4(200, 10, 20, 3.0, 1000, rng);
  CHECK(rep.passed);
  CHECK(rep.empirical <= 7 * std::exp(-3.0) + 0.02);
  CHECK(rep.details.at("c3") == doctest::Approx(2 * std::sqrt(180.0) + 2 * std::sqrt(60.0)));

  const BoundReport none = check_lemma4(50, 5, 0, 1.0, 50, rng);
  CHECK(none.details.at("mean_forward_error") == 0.0);
  CHECK(none.passed);
  CHECK(code_of([&] { check_lemma4(10, 3, 10, 1.0, 5, rng); }) == ErrorCode::InvalidRange);
}

TEST_CASE("first-iterate signal error") {
  const Rng rng(27);
  const double t = std::log(9.0) + 2;
  const BoundReport rep = check_theorem3(150, 8, 15, 3, t, 500, rng);
  CHECK(rep.passed);
  CHECK(rep.details.at("deterministic_violations") == 0.0);
  CHECK(rep.empirical <= 7 * std::exp(-t) + 0.03);

  const BoundReport none = check_theorem3(60, 5, 0, 2, 2.0, 30, rng);
  CHECK(none.details.at("mean_signal_error") < 1e-18);
  CHECK(code_of([&] { check_theorem3(60, 5, 5, 3, 1.0, 10, rng); }) == ErrorCode::InvalidRange);
}

TEST_CASE("chi-square tails") {
  const Rng rng(28);
  const BoundReport rep = chi2_tail_check(50, 1.0, 10000, rng);
  CHECK(rep.passed);
  CHECK(rep.empirical <= std::exp(-1.0) + 0.02);
  CHECK(rep.details.at("lower_empirical") <= std::exp(-1.0) + 0.02);
  CHECK(rep.details.at("lower_threshold") == doctest::Approx(50 - 2 * std::sqrt(50.0)));

  const BoundReport trivial = chi2_tail_check(1, 0.0, 100, rng);
  CHECK(*trivial.bound == 1.0);
  CHECK(trivial.passed);
}

TEST_CASE("zero trials is rejected") {
  const Rng rng(29);
  CHECK(code_of([&] { check_lemma1(10, 5, 0.5, 0, rng); }) == ErrorCode::InvalidRange);
  CHECK(code_of([&] { chi2_tail_check(10, 0.5, 0, rng); }) == ErrorCode::InvalidRange);
}

TEST_CASE("worst-case init bound") {
  Rng rng(30);
  SUBCASE("orthonormal columns") {
    const Matrix Q = gaussian_matrix(20, 5, rng).householderQr().householderQ() *
                     Matrix::Identity(20, 5);
    const Matrix x_star = gaussian_matrix(5, 1, rng);
    const Matrix y = Q * x_star;
    const Matrix x_hat = 0.5 * x_star;
    const double bound = worst_case_init_bound(Q, x_hat, y);
    CHECK(bound == doctest::Approx(y.squaredNorm() - x_hat.squaredNorm()));
  }
  SUBCASE("holds on random designs") {
    for (int trial = 0; trial < 100; ++trial) {
      const Matrix B = gaussian_matrix(40, 10, rng);
      const Matrix x_star = gaussian_matrix(10, 1, rng);
      const Matrix y = B * x_star;
      // x_hat orthogonal to the error so ||x* - x_hat||^2 = ||x*||^2 - ||x_hat||^2.
      const Matrix P = row_space_projector(gaussian_matrix(4, 10, rng));
      const Matrix x_hat = P * x_star;
      CHECK((x_star - x_hat).squaredNorm() <= worst_case_init_bound(B, x_hat, y) * (1 + 1e-12));
    }
  }
  SUBCASE("tight along the smallest singular direction") {
    const Matrix B = gaussian_matrix(40, 10, rng);
    const SvdFactors f = svd(B);
    const Matrix x_star = f.V.col(9);
    const Matrix y = B * x_star;
    const Matrix x_hat = Matrix::Zero(10, 1);
    const double bound = worst_case_init_bound(B, x_hat, y);
    CHECK(bound == doctest::Approx((x_star - x_hat).squaredNorm()).epsilon(1e-6));
  }
  SUBCASE("singular designs are rejected") {
    Matrix B = gaussian_matrix(6, 3, rng);
    B.col(2) = B.col(1);
    CHECK(code_of([&] { worst_case_init_bound(B, Matrix::Zero(3, 1), Matrix::Ones(6, 1)); }) ==
          ErrorCode::SingularB);
    CHECK(code_of([&] {
            worst_case_init_bound(gaussian_matrix(2, 3, rng), Matrix::Zero(3, 1), Matrix::Ones(2, 1));
          }) == ErrorCode::SingularB);
  }
}
