#pragma once

// Independent reference computations for the tests. Nothing here calls the
// solver or the assignment code under test.

#include "altmin/linalg.hpp"
#include "altmin/permutation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace oracle {

using altmin::Matrix;

// Max over all n! permutations of sum_i C(i, p[i]).
inline double brute_force_lap(const Matrix& C) {
  const auto n = static_cast<std::size_t>(C.rows());
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  double best = -std::numeric_limits<double>::infinity();
  do {
    double v = 0;
    for (std::size_t i = 0; i < n; ++i) v += C(Eigen::Index(i), Eigen::Index(p[i]));
    best = std::max(best, v);
  } while (std::next_permutation(p.begin(), p.end()));
  return best;
}

inline double assignment_value(const Matrix& C, const altmin::Permutation& p) {
  double v = 0;
  for (std::size_t i = 0; i < p.size(); ++i) v += C(Eigen::Index(i), Eigen::Index(p[i]));
  return v;
}

// ||Y - P B X||_F^2 by explicit loops.
inline double naive_objective(const Matrix& B, const Matrix& Y, const altmin::Permutation& p,
                              const Matrix& X) {
  double total = 0;
  for (Eigen::Index i = 0; i < Y.rows(); ++i) {
    for (Eigen::Index j = 0; j < Y.cols(); ++j) {
      double pred = 0;
      for (Eigen::Index l = 0; l < B.cols(); ++l) pred += B(Eigen::Index(p[std::size_t(i)]), l) * X(l, j);
      const double r = Y(i, j) - pred;
      total += r * r;
    }
  }
  return total;
}

// Least-squares residual of P^T Y against the column space of B via the
// normal equations (B full column rank assumed).
inline double ls_residual(const Matrix& B, const Matrix& Z) {
  const Matrix X = (B.transpose() * B).ldlt().solve(B.transpose() * Z);
  return (Z - B * X).squaredNorm();
}

// min over all permutations P and all X of ||Y - P B X||_F^2.
inline double brute_force_min_objective(const Matrix& B, const Matrix& Y) {
  const auto n = static_cast<std::size_t>(Y.rows());
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  double best = std::numeric_limits<double>::infinity();
  Matrix Z(Y.rows(), Y.cols());
  do {
    for (std::size_t i = 0; i < n; ++i) Z.row(Eigen::Index(p[i])) = Y.row(Eigen::Index(i));
    best = std::min(best, ls_residual(B, Z));
  } while (std::next_permutation(p.begin(), p.end()));
  return best;
}

// Every permutation of {0..n-1}, lexicographic.
inline std::vector<std::vector<std::size_t>> all_permutations(std::size_t n) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  do out.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

}  // namespace oracle
