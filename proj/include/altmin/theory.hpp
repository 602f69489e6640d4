#pragma once

#include "altmin/linalg.hpp"
#include "altmin/rng.hpp"

#include <json.hpp>

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace altmin::theory {

/// Dimensions and tail parameter shared by the bound evaluators, with the
/// explicit constants derived from them. K is the sub-Gaussian parameter
/// of the signal (K = 1 for standard normal entries).
struct BoundParams {
  std::size_t n = 0, d = 0, s = 0, m = 1, k = 0;
  double t = 0.0;
  double K = 1.0;

  /// K^2 (d - s + sqrt(d - s) / 2)
  double c1() const;
  /// 2 K^2 (sqrt(d - s) + 1)
  double K1() const;
  /// K (d - s + 5/2 sqrt(d - s) + 2)^(1/2)
  double c2() const;
  /// 2 sqrt(n - k) + 2 sqrt(3k)
  double c3() const;
};

/// Outcome of one Monte-Carlo check. `bound` is empty when the bound
/// involves an unspecified absolute constant and so has no numeric value.
struct BoundReport {
  std::string check;
  std::map<std::string, double> params;
  double threshold = 0.0;
  std::optional<double> bound;
  double empirical = 0.0;
  std::size_t trials = 0;
  bool passed = false;
  /// Per-check extras: grid frequencies, medians, violation counts.
  std::map<std::string, double> details;
};

nlohmann::json to_json(const BoundReport& report);

/// Three-sigma binomial half-width for a frequency estimated from `trials`.
double binomial_margin(double p, std::size_t trials);

/// (1 + t) sqrt((d - s) / d). Throws Error{InvalidRange} unless 0 < s < d, t >= 0.
double jl_threshold(std::size_t d, std::size_t s, double t);

/// max(c1, err_sq): the clipped error whose excess over c1 is nonnegative.
double tilde_e(double err_sq, double c1);

/// (||y||^2 - sigma_min(B)^2 ||x_hat||^2) / sigma_min(B)^2.
/// Throws Error{SingularB} when B has no positive smallest singular value.
double worst_case_init_bound(const Matrix& B, const Matrix& x_hat, const Matrix& y);

/// Gaussian B, fixed unit x*: relative collapsed-init error against
/// (1 + t) sqrt((d - s)/d), plus the two-sided band. `t_grid` defaults to
/// {t/4, t/2, t, 2t, 4t}. Passes when both tail frequencies are
/// nonincreasing along the grid and the exceedance at the largest grid
/// point is at most 0.05 + margin.
BoundReport check_lemma1(std::size_t d, std::size_t s, double t, std::size_t trials,
                         const Rng& rng, std::vector<double> t_grid = {});

/// Multi-column version of check_lemma1 on Frobenius ratios. With m = 1 it
/// draws exactly the same numbers as check_lemma1.
BoundReport check_theorem1(std::size_t d, std::size_t s, std::size_t m, double t,
                           std::size_t trials, const Rng& rng, std::vector<double> t_grid = {});

/// Fixed B (n x d collapsed into s balanced blocks), x* ~ N(0, I):
/// frequency of ||x* - x_hat||^2 >= c1 + K1 t against exp(-t).
BoundReport check_lemma2(std::size_t d, std::size_t s, double t, std::size_t trials,
                         const Rng& rng, const Matrix& B);
/// Same with a Gaussian 2s x d measurement matrix drawn from `rng`.
BoundReport check_lemma2(std::size_t d, std::size_t s, double t, std::size_t trials,
                         const Rng& rng);

/// Fixed B, X* with m standard normal columns: frequency of
/// sum_i ||x*_i - x_hat_i|| - m c2 >= t over a grid that includes
/// sqrt(m K1 ln 20), where it must not exceed 0.1.
BoundReport check_theorem2(std::size_t d, std::size_t s, std::size_t m, double t,
                           std::size_t trials, const Rng& rng, const Matrix& B);
BoundReport check_theorem2(std::size_t d, std::size_t s, std::size_t m, double t,
                           std::size_t trials, const Rng& rng);

/// Gaussian B, fixed x* and fixed k-sparse P*: frequency of the identity
/// start's forward error reaching 2||y*||^2 - 2||x*||^2 (n - k - c3 sqrt(t) - 3t)
/// against min(1, 7 exp(-t)).
BoundReport check_lemma4(std::size_t n, std::size_t d, std::size_t k, double t,
                         std::size_t trials, const Rng& rng);

/// Multi-column first-iterate error sigma_min^2 ||X* - X1||_F^2 against the
/// probabilistic threshold, and the deterministic bound 4||Y*||_F^2 - F1 on
/// every draw. Requires t >= log(m^2).
BoundReport check_theorem3(std::size_t n, std::size_t d, std::size_t k, std::size_t m, double t,
                           std::size_t trials, const Rng& rng);

/// Upper and lower chi-square tails with D degrees of freedom against exp(-t).
BoundReport chi2_tail_check(std::size_t D, double t, std::size_t trials, const Rng& rng);

}  // namespace altmin::theory
