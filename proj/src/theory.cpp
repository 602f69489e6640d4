#include "altmin/theory.hpp"

#include "altmin/collapse.hpp"
#include "altmin/error.hpp"
#include "altmin/permutation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace altmin::theory {

namespace {

constexpr std::size_t kRowsPerBlock = 2;
// Smallness level for checks whose tail bound has an unspecified constant.
constexpr double kSmallTail = 0.05;

void require_underdetermined(std::size_t d, std::size_t s) {
  if (s == 0 || s >= d) {
    throw Error(ErrorCode::InvalidRange, "need 0 < s < d, got s=" + std::to_string(s) +
                                             " d=" + std::to_string(d));
  }
}

void require_trials(std::size_t trials) {
  if (trials == 0) throw Error(ErrorCode::InvalidRange, "need at least one trial");
}

double frequency(const std::vector<double>& values, auto&& predicate) {
  std::size_t hits = 0;
  for (double v : values) hits += predicate(v) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(values.size());
}

bool nonincreasing(const std::vector<double>& seq) {
  for (std::size_t i = 1; i < seq.size(); ++i)
    if (seq[i] > seq[i - 1]) return false;
  return true;
}

double median(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

std::string key(const char* prefix, double t) {
  std::ostringstream os;
  os << prefix << "@" << t;
  return os.str();
}

std::vector<double> default_grid(double t) { return {t / 4, t / 2, t, 2 * t, 4 * t}; }

// Relative Frobenius error of the collapsed initialization for a fixed unit
// X* and a fresh Gaussian B (and r-local shuffle) per trial.
std::vector<double> collapsed_relative_errors(std::size_t d, std::size_t s, std::size_t m,
                                              std::size_t trials, const Rng& rng) {
  Rng fixed = rng.split(0);
  Matrix X_star = gaussian_matrix(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(m), fixed);
  X_star /= X_star.norm();
  const BlockPartition partition = BlockPartition::equal(s * kRowsPerBlock, kRowsPerBlock);

  std::vector<double> ratios(trials);
  for (std::size_t i = 0; i < trials; ++i) {
    Rng tr = rng.split(i + 1);
    const Matrix B = gaussian_matrix(static_cast<Eigen::Index>(partition.total()),
                                     static_cast<Eigen::Index>(d), tr);
    const Permutation P = sample_rlocal(partition, tr);
    const Matrix Y = apply(P, B * X_star);
    const Matrix X_hat = init_rlocal(build_collapsed(B, Y, partition));
    ratios[i] = (X_star - X_hat).norm();
  }
  return ratios;
}

BoundReport jl_report(const char* name, std::size_t d, std::size_t s, std::size_t m, double t,
                      std::size_t trials, const Rng& rng, std::vector<double> grid) {
  require_underdetermined(d, s);
  require_trials(trials);
  if (t < 0) throw Error(ErrorCode::InvalidRange, "need t >= 0");
  if (m == 0) throw Error(ErrorCode::InvalidRange, "need m >= 1");
  if (grid.empty()) grid = default_grid(t);
  std::sort(grid.begin(), grid.end());

  const std::vector<double> ratios = collapsed_relative_errors(d, s, m, trials, rng);
  const double base = std::sqrt(static_cast<double>(d - s) / static_cast<double>(d));

  BoundReport rep;
  rep.check = name;
  rep.params = {{"d", double(d)}, {"s", double(s)}, {"m", double(m)}, {"t", t}};
  rep.threshold = jl_threshold(d, s, t);
  rep.trials = trials;
  rep.empirical = frequency(ratios, [&](double r) { return r >= rep.threshold; });

  std::vector<double> upper, outside;
  for (double g : grid) {
    const double hi = (1 + g) * base, lo = (1 - g) * base;
    upper.push_back(frequency(ratios, [&](double r) { return r >= hi; }));
    outside.push_back(frequency(ratios, [&](double r) { return r >= hi || r <= lo; }));
    rep.details[key("exceed", g)] = upper.back();
    rep.details[key("outside_band", g)] = outside.back();
  }
  const double lo_t = (1 - t) * base;
  rep.details["band_frequency"] =
      frequency(ratios, [&](double r) { return r > lo_t && r < rep.threshold; });
  rep.details["median_relative_error"] = median(ratios);
  rep.details["pivot"] = base;

  rep.passed = nonincreasing(upper) && nonincreasing(outside) &&
               upper.back() <= kSmallTail + binomial_margin(kSmallTail, trials);
  return rep;
}

Matrix gaussian_design(std::size_t s, std::size_t d, const Rng& rng) {
  Rng gen = rng.split(~std::uint64_t{0});
  return gaussian_matrix(static_cast<Eigen::Index>(2 * s), static_cast<Eigen::Index>(d), gen);
}

// I - V V^T for the row space of the collapsed B.
Matrix residual_projector(const Matrix& B, std::size_t s, std::size_t d) {
  require_underdetermined(d, s);
  if (B.cols() != static_cast<Eigen::Index>(d) || B.rows() < static_cast<Eigen::Index>(s)) {
    throw Error(ErrorCode::ShapeMismatch, "measurement matrix must be n x d with n >= s");
  }
  const BlockPartition partition = BlockPartition::balanced(static_cast<std::size_t>(B.rows()), s);
  const Matrix dummy = Matrix::Zero(B.rows(), 1);
  const CollapsedSystem sys = build_collapsed(B, dummy, partition);
  return Matrix::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)) -
         row_space_projector(sys.B_tilde);
}

}  // namespace

double BoundParams::c1() const {
  const double g = static_cast<double>(d - s);
  return K * K * (g + 0.5 * std::sqrt(g));
}

double BoundParams::K1() const {
  return 2 * K * K * (std::sqrt(static_cast<double>(d - s)) + 1);
}

double BoundParams::c2() const {
  const double g = static_cast<double>(d - s);
  return K * std::sqrt(g + 2.5 * std::sqrt(g) + 2);
}

double BoundParams::c3() const {
  return 2 * std::sqrt(static_cast<double>(n - k)) + 2 * std::sqrt(3.0 * static_cast<double>(k));
}

nlohmann::json to_json(const BoundReport& report) {
  nlohmann::json j;
  j["check"] = report.check;
  j["params"] = report.params;
  j["threshold"] = report.threshold;
  j["bound"] = report.bound ? nlohmann::json(*report.bound) : nlohmann::json(nullptr);
  j["empirical"] = report.empirical;
  j["trials"] = report.trials;
  j["passed"] = report.passed;
  j["details"] = report.details;
  return j;
}

double binomial_margin(double p, std::size_t trials) {
  p = std::clamp(p, 0.0, 1.0);
  return 3.0 * std::sqrt(p * (1 - p) / static_cast<double>(trials));
}

double jl_threshold(std::size_t d, std::size_t s, double t) {
  require_underdetermined(d, s);
  if (t < 0) throw Error(ErrorCode::InvalidRange, "need t >= 0");
  return (1 + t) * std::sqrt(static_cast<double>(d - s) / static_cast<double>(d));
}

double tilde_e(double err_sq, double c1) { return std::max(c1, err_sq); }

double worst_case_init_bound(const Matrix& B, const Matrix& x_hat, const Matrix& y) {
  const SvdFactors f = svd(B);
  const double smin = f.S[f.S.size() - 1];
  if (B.rows() < B.cols() || !(smin > f.rank_tol)) {
    throw Error(ErrorCode::SingularB, "worst-case bound needs full column rank B");
  }
  const double s2 = smin * smin;
  return (y.squaredNorm() - s2 * x_hat.squaredNorm()) / s2;
}

BoundReport check_lemma1(std::size_t d, std::size_t s, double t, std::size_t trials,
                         const Rng& rng, std::vector<double> t_grid) {
  return jl_report("lemma1", d, s, 1, t, trials, rng, std::move(t_grid));
}

BoundReport check_theorem1(std::size_t d, std::size_t s, std::size_t m, double t,
                           std::size_t trials, const Rng& rng, std::vector<double> t_grid) {
  return jl_report("theorem1", d, s, m, t, trials, rng, std::move(t_grid));
}

BoundReport check_lemma2(std::size_t d, std::size_t s, double t, std::size_t trials,
                         const Rng& rng, const Matrix& B) {
  require_trials(trials);
  if (t < 0) throw Error(ErrorCode::InvalidRange, "need t >= 0");
  const Matrix A = residual_projector(B, s, d);
  const BoundParams bp{.n = static_cast<std::size_t>(B.rows()), .d = d, .s = s, .t = t};

  std::vector<double> err_sq(trials);
  for (std::size_t i = 0; i < trials; ++i) {
    Rng tr = rng.split(i + 1);
    const Matrix x = gaussian_matrix(static_cast<Eigen::Index>(d), 1, tr);
    err_sq[i] = (A * x).squaredNorm();
  }

  BoundReport rep;
  rep.check = "lemma2";
  rep.params = {{"n", double(B.rows())}, {"d", double(d)}, {"s", double(s)}, {"t", t}, {"K", 1.0}};
  rep.threshold = bp.c1() + bp.K1() * t;
  rep.bound = std::exp(-t);
  rep.trials = trials;
  rep.empirical = frequency(err_sq, [&](double e) { return e >= rep.threshold; });

  std::vector<double> grid_freq;
  for (double g : default_grid(t)) {
    const double thr = bp.c1() + bp.K1() * g;
    grid_freq.push_back(frequency(err_sq, [&](double e) { return e >= thr; }));
    rep.details[key("exceed", g)] = grid_freq.back();
  }
  // The clipped variable shares the upper tail above c1.
  rep.details["tilde_e_exceed"] = frequency(
      err_sq, [&](double e) { return tilde_e(e, bp.c1()) - bp.c1() >= bp.K1() * t; });
  double mean = 0;
  for (double e : err_sq) mean += e;
  rep.details["mean_err_sq"] = mean / static_cast<double>(trials);
  rep.details["c1"] = bp.c1();
  rep.details["K1"] = bp.K1();

  rep.passed = nonincreasing(grid_freq) &&
               rep.empirical <= *rep.bound + binomial_margin(*rep.bound, trials);
  return rep;
}

BoundReport check_lemma2(std::size_t d, std::size_t s, double t, std::size_t trials,
                         const Rng& rng) {
  require_underdetermined(d, s);
  return check_lemma2(d, s, t, trials, rng, gaussian_design(s, d, rng));
}

BoundReport check_theorem2(std::size_t d, std::size_t s, std::size_t m, double t,
                           std::size_t trials, const Rng& rng, const Matrix& B) {
  require_trials(trials);
  if (m == 0) throw Error(ErrorCode::InvalidRange, "need m >= 1");
  if (t < 0) throw Error(ErrorCode::InvalidRange, "need t >= 0");
  const Matrix A = residual_projector(B, s, d);
  const BoundParams bp{.n = static_cast<std::size_t>(B.rows()), .d = d, .s = s, .m = m, .t = t};
  const double md = static_cast<double>(m);

  std::vector<double> excess(trials);
  for (std::size_t i = 0; i < trials; ++i) {
    Rng tr = rng.split(i + 1);
    const Matrix X = gaussian_matrix(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(m), tr);
    const Matrix E = A * X;
    double sum = 0;
    for (Eigen::Index c = 0; c < E.cols(); ++c) sum += E.col(c).norm();
    excess[i] = sum - md * bp.c2();
  }

  const double t_small = std::sqrt(md * bp.K1() * std::log(20.0));
  std::vector<double> grid{0.0, t / 2, t, 2 * t, t_small};
  std::sort(grid.begin(), grid.end());

  BoundReport rep;
  rep.check = "theorem2";
  rep.params = {{"n", double(B.rows())}, {"d", double(d)}, {"s", double(s)},
                {"m", md}, {"t", t}, {"K", 1.0}};
  rep.threshold = md * bp.c2() + t;
  rep.trials = trials;
  rep.empirical = frequency(excess, [&](double e) { return e >= t; });

  std::vector<double> grid_freq;
  for (double g : grid) {
    grid_freq.push_back(frequency(excess, [&](double e) { return e >= g; }));
    rep.details[key("exceed", g)] = grid_freq.back();
  }
  const double at_small = frequency(excess, [&](double e) { return e >= t_small; });
  rep.details["t_small"] = t_small;
  rep.details["exceed_at_t_small"] = at_small;
  rep.details["c2"] = bp.c2();
  rep.details["K1"] = bp.K1();

  rep.passed = nonincreasing(grid_freq) && at_small <= 0.1;
  return rep;
}

BoundReport check_theorem2(std::size_t d, std::size_t s, std::size_t m, double t,
                           std::size_t trials, const Rng& rng) {
  require_underdetermined(d, s);
  return check_theorem2(d, s, m, t, trials, rng, gaussian_design(s, d, rng));
}

namespace {

struct KSparseDraws {
  std::vector<double> lhs;        // error quantity per trial
  std::vector<double> threshold;  // probabilistic threshold per trial
  std::size_t deterministic_violations = 0;
  double worst_deterministic_ratio = 0.0;
};

// Shared by check_lemma4 (m = 1, forward error) and check_theorem3 (signal
// error after one least-squares step).
KSparseDraws ksparse_draws(std::size_t n, std::size_t d, std::size_t k, std::size_t m, double t,
                           std::size_t trials, const Rng& rng, bool signal_error) {
  if (k >= n) {
    throw Error(ErrorCode::InvalidRange, "need k <= n - 1, got k=" + std::to_string(k));
  }
  if (d > n) throw Error(ErrorCode::InvalidRange, "need d <= n");
  require_trials(trials);
  if (t < 0) throw Error(ErrorCode::InvalidRange, "need t >= 0");

  Rng fixed = rng.split(0);
  const Matrix X_star = gaussian_matrix(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(m), fixed);
  const Permutation P_star = sample_ksparse(n, k, fixed);
  const BoundParams bp{.n = n, .d = d, .m = m, .k = k, .t = t};
  const double slack_term =
      2 * X_star.squaredNorm() * (static_cast<double>(n - k) - bp.c3() * std::sqrt(t) - 3 * t);

  KSparseDraws out;
  out.lhs.resize(trials);
  out.threshold.resize(trials);
  for (std::size_t i = 0; i < trials; ++i) {
    Rng tr = rng.split(i + 1);
    const Matrix B = gaussian_matrix(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d), tr);
    const Matrix Y_star = B * X_star;
    const Matrix Y = apply(P_star, Y_star);
    const double base = 2 * Y_star.squaredNorm() - slack_term;
    if (!signal_error) {
      out.lhs[i] = (Y_star - Y).squaredNorm();
      out.threshold[i] = base;
      continue;
    }
    const SvdFactors f = svd(B);
    const double smin = f.S[f.S.size() - 1];
    const Matrix X1 = pinv_solve(B, Y);
    const double F1 = (Y - B * X1).squaredNorm();
    const double lhs = smin * smin * (X_star - X1).squaredNorm();
    out.lhs[i] = lhs;
    out.threshold[i] = base - F1;

    const double cap = 4 * Y_star.squaredNorm() - F1;
    const double scale = 4 * Y_star.squaredNorm();
    if (lhs > cap + 1e-8 * scale) ++out.deterministic_violations;
    if (cap > 0) out.worst_deterministic_ratio = std::max(out.worst_deterministic_ratio, lhs / cap);
  }
  return out;
}

double exceed_frequency(const KSparseDraws& draws) {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < draws.lhs.size(); ++i) hits += draws.lhs[i] >= draws.threshold[i];
  return static_cast<double>(hits) / static_cast<double>(draws.lhs.size());
}

double mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

BoundReport check_lemma4(std::size_t n, std::size_t d, std::size_t k, double t,
                         std::size_t trials, const Rng& rng) {
  const KSparseDraws draws = ksparse_draws(n, d, k, 1, t, trials, rng, false);
  BoundReport rep;
  rep.check = "lemma4";
  rep.params = {{"n", double(n)}, {"d", double(d)}, {"k", double(k)}, {"t", t}};
  rep.threshold = mean(draws.threshold);
  rep.bound = std::min(1.0, 7 * std::exp(-t));
  rep.trials = trials;
  rep.empirical = exceed_frequency(draws);
  rep.details["c3"] = BoundParams{.n = n, .k = k}.c3();
  rep.details["mean_forward_error"] = mean(draws.lhs);
  rep.passed = rep.empirical <= *rep.bound + binomial_margin(*rep.bound, trials);
  return rep;
}

BoundReport check_theorem3(std::size_t n, std::size_t d, std::size_t k, std::size_t m, double t,
                           std::size_t trials, const Rng& rng) {
  if (m == 0) throw Error(ErrorCode::InvalidRange, "need m >= 1");
  const double md = static_cast<double>(m);
  if (t < std::log(md * md)) {
    throw Error(ErrorCode::InvalidRange, "need t >= log(m^2)");
  }
  const KSparseDraws draws = ksparse_draws(n, d, k, m, t, trials, rng, true);
  BoundReport rep;
  rep.check = "theorem3";
  rep.params = {{"n", double(n)}, {"d", double(d)}, {"k", double(k)}, {"m", md}, {"t", t}};
  rep.threshold = mean(draws.threshold);
  rep.bound = std::min(1.0, 7 * std::exp(-t));
  rep.trials = trials;
  rep.empirical = exceed_frequency(draws);
  rep.details["deterministic_violations"] = double(draws.deterministic_violations);
  rep.details["worst_deterministic_ratio"] = draws.worst_deterministic_ratio;
  rep.details["mean_signal_error"] = mean(draws.lhs);
  rep.passed = rep.empirical <= *rep.bound + binomial_margin(*rep.bound, trials) &&
               draws.deterministic_violations == 0;
  return rep;
}

BoundReport chi2_tail_check(std::size_t D, double t, std::size_t trials, const Rng& rng) {
  if (D == 0) throw Error(ErrorCode::InvalidRange, "need D >= 1");
  if (t < 0) throw Error(ErrorCode::InvalidRange, "need t >= 0");
  require_trials(trials);
  std::vector<double> z(trials);
  for (std::size_t i = 0; i < trials; ++i) {
    Rng tr = rng.split(i + 1);
    double acc = 0;
    for (std::size_t j = 0; j < D; ++j) {
      const double g = tr.normal();
      acc += g * g;
    }
    z[i] = acc;
  }
  const double Dd = static_cast<double>(D);
  const double hi = Dd + 2 * std::sqrt(Dd * t) + 2 * t;
  const double lo = Dd - 2 * std::sqrt(Dd * t);

  BoundReport rep;
  rep.check = "chi2";
  rep.params = {{"D", Dd}, {"t", t}};
  rep.threshold = hi;
  rep.bound = std::exp(-t);
  rep.trials = trials;
  rep.empirical = frequency(z, [&](double v) { return v >= hi; });
  const double lower = frequency(z, [&](double v) { return v <= lo; });
  rep.details["lower_threshold"] = lo;
  rep.details["lower_empirical"] = lower;
  const double margin = binomial_margin(*rep.bound, trials);
  rep.passed = rep.empirical <= *rep.bound + margin && lower <= *rep.bound + margin;
  return rep;
}

}  // namespace altmin::theory
