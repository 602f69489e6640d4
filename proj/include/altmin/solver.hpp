#pragma once

#include "altmin/instance.hpp"
#include "altmin/linalg.hpp"
#include "altmin/permutation.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace altmin {

enum class Mode { RLocal, KSparse };

struct SolverConfig {
  Mode mode = Mode::KSparse;
  /// Stop once the relative change of the objective drops below this.
  double epsilon = 0.01;
  std::size_t max_iters = 100;
  /// Required in RLocal mode unless the instance carries one.
  std::optional<BlockPartition> partition;
  /// Stop as soon as F <= zero_fit * ||Y||_F^2; no admissible pair can do better.
  double zero_fit = 1e-24;
};

/// Optional starting point. A supplied X takes precedence over P.
struct WarmStart {
  std::optional<Permutation> P;
  std::optional<Matrix> X;
};

struct SolveResult {
  Permutation P_hat;
  Matrix X_hat;
  /// F after each full iteration (permutation update followed by signal update).
  std::vector<double> objective_trace;
  std::size_t iters = 0;
  bool converged = false;
};

/// F(X, P) = ||Y - P B X||_F^2.
double objective(const Matrix& B, const Matrix& Y, const Permutation& p, const Matrix& X);

/// Best admissible permutation for the prediction Yhat = B X: the full
/// assignment over all rows in KSparse mode, one assignment per block in
/// RLocal mode.
Permutation permutation_update(const Matrix& B, const Matrix& Y, const Matrix& X,
                               const SolverConfig& config);

/// Same as above with the prediction already formed.
Permutation permutation_update_from_prediction(const Matrix& Y, const Matrix& Yhat,
                                               const SolverConfig& config);

/// (P B)^+ Y, computed as B^+ P^T Y.
Matrix signal_update(const Matrix& B, const Matrix& Y, const Permutation& p);

/// |F_t - F_{t-1}| / max(F_{t-1}, 1e-12 * F_0) over the last two entries.
/// Throws Error{TooFewIterations} with fewer than two entries.
double relative_change(std::span<const double> trace);

SolveResult solve(const ProblemInstance& instance, const SolverConfig& config,
                  const WarmStart& warm = {});

}  // namespace altmin
