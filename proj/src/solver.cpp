#include "altmin/solver.hpp"

#include "altmin/assignment.hpp"
#include "altmin/collapse.hpp"
#include "altmin/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace altmin {

namespace {

const BlockPartition& require_partition(const SolverConfig& config, std::size_t n) {
  if (!config.partition) {
    throw Error(ErrorCode::InvalidConfig, "r-local mode requires a block partition");
  }
  if (config.partition->total() != n) {
    throw Error(ErrorCode::ShapeMismatch, "partition covers " +
                                              std::to_string(config.partition->total()) +
                                              " rows, instance has " + std::to_string(n));
  }
  return *config.partition;
}

}  // namespace

double objective(const Matrix& B, const Matrix& Y, const Permutation& p, const Matrix& X) {
  if (B.cols() != X.rows() || B.rows() != Y.rows() || X.cols() != Y.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "objective: inconsistent shapes of B, X and Y");
  }
  return (Y - apply(p, B * X)).squaredNorm();
}

Permutation permutation_update_from_prediction(const Matrix& Y, const Matrix& Yhat,
                                               const SolverConfig& config) {
  if (Y.rows() != Yhat.rows() || Y.cols() != Yhat.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "permutation_update: Y and prediction differ in shape");
  }
  if (config.mode == Mode::KSparse) {
    return solve_lap(Y * Yhat.transpose()).permutation;
  }
  const BlockPartition& partition = require_partition(config, static_cast<std::size_t>(Y.rows()));
  std::vector<Matrix> rewards;
  rewards.reserve(partition.count());
  for (std::size_t b = 0; b < partition.count(); ++b) {
    const auto off = static_cast<Eigen::Index>(partition.offset(b));
    const auto r = static_cast<Eigen::Index>(partition.size(b));
    rewards.emplace_back(Y.middleRows(off, r) * Yhat.middleRows(off, r).transpose());
  }
  return solve_blockwise(rewards, partition);
}

Permutation permutation_update(const Matrix& B, const Matrix& Y, const Matrix& X,
                               const SolverConfig& config) {
  if (B.cols() != X.rows()) {
    throw Error(ErrorCode::ShapeMismatch, "permutation_update: B and X are not conformable");
  }
  return permutation_update_from_prediction(Y, B * X, config);
}

Matrix signal_update(const Matrix& B, const Matrix& Y, const Permutation& p) {
  return pinv_solve(B, apply_transpose(p, Y));
}

double relative_change(std::span<const double> trace) {
  if (trace.size() < 2) {
    throw Error(ErrorCode::TooFewIterations,
                "relative change needs two objective values, have " + std::to_string(trace.size()));
  }
  const double prev = trace[trace.size() - 2];
  const double curr = trace.back();
  const double denom = std::max(prev, 1e-12 * trace.front());
  const double diff = std::abs(curr - prev);
  if (denom <= 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return diff / denom;
}

SolveResult solve(const ProblemInstance& instance, const SolverConfig& config_in,
                  const WarmStart& warm) {
  validate(instance);
  if (!(config_in.epsilon > 0.0) || config_in.max_iters < 1) {
    throw Error(ErrorCode::InvalidConfig, "solver needs epsilon > 0 and max_iters >= 1");
  }
  SolverConfig config = config_in;
  if (config.mode == Mode::RLocal && !config.partition) config.partition = instance.partition;

  const Matrix& B = instance.B;
  const Matrix& Y = instance.Y;
  const std::size_t n = instance.n();
  if (config.mode == Mode::RLocal) require_partition(config, n);

  const Matrix B_pinv = pseudoinverse(B);
  const double fit_floor = config.zero_fit * Y.squaredNorm();

  SolveResult result;
  Matrix Yhat;
  if (warm.X) {
    if (warm.X->rows() != B.cols() || warm.X->cols() != Y.cols()) {
      throw Error(ErrorCode::ShapeMismatch, "warm-start X has the wrong shape");
    }
    result.X_hat = *warm.X;
    Yhat = B * result.X_hat;
  } else if (warm.P) {
    result.X_hat = B_pinv * apply_transpose(*warm.P, Y);
    Yhat = B * result.X_hat;
  } else if (config.mode == Mode::RLocal) {
    result.X_hat = init_rlocal(build_collapsed(B, Y, *config.partition));
    Yhat = B * result.X_hat;
  } else {
    KSparseInit init = init_ksparse(Y);
    result.P_hat = std::move(init.P0);
    Yhat = std::move(init.Yhat0);
  }

  for (std::size_t t = 0; t < config.max_iters; ++t) {
    result.P_hat = permutation_update_from_prediction(Y, Yhat, config);
    const Matrix Y_unscrambled = apply_transpose(result.P_hat, Y);
    result.X_hat = B_pinv * Y_unscrambled;
    Yhat = B * result.X_hat;
    // ||Y - P Yhat|| == ||P^T Y - Yhat|| since P is orthogonal.
    result.objective_trace.push_back((Y_unscrambled - Yhat).squaredNorm());
    result.iters = t + 1;

    if (result.objective_trace.back() <= fit_floor ||
        (result.objective_trace.size() >= 2 &&
         relative_change(result.objective_trace) < config.epsilon)) {
      result.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace altmin
