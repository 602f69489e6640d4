#pragma once

#include "altmin/instance.hpp"
#include "altmin/linalg.hpp"
#include "altmin/permutation.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace altmin {

enum class MeasurementDist { Gaussian, Uniform01 };

struct SynthConfig {
  std::size_t n = 100, d = 10, m = 10;
  PermutationModel model = KSparseModel{0};
  double sigma = 0.0;
  MeasurementDist B_dist = MeasurementDist::Gaussian;
  std::uint64_t seed = 0;
};

/// Draws B, X* ~ N(0, 1), P* from the configured model and W ~ N(0, sigma^2)
/// from four independent substreams of `seed`, so changing sigma alters W
/// only. Throws Error{InvalidConfig} (or Error{InvalidK}).
ProblemInstance generate(const SynthConfig& config);

/// Rows that share the rounded value of every key column form one block.
struct BlockRule {
  std::vector<std::string> columns;
  /// Keys are rounded half away from zero to this many decimals.
  int decimals = 0;
};

struct IngestOptions {
  std::vector<std::string> target_cols;
  std::vector<std::string> feature_cols;
  BlockRule block_rule;
  /// Prepend a column of ones to B.
  bool intercept = false;
  /// Seeds the within-block shuffle that produces Y from Y*.
  std::uint64_t seed = 0;
};

/// Reads a headed numeric CSV, stably sorts rows by block key so blocks are
/// contiguous, and shuffles the targets within each block.
///
/// The returned instance has B (features), Y (shuffled targets), Y_star,
/// partition, row_order, and truth = {P*, B^+ Y*}.
/// Errors: ParseError (with line and column), NonNumeric, EmptyBlockRule.
ProblemInstance ingest_csv(const std::filesystem::path& path, const IngestOptions& options);
ProblemInstance ingest_csv(std::istream& in, const IngestOptions& options);

struct RegressionEstimates {
  Matrix X_oracle;  // B^+ Y*
  Matrix X_naive;   // B^+ Y
};

RegressionEstimates oracle_and_naive(const Matrix& B, const Matrix& Y_star, const Matrix& Y);

struct EvalMetrics {
  /// d_H(P_hat, P*) / n, when both permutations are known.
  std::optional<double> frac_distortion;
  /// ||X_ref - X_hat||_F / ||X_ref||_F
  double relative_error = 0.0;
  /// 1 - ||Y* - B X_hat||_F / ||Y*||_F. The ratio is not squared.
  double r2 = 0.0;
};

EvalMetrics evaluate(const Matrix& X_hat, const Matrix& X_ref, const Matrix& B,
                     const Matrix& Y_star, const Permutation* P_hat = nullptr,
                     const Permutation* P_star = nullptr);

// ---- file formats -------------------------------------------------------

/// Comma-separated, row-major decimal floats; a non-numeric first line is a header.
Matrix read_matrix_csv(const std::filesystem::path& path);
Matrix read_matrix_csv(std::istream& in);
/// Written with 17 significant digits so values round-trip exactly.
void write_matrix_csv(const std::filesystem::path& path, const Matrix& M);

nlohmann::json permutation_to_json(const Permutation& p);
Permutation permutation_from_json(const nlohmann::json& j);

/// Directory with B.csv, Y.csv, optional Ystar.csv / Xstar.csv, truth.json
/// (permutation and partition sizes) and meta.json.
void write_bundle(const std::filesystem::path& dir, const ProblemInstance& instance,
                  const nlohmann::json& meta = nlohmann::json::object());
ProblemInstance read_bundle(const std::filesystem::path& dir);

nlohmann::json model_to_json(const PermutationModel& model);

}  // namespace altmin
