#include "altmin/data.hpp"

#include "altmin/error.hpp"
#include "altmin/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <sstream>

namespace altmin {

void validate(const ProblemInstance& inst) {
  if (inst.B.rows() == 0 || inst.B.cols() == 0 || inst.Y.cols() == 0) {
    throw Error(ErrorCode::ShapeMismatch, "instance has an empty B or Y");
  }
  if (inst.B.rows() != inst.Y.rows()) {
    throw Error(ErrorCode::ShapeMismatch, "B has " + std::to_string(inst.B.rows()) +
                                              " rows but Y has " + std::to_string(inst.Y.rows()));
  }
  require_finite(inst.B, "B");
  require_finite(inst.Y, "Y");
  if (!(inst.sigma >= 0.0)) throw Error(ErrorCode::InvalidConfig, "sigma must be >= 0");
  if (inst.partition && inst.partition->total() != inst.n()) {
    throw Error(ErrorCode::ShapeMismatch, "partition does not cover the rows of B");
  }
  if (inst.truth) {
    if (inst.truth->P_star.size() != inst.n() ||
        inst.truth->X_star.rows() != inst.B.cols() || inst.truth->X_star.cols() != inst.Y.cols()) {
      throw Error(ErrorCode::ShapeMismatch, "ground truth does not match instance shape");
    }
  }
}

ProblemInstance generate(const SynthConfig& cfg) {
  if (cfg.n == 0 || cfg.d == 0 || cfg.m == 0) {
    throw Error(ErrorCode::InvalidConfig, "n, d and m must all be positive");
  }
  if (!(cfg.sigma >= 0.0)) throw Error(ErrorCode::InvalidConfig, "sigma must be >= 0");

  const Rng root(cfg.seed);
  Rng b_stream = root.split(1), x_stream = root.split(2), p_stream = root.split(3),
      w_stream = root.split(4);
  const auto n = static_cast<Eigen::Index>(cfg.n), d = static_cast<Eigen::Index>(cfg.d),
             m = static_cast<Eigen::Index>(cfg.m);

  ProblemInstance inst;
  inst.B = cfg.B_dist == MeasurementDist::Gaussian ? gaussian_matrix(n, d, b_stream)
                                                   : uniform01_matrix(n, d, b_stream);
  Matrix X_star = gaussian_matrix(d, m, x_stream);
  Permutation P_star = sample(cfg.model, cfg.n, p_stream);
  const Matrix W = gaussian_matrix(n, m, w_stream);
  inst.Y = apply(P_star, inst.B * X_star) + cfg.sigma * W;
  inst.sigma = cfg.sigma;
  if (const auto* rl = std::get_if<RLocalModel>(&cfg.model)) inst.partition = rl->partition;
  inst.truth = GroundTruth{std::move(P_star), std::move(X_star)};
  return inst;
}

// ---- CSV ------------------------------------------------------------------

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  s = s.substr(first, last - first + 1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return std::string(s);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, comma == std::string::npos
                                                                  ? std::string::npos
                                                                  : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::optional<double> parse_number(const std::string& field) {
  if (field.empty()) return std::nullopt;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (*first == '+') ++first;
  double value = 0;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return value;
}

bool blank(const std::string& line) { return line.find_first_not_of(" \t\r") == std::string::npos; }

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return in;
}

}  // namespace

Matrix read_matrix_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0, width = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    const std::vector<std::string> fields = split_fields(line);
    if (first) {
      first = false;
      if (!parse_number(fields[0])) {
        width = fields.size();
        continue;  // header
      }
    }
    if (width != 0 && fields.size() != width) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": expected " +
                                             std::to_string(width) + " fields, got " +
                                             std::to_string(fields.size()));
    }
    width = fields.size();
    std::vector<double> row;
    row.reserve(width);
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const auto v = parse_number(fields[c]);
      if (!v) {
        throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ", column " +
                                               std::to_string(c + 1) + ": not a number: '" +
                                               fields[c] + "'");
      }
      row.push_back(*v);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorCode::ParseError, "matrix CSV has no data rows");
  Matrix M(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < width; ++j)
      M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return M;
}

Matrix read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  try {
    return read_matrix_csv(in);
  } catch (const Error& e) {
    const std::string what = e.what();
    const std::size_t skip = to_string(e.code()).size() + 2;
    throw Error(e.code(), path.filename().string() + ": " + what.substr(std::min(skip, what.size())));
  }
}

void write_matrix_csv(const std::filesystem::path& path, const Matrix& M) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      if (j) out << ',';
      out << M(i, j);
    }
    out << '\n';
  }
}

// ---- ingestion --------------------------------------------------------------

ProblemInstance ingest_csv(std::istream& in, const IngestOptions& opt) {
  if (opt.block_rule.columns.empty()) {
    throw Error(ErrorCode::EmptyBlockRule, "block rule names no key columns");
  }
  if (opt.target_cols.empty() || (opt.feature_cols.empty() && !opt.intercept)) {
    throw Error(ErrorCode::InvalidConfig, "need at least one target and one feature column");
  }

  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> header;
  while (header.empty() && std::getline(in, line)) {
    ++lineno;
    if (!blank(line)) header = split_fields(line);
  }
  if (header.empty()) throw Error(ErrorCode::ParseError, "CSV is empty");

  auto column_index = [&](const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw Error(ErrorCode::ParseError, "line 1: no column named '" + name + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
  };
  auto indices = [&](const std::vector<std::string>& names) {
    std::vector<std::size_t> idx;
    for (const auto& nm : names) idx.push_back(column_index(nm));
    return idx;
  };
  const auto target_idx = indices(opt.target_cols);
  const auto feature_idx = indices(opt.feature_cols);
  const auto key_idx = indices(opt.block_rule.columns);

  std::vector<std::vector<double>> targets, features;
  std::vector<std::vector<long long>> keys;
  const double scale = std::pow(10.0, opt.block_rule.decimals);

  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    const std::vector<std::string> fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": expected " +
                                             std::to_string(header.size()) + " fields, got " +
                                             std::to_string(fields.size()));
    }
    auto numeric = [&](std::size_t c) {
      const auto v = parse_number(fields[c]);
      if (!v || !std::isfinite(*v)) {
        throw Error(ErrorCode::NonNumeric, "line " + std::to_string(lineno) + ", column " +
                                               std::to_string(c + 1) + " ('" + header[c] +
                                               "'): '" + fields[c] + "'");
      }
      return *v;
    };
    std::vector<double> t, f;
    std::vector<long long> k;
    for (auto c : target_idx) t.push_back(numeric(c));
    for (auto c : feature_idx) f.push_back(numeric(c));
    for (auto c : key_idx) k.push_back(std::llround(numeric(c) * scale));  // half away from zero
    targets.push_back(std::move(t));
    features.push_back(std::move(f));
    keys.push_back(std::move(k));
  }
  if (targets.empty()) throw Error(ErrorCode::ParseError, "CSV has a header but no data rows");

  const std::size_t n = targets.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });

  std::vector<std::size_t> sizes;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == 0 || keys[order[i]] != keys[order[i - 1]]) sizes.push_back(0);
    ++sizes.back();
  }

  const Eigen::Index d = static_cast<Eigen::Index>(feature_idx.size() + (opt.intercept ? 1 : 0));
  const Eigen::Index m = static_cast<Eigen::Index>(target_idx.size());
  ProblemInstance inst;
  inst.B.resize(static_cast<Eigen::Index>(n), d);
  Matrix Y_star(static_cast<Eigen::Index>(n), m);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    const auto& src_f = features[order[i]];
    Eigen::Index c = 0;
    if (opt.intercept) inst.B(r, c++) = 1.0;
    for (double v : src_f) inst.B(r, c++) = v;
    for (Eigen::Index j = 0; j < m; ++j) Y_star(r, j) = targets[order[i]][static_cast<std::size_t>(j)];
  }

  BlockPartition partition(std::move(sizes));
  Rng rng(opt.seed);
  Permutation P_star = sample_rlocal(partition, rng);
  inst.Y = apply(P_star, Y_star);
  inst.truth = GroundTruth{std::move(P_star), pinv_solve(inst.B, Y_star)};
  inst.Y_star = std::move(Y_star);
  inst.partition = std::move(partition);
  inst.row_order = std::move(order);
  return inst;
}

ProblemInstance ingest_csv(const std::filesystem::path& path, const IngestOptions& options) {
  std::ifstream in = open_input(path);
  return ingest_csv(in, options);
}

// ---- estimates and metrics ----------------------------------------------------

RegressionEstimates oracle_and_naive(const Matrix& B, const Matrix& Y_star, const Matrix& Y) {
  if (Y_star.rows() != Y.rows() || Y_star.cols() != Y.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "Y* and Y differ in shape");
  }
  const Matrix B_pinv = pseudoinverse(B);
  if (B_pinv.cols() != Y.rows()) throw Error(ErrorCode::ShapeMismatch, "B and Y row counts differ");
  return {B_pinv * Y_star, B_pinv * Y};
}

EvalMetrics evaluate(const Matrix& X_hat, const Matrix& X_ref, const Matrix& B,
                     const Matrix& Y_star, const Permutation* P_hat, const Permutation* P_star) {
  if (X_hat.rows() != X_ref.rows() || X_hat.cols() != X_ref.cols() ||
      B.cols() != X_hat.rows() || B.rows() != Y_star.rows() || Y_star.cols() != X_hat.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "evaluate: inconsistent shapes");
  }
  EvalMetrics out;
  const double ref_norm = X_ref.norm();
  out.relative_error = ref_norm > 0 ? (X_ref - X_hat).norm() / ref_norm : (X_ref - X_hat).norm();
  const double y_norm = Y_star.norm();
  out.r2 = 1.0 - (y_norm > 0 ? (Y_star - B * X_hat).norm() / y_norm : 0.0);
  if (P_hat && P_star) {
    out.frac_distortion = static_cast<double>(hamming_distortion(*P_hat, *P_star)) /
                          static_cast<double>(P_star->size());
  }
  return out;
}

// ---- bundles ------------------------------------------------------------------

nlohmann::json permutation_to_json(const Permutation& p) { return p.map(); }

Permutation permutation_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw Error(ErrorCode::ParseError, "permutation must be a JSON array");
  std::vector<std::size_t> map;
  for (const auto& v : j) {
    if (!v.is_number_unsigned()) {
      throw Error(ErrorCode::ParseError, "permutation entries must be nonnegative integers");
    }
    map.push_back(v.get<std::size_t>());
  }
  return Permutation(std::move(map));
}

nlohmann::json model_to_json(const PermutationModel& model) {
  if (const auto* rl = std::get_if<RLocalModel>(&model)) {
    return {{"type", "rlocal"}, {"partition", rl->partition.sizes()},
            {"r_max", rl->partition.max_size()}};
  }
  return {{"type", "ksparse"}, {"k", std::get<KSparseModel>(model).k}};
}

namespace {

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError, path.filename().string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace

void write_bundle(const std::filesystem::path& dir, const ProblemInstance& inst,
                  const nlohmann::json& meta_in) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());

  write_matrix_csv(dir / "B.csv", inst.B);
  write_matrix_csv(dir / "Y.csv", inst.Y);
  if (inst.Y_star) write_matrix_csv(dir / "Ystar.csv", *inst.Y_star);

  nlohmann::json meta = meta_in;
  meta["sigma"] = inst.sigma;
  if (inst.partition) meta["partition"] = inst.partition->sizes();
  write_json(dir / "meta.json", meta);

  if (inst.truth) {
    write_matrix_csv(dir / "Xstar.csv", inst.truth->X_star);
    nlohmann::json truth;
    truth["permutation"] = permutation_to_json(inst.truth->P_star);
    if (inst.partition) truth["partition"] = inst.partition->sizes();
    write_json(dir / "truth.json", truth);
  }
}

ProblemInstance read_bundle(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw Error(ErrorCode::Io, dir.string() + " is not a directory");
  }
  ProblemInstance inst;
  inst.B = read_matrix_csv(dir / "B.csv");
  inst.Y = read_matrix_csv(dir / "Y.csv");
  if (std::filesystem::exists(dir / "Ystar.csv")) inst.Y_star = read_matrix_csv(dir / "Ystar.csv");

  auto partition_from = [](const nlohmann::json& j) -> std::optional<BlockPartition> {
    if (!j.contains("partition")) return std::nullopt;
    try {
      return BlockPartition(j.at("partition").get<std::vector<std::size_t>>());
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ParseError, std::string("partition: ") + e.what());
    }
  };
  if (std::filesystem::exists(dir / "meta.json")) {
    const nlohmann::json meta = read_json(dir / "meta.json");
    if (meta.contains("sigma") && meta["sigma"].is_number()) inst.sigma = meta["sigma"].get<double>();
    inst.partition = partition_from(meta);
  }
  if (std::filesystem::exists(dir / "truth.json")) {
    const nlohmann::json truth = read_json(dir / "truth.json");
    if (!inst.partition) inst.partition = partition_from(truth);
    if (truth.contains("permutation") && std::filesystem::exists(dir / "Xstar.csv")) {
      inst.truth = GroundTruth{permutation_from_json(truth["permutation"]),
                               read_matrix_csv(dir / "Xstar.csv")};
    }
  }
  validate(inst);
  return inst;
}

}  // namespace altmin
