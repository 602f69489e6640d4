#include "altmin/assignment.hpp"

#include "altmin/error.hpp"

#include <limits>
#include <string>
#include <vector>

namespace altmin {

namespace {

// Minimum-cost perfect matching on a dense row-major n x n cost array.
// Returns col_of_row. Potentials u (rows) and v (columns) stay dual feasible:
// cost(i, j) - u[i] - v[j] >= 0, with equality on matched pairs.
std::vector<std::size_t> min_cost_matching(const std::vector<double>& cost, std::size_t n) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  constexpr std::size_t none = std::numeric_limits<std::size_t>::max();

  std::vector<double> u(n, 0.0), v(n, 0.0);
  std::vector<std::size_t> row_of_col(n, none), col_of_row(n, none);

  // Column reduction: v[j] = min_i cost(i, j). Keeps reduced costs >= 0.
  for (std::size_t j = 0; j < n; ++j) {
    double best = inf;
    for (std::size_t i = 0; i < n; ++i) best = std::min(best, cost[i * n + j]);
    v[j] = best;
  }

  std::vector<double> dist(n);
  std::vector<std::size_t> pred(n);
  std::vector<char> done(n);
  std::vector<std::size_t> scanned;
  scanned.reserve(n);

  for (std::size_t root = 0; root < n; ++root) {
    // Dijkstra over columns from the free row `root` on reduced costs.
    for (std::size_t j = 0; j < n; ++j) {
      dist[j] = cost[root * n + j] - u[root] - v[j];
      pred[j] = root;
      done[j] = 0;
    }
    scanned.clear();
    std::size_t sink = none;
    double reach = 0.0;
    while (sink == none) {
      std::size_t jmin = none;
      double dmin = inf;
      for (std::size_t j = 0; j < n; ++j) {
        if (done[j]) continue;
        // Prefer a free column on ties: it ends the search early.
        if (dist[j] < dmin || (dist[j] == dmin && jmin != none && row_of_col[j] == none &&
                               row_of_col[jmin] != none)) {
          dmin = dist[j];
          jmin = j;
        }
      }
      done[jmin] = 1;
      scanned.push_back(jmin);
      if (row_of_col[jmin] == none) {
        sink = jmin;
        reach = dmin;
        break;
      }
      const std::size_t i = row_of_col[jmin];
      const double* row = &cost[i * n];
      for (std::size_t j = 0; j < n; ++j) {
        if (done[j]) continue;
        const double d = dmin + row[j] - u[i] - v[j];
        if (d < dist[j]) {
          dist[j] = d;
          pred[j] = i;
        }
      }
    }

    // Dual update on the scanned tree keeps complementary slackness.
    for (std::size_t j : scanned) {
      if (j == sink) continue;
      const double delta = reach - dist[j];
      v[j] -= delta;
      u[row_of_col[j]] += delta;
    }
    u[root] += reach;

    // Augment along predecessors.
    std::size_t j = sink;
    while (true) {
      const std::size_t i = pred[j];
      row_of_col[j] = i;
      const std::size_t prev = col_of_row[i];
      col_of_row[i] = j;
      if (i == root) break;
      j = prev;
    }
  }
  return col_of_row;
}

}  // namespace

Assignment solve_lap(const Matrix& reward) {
  if (reward.rows() != reward.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "solve_lap: reward is " +
                                              std::to_string(reward.rows()) + "x" +
                                              std::to_string(reward.cols()));
  }
  require_finite(reward, "assignment reward");
  const auto n = static_cast<std::size_t>(reward.rows());
  if (n == 0) return {Permutation{}, 0.0};

  std::vector<double> cost(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      cost[i * n + j] = -reward(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));

  std::vector<std::size_t> col_of_row = min_cost_matching(cost, n);
  double value = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    value += reward(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(col_of_row[i]));
  return {Permutation(std::move(col_of_row)), value};
}

Permutation solve_blockwise(std::span<const Matrix> blocks, const BlockPartition& partition) {
  if (blocks.size() != partition.count()) {
    throw Error(ErrorCode::ShapeMismatch, "solve_blockwise: " + std::to_string(blocks.size()) +
                                              " rewards for " +
                                              std::to_string(partition.count()) + " blocks");
  }
  std::vector<std::size_t> map(partition.total());
  for (std::size_t b = 0; b < partition.count(); ++b) {
    const auto r = static_cast<Eigen::Index>(partition.size(b));
    if (blocks[b].rows() != r || blocks[b].cols() != r) {
      throw Error(ErrorCode::ShapeMismatch,
                  "solve_blockwise: block " + std::to_string(b) + " reward is " +
                      std::to_string(blocks[b].rows()) + "x" + std::to_string(blocks[b].cols()) +
                      ", expected " + std::to_string(r) + "x" + std::to_string(r));
    }
    const Assignment local = solve_lap(blocks[b]);
    const std::size_t off = partition.offset(b);
    for (std::size_t i = 0; i < partition.size(b); ++i) map[off + i] = off + local.permutation[i];
  }
  return Permutation(std::move(map));
}

}  // namespace altmin
