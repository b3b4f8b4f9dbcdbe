#pragma once

// Base procedures fitted to pseudo-responses in every boosting round.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "survboost/errors.hpp"
#include "survboost/survdata.hpp"

namespace survboost {

struct BaseLearnerKind {
  enum class Type { ComponentwiseLinear, Stump, Tree };
  Type type = Type::ComponentwiseLinear;
  int max_depth = 1;

  static BaseLearnerKind linear() { return {Type::ComponentwiseLinear, 0}; }
  static BaseLearnerKind stump() { return {Type::Stump, 1}; }
  static BaseLearnerKind tree(int depth) {
    if (depth < 1 || depth > 6)
      throw UsageError("tree depth must lie in [1, 6], got " + std::to_string(depth));
    return {Type::Tree, depth};
  }

  bool is_linear() const { return type == Type::ComponentwiseLinear; }
  int depth() const { return type == Type::Stump ? 1 : max_depth; }

  friend bool operator==(const BaseLearnerKind&, const BaseLearnerKind&) = default;
};

inline std::string_view to_string(BaseLearnerKind::Type type) {
  switch (type) {
    case BaseLearnerKind::Type::ComponentwiseLinear: return "linear";
    case BaseLearnerKind::Type::Stump: return "stump";
    case BaseLearnerKind::Type::Tree: return "tree";
  }
  return "?";
}

inline BaseLearnerKind parse_learner(std::string_view name, int tree_depth = 2) {
  if (name == "linear") return BaseLearnerKind::linear();
  if (name == "stump") return BaseLearnerKind::stump();
  if (name == "tree") return BaseLearnerKind::tree(tree_depth);
  throw UsageError("unknown learner '" + std::string(name) + "'");
}

/// g(x) = slope * x[column].
struct LinearUpdate {
  std::size_t column = 0;
  double slope = 0.0;

  friend bool operator==(const LinearUpdate&, const LinearUpdate&) = default;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  // mean pseudo-response of the node's training rows

  bool is_leaf() const { return feature < 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

/// Binary regression tree; node 0 is the root. Rows with
/// x[feature] <= threshold go left.
struct TreeUpdate {
  std::vector<TreeNode> nodes;

  std::size_t leaf_count() const {
    return static_cast<std::size_t>(
        std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.is_leaf(); }));
  }
  friend bool operator==(const TreeUpdate&, const TreeUpdate&) = default;
};

using FittedLearner = std::variant<LinearUpdate, TreeUpdate>;

// ---------------------------------------------------------------------------

/// Componentwise least squares with cached column norms, for repeated fits
/// against the same design.
class ComponentwiseLinearFitter {
 public:
  explicit ComponentwiseLinearFitter(const Matrix& x)
      : x_(&x), squared_norms_(x.colwise().squaredNorm().transpose()) {
    for (Eigen::Index j = 0; j < squared_norms_.size(); ++j)
      if (!(squared_norms_(j) > 0.0))
        throw DataError("column " + std::to_string(j) + " is identically zero");
  }

  /// Column minimizing ||z - slope_j x_j||^2; ties go to the smallest index.
  LinearUpdate fit(const Vector& z) const {
    const Vector cross = x_->transpose() * z;
    LinearUpdate best{0, cross(0) / squared_norms_(0)};
    double best_reduction = cross(0) * cross(0) / squared_norms_(0);
    for (Eigen::Index j = 1; j < cross.size(); ++j) {
      const double reduction = cross(j) * cross(j) / squared_norms_(j);
      if (reduction > best_reduction) {
        best_reduction = reduction;
        best = {static_cast<std::size_t>(j), cross(j) / squared_norms_(j)};
      }
    }
    return best;
  }

 private:
  const Matrix* x_;
  Vector squared_norms_;
};

inline LinearUpdate fit_componentwise_linear(const Vector& z, const Matrix& x) {
  if (z.size() != x.rows()) throw UsageError("fit_componentwise_linear: row mismatch");
  return ComponentwiseLinearFitter(x).fit(z);
}

namespace detail {

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
  std::size_t left_count = 0;
};

// Best least-squares split of `rows`: maximizes S_L^2/n_L + S_R^2/n_R, which
// is the reduction in within-child squared error. Candidates are midpoints
// between consecutive distinct values, scanned by column then threshold, and
// only strictly better candidates replace the incumbent. Gains within rounding
// of each other count as ties (the same partition reached via two columns).
inline SplitChoice best_split(const Vector& z, const Matrix& x,
                              std::span<const std::size_t> rows) {
  const std::size_t m = rows.size();
  double total = 0.0;
  for (auto i : rows) total += z(static_cast<Eigen::Index>(i));
  const double mean = total / static_cast<double>(m);
  double parent_sse = 0.0;
  for (auto i : rows) {
    const double r = z(static_cast<Eigen::Index>(i)) - mean;
    parent_sse += r * r;
  }
  SplitChoice best;
  if (!(parent_sse > 0.0)) return best;
  const double base = total * total / static_cast<double>(m);
  const double tie = 1e-12 * parent_sse;

  std::vector<std::size_t> sorted(rows.begin(), rows.end());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    std::stable_sort(sorted.begin(), sorted.end(), [&](std::size_t a, std::size_t b) {
      return x(static_cast<Eigen::Index>(a), j) < x(static_cast<Eigen::Index>(b), j);
    });
    double left_sum = 0.0;
    for (std::size_t q = 0; q + 1 < m; ++q) {
      left_sum += z(static_cast<Eigen::Index>(sorted[q]));
      const double lo = x(static_cast<Eigen::Index>(sorted[q]), j);
      const double hi = x(static_cast<Eigen::Index>(sorted[q + 1]), j);
      if (!(lo < hi)) continue;
      const double nl = static_cast<double>(q + 1);
      const double nr = static_cast<double>(m - q - 1);
      const double right_sum = total - left_sum;
      const double gain = left_sum * left_sum / nl + right_sum * right_sum / nr - base;
      if (gain > best.gain + tie) {
        double threshold = lo + (hi - lo) / 2.0;
        if (!(threshold < hi)) threshold = lo;
        best = {static_cast<int>(j), threshold, gain, q + 1};
      }
    }
  }
  if (!(best.gain > tie)) best.feature = -1;
  return best;
}

inline int grow_tree(const Vector& z, const Matrix& x, std::vector<std::size_t> rows,
                     int depth_left, std::vector<TreeNode>& nodes) {
  const int id = static_cast<int>(nodes.size());
  double sum = 0.0;
  for (auto i : rows) sum += z(static_cast<Eigen::Index>(i));
  nodes.push_back({-1, 0.0, -1, -1, sum / static_cast<double>(rows.size())});
  if (depth_left <= 0 || rows.size() < 2) return id;
  const SplitChoice split = best_split(z, x, rows);
  if (split.feature < 0) return id;

  std::vector<std::size_t> left_rows, right_rows;
  for (auto i : rows) {
    if (x(static_cast<Eigen::Index>(i), split.feature) <= split.threshold)
      left_rows.push_back(i);
    else
      right_rows.push_back(i);
  }
  nodes[static_cast<std::size_t>(id)].feature = split.feature;
  nodes[static_cast<std::size_t>(id)].threshold = split.threshold;
  const int left = grow_tree(z, x, std::move(left_rows), depth_left - 1, nodes);
  const int right = grow_tree(z, x, std::move(right_rows), depth_left - 1, nodes);
  nodes[static_cast<std::size_t>(id)].left = left;
  nodes[static_cast<std::size_t>(id)].right = right;
  return id;
}

}  // namespace detail

/// Greedy least-squares regression tree. A stump is max_depth = 1.
inline TreeUpdate fit_tree(const Vector& z, const Matrix& x, int max_depth) {
  if (z.size() != x.rows()) throw UsageError("fit_tree: row mismatch");
  if (z.size() < 1) throw UsageError("fit_tree: no rows");
  std::vector<std::size_t> rows(static_cast<std::size_t>(z.size()));
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  TreeUpdate tree;
  detail::grow_tree(z, x, std::move(rows), max_depth, tree.nodes);
  return tree;
}

inline FittedLearner fit_learner(const BaseLearnerKind& kind, const Vector& z,
                                 const Matrix& x) {
  if (kind.is_linear()) return fit_componentwise_linear(z, x);
  return fit_tree(z, x, kind.depth());
}

// ---------------------------------------------------------------------------

template <typename Row>
double predict_tree(const TreeUpdate& tree, const Row& x) {
  std::size_t node = 0;
  while (!tree.nodes[node].is_leaf()) {
    const TreeNode& n = tree.nodes[node];
    node = static_cast<std::size_t>(x[static_cast<Eigen::Index>(n.feature)] <= n.threshold
                                        ? n.left
                                        : n.right);
  }
  return tree.nodes[node].value;
}

inline double predict_learner(const FittedLearner& learner, std::span<const double> x) {
  if (const auto* lin = std::get_if<LinearUpdate>(&learner)) {
    if (lin->column >= x.size()) throw UsageError("predict_learner: dimension mismatch");
    return lin->slope * x[lin->column];
  }
  const auto& tree = std::get<TreeUpdate>(learner);
  return predict_tree(tree, Eigen::Map<const Vector>(x.data(), static_cast<Eigen::Index>(x.size())));
}

/// Row-wise predictions for a whole design matrix.
inline Vector predict_learner_rows(const FittedLearner& learner, const Matrix& x) {
  if (const auto* lin = std::get_if<LinearUpdate>(&learner)) {
    if (static_cast<Eigen::Index>(lin->column) >= x.cols())
      throw UsageError("predict_learner: dimension mismatch");
    return lin->slope * x.col(static_cast<Eigen::Index>(lin->column));
  }
  const auto& tree = std::get<TreeUpdate>(learner);
  Vector out(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) out(i) = predict_tree(tree, x.row(i));
  return out;
}

}  // namespace survboost
