#pragma once

// Right-censored regression data: ingestion, validation, standardization.

#include <Eigen/Core>

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "survboost/errors.hpp"

namespace survboost {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using StatusVector = Eigen::VectorXi;

inline std::span<const double> as_span(const Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}
inline std::span<const int> as_span(const StatusVector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

/// Observed triples (U, Delta, X). Immutable once constructed; the
/// constructor enforces every invariant and throws DataError otherwise.
class SurvivalDataset {
 public:
  SurvivalDataset(Vector time, StatusVector status, Matrix covariates,
                  std::vector<std::string> column_names = {})
      : time_(std::move(time)),
        status_(std::move(status)),
        covariates_(std::move(covariates)),
        column_names_(std::move(column_names)) {
    if (column_names_.empty()) {
      for (Eigen::Index j = 0; j < covariates_.cols(); ++j)
        column_names_.push_back("x" + std::to_string(j + 1));
    }
    validate();
  }

  std::size_t n() const { return static_cast<std::size_t>(time_.size()); }
  std::size_t d() const { return static_cast<std::size_t>(covariates_.cols()); }
  const Vector& time() const { return time_; }
  const StatusVector& status() const { return status_; }
  const Matrix& covariates() const { return covariates_; }
  const std::vector<std::string>& column_names() const { return column_names_; }

  std::size_t event_count() const {
    return static_cast<std::size_t>(status_.sum());
  }

  /// Rows in the given order (indices may repeat). A single row is allowed
  /// here so that leave-one-out folds can be held out.
  SurvivalDataset subset(std::span<const std::size_t> rows) const {
    if (rows.empty()) throw DataError("empty row subset");
    Vector t(rows.size());
    StatusVector s(rows.size());
    Matrix x(rows.size(), covariates_.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const auto i = static_cast<Eigen::Index>(rows[r]);
      t(r) = time_(i);
      s(r) = status_(i);
      x.row(r) = covariates_.row(i);
    }
    if (rows.size() == 1) return SurvivalDataset(std::move(t), std::move(s), std::move(x), column_names_, Unchecked{});
    return {std::move(t), std::move(s), std::move(x), column_names_};
  }

  SurvivalDataset with_covariates(Matrix covariates) const {
    return {time_, status_, std::move(covariates), column_names_};
  }

 private:
  struct Unchecked {};
  SurvivalDataset(Vector time, StatusVector status, Matrix covariates, std::vector<std::string> names, Unchecked)
      : time_(std::move(time)), status_(std::move(status)), covariates_(std::move(covariates)),
        column_names_(std::move(names)) {}

  void validate() const {
    if (status_.size() != time_.size() || covariates_.rows() != time_.size())
      throw DataError("row count mismatch between time, status and covariates");
    if (time_.size() < 2) throw DataError("fewer than 2 rows");
    if (covariates_.cols() < 1) throw DataError("no predictor columns");
    if (column_names_.size() != d())
      throw DataError("column name count does not match predictor count");
    for (Eigen::Index i = 0; i < time_.size(); ++i) {
      if (!std::isfinite(time_(i)) || time_(i) <= 0.0)
        throw DataError("non-positive time at row " + std::to_string(i + 1));
      if (status_(i) != 0 && status_(i) != 1)
        throw DataError("status outside {0,1} at row " + std::to_string(i + 1));
    }
    if (!covariates_.allFinite())
      throw DataError("non-finite covariate value");
  }

  Vector time_;
  StatusVector status_;
  Matrix covariates_;
  std::vector<std::string> column_names_;
};

/// Column centring and scaling (sample standard deviation, n - 1).
struct Standardization {
  Vector means;
  Vector scales;

  Matrix apply(const Matrix& x) const {
    if (x.cols() != means.size())
      throw DataError("standardization dimension mismatch");
    return (x.rowwise() - means.transpose()).array().rowwise() /
           scales.transpose().array();
  }

  Matrix invert(const Matrix& z) const {
    if (z.cols() != means.size())
      throw DataError("standardization dimension mismatch");
    return (z.array().rowwise() * scales.transpose().array()).matrix()
               .rowwise() +
           means.transpose();
  }

  static Standardization identity(std::size_t d) {
    return {Vector::Zero(static_cast<Eigen::Index>(d)),
            Vector::Ones(static_cast<Eigen::Index>(d))};
  }
};

inline Standardization fit_standardization(const SurvivalDataset& data) {
  const Matrix& x = data.covariates();
  const double n = static_cast<double>(x.rows());
  Standardization st{x.colwise().mean().transpose(), Vector(x.cols())};
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double ss = (x.col(j).array() - st.means(j)).square().sum();
    const double sd = std::sqrt(ss / (n - 1.0));
    if (!(sd > 1e-12 * std::max(1.0, std::abs(st.means(j)))))
      throw DataError("constant covariate column '" +
                      data.column_names()[static_cast<std::size_t>(j)] + "'");
    st.scales(j) = sd;
  }
  return st;
}

inline std::pair<SurvivalDataset, Standardization> standardize(
    const SurvivalDataset& data) {
  Standardization st = fit_standardization(data);
  return {data.with_covariates(st.apply(data.covariates())), std::move(st)};
}

inline Vector log_times(const SurvivalDataset& data) {
  return data.time().array().log();
}

namespace detail {

inline std::vector<std::string_view> split_line(std::string_view line,
                                                char delimiter) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delimiter, start);
    cells.push_back(line.substr(start, pos == std::string_view::npos
                                           ? std::string_view::npos
                                           : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return cells;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

inline double parse_number(std::string_view cell, std::size_t line_no) {
  cell = trim(cell);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (cell.empty() || ec != std::errc{} || ptr != cell.data() + cell.size())
    throw DataError("non-numeric cell '" + std::string(cell) + "' on line " +
                    std::to_string(line_no));
  return value;
}

}  // namespace detail

/// Reads a delimited file with one header row. The time and status columns
/// are picked by label; every other column becomes a predictor, in file order.
inline SurvivalDataset load_delimited(const std::string& path,
                                      const std::string& time_col,
                                      const std::string& status_col,
                                      char delimiter = ',') {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    for (auto cell : detail::split_line(line, delimiter))
      header.emplace_back(detail::trim(cell));
    break;
  }
  if (header.empty()) throw DataError("'" + path + "' has no header row");
  if (!header.empty() && header[0].starts_with("\xEF\xBB\xBF"))
    header[0].erase(0, 3);

  std::ptrdiff_t time_idx = -1, status_idx = -1;
  std::vector<std::size_t> predictor_idx;
  std::vector<std::string> names;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == time_col && time_idx < 0) {
      time_idx = static_cast<std::ptrdiff_t>(c);
    } else if (header[c] == status_col && status_idx < 0) {
      status_idx = static_cast<std::ptrdiff_t>(c);
    } else {
      predictor_idx.push_back(c);
      names.push_back(header[c]);
    }
  }
  if (time_idx < 0) throw DataError("missing column '" + time_col + "'");
  if (status_idx < 0) throw DataError("missing column '" + status_col + "'");

  std::vector<double> times, cells;
  std::vector<int> statuses;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto row = detail::split_line(line, delimiter);
    if (row.size() != header.size())
      throw DataError("line " + std::to_string(line_no) + " has " +
                      std::to_string(row.size()) + " cells, expected " +
                      std::to_string(header.size()));
    const double t = detail::parse_number(row[static_cast<std::size_t>(time_idx)], line_no);
    const double s = detail::parse_number(row[static_cast<std::size_t>(status_idx)], line_no);
    if (!(t > 0.0) || !std::isfinite(t))
      throw DataError("non-positive time on line " + std::to_string(line_no));
    if (s != 0.0 && s != 1.0)
      throw DataError("status outside {0,1} on line " + std::to_string(line_no));
    times.push_back(t);
    statuses.push_back(static_cast<int>(s));
    for (auto c : predictor_idx) cells.push_back(detail::parse_number(row[c], line_no));
  }
  const auto n = static_cast<Eigen::Index>(times.size());
  if (n < 2) throw DataError("fewer than 2 rows in '" + path + "'");
  const auto d = static_cast<Eigen::Index>(predictor_idx.size());
  Matrix x(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j) x(i, j) = cells[static_cast<std::size_t>(i * d + j)];
  return {Eigen::Map<Vector>(times.data(), n),
          Eigen::Map<StatusVector>(statuses.data(), n), std::move(x),
          std::move(names)};
}

}  // namespace survboost
