#pragma once

// Side-by-side coefficient tables and active-set differences.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "survboost/errors.hpp"
#include "survboost/metrics.hpp"
#include "survboost/survdata.hpp"

namespace survboost {

/// 100 * |c| / max |c| within one coefficient vector; empty optionals for
/// exact zeros. The largest magnitude maps to 100.
inline std::vector<std::optional<double>> relative_proportions(const Vector& coefficients) {
  const double largest = coefficients.size() == 0 ? 0.0 : coefficients.cwiseAbs().maxCoeff();
  std::vector<std::optional<double>> out(static_cast<std::size_t>(coefficients.size()));
  for (Eigen::Index j = 0; j < coefficients.size(); ++j)
    if (coefficients(j) != 0.0)
      out[static_cast<std::size_t>(j)] = 100.0 * std::abs(coefficients(j)) / largest;
  return out;
}

struct CoefficientRow {
  std::size_t column = 0;
  std::string name;
  std::vector<std::optional<double>> coefficient;         // per loss
  std::vector<std::optional<double>> relative_proportion;  // per loss
};

struct CoefficientTable {
  std::vector<std::string> losses;
  std::vector<CoefficientRow> rows;
};

/// One row per column active under any loss, ordered by the largest relative
/// proportion across losses (descending), then by column index.
inline CoefficientTable build_coefficient_table(const std::vector<std::string>& column_names,
                                                const std::vector<std::string>& losses,
                                                const std::vector<Vector>& coefficients) {
  if (losses.size() != coefficients.size())
    throw UsageError("coefficient table: one coefficient vector per loss");
  CoefficientTable table;
  table.losses = losses;
  std::vector<std::vector<std::optional<double>>> props;
  for (const auto& c : coefficients) {
    if (static_cast<std::size_t>(c.size()) != column_names.size())
      throw UsageError("coefficient table: dimension mismatch");
    props.push_back(relative_proportions(c));
  }
  for (std::size_t j = 0; j < column_names.size(); ++j) {
    CoefficientRow row{j, column_names[j], {}, {}};
    bool active = false;
    for (std::size_t l = 0; l < losses.size(); ++l) {
      const double c = coefficients[l](static_cast<Eigen::Index>(j));
      row.coefficient.push_back(c != 0.0 ? std::optional<double>(c) : std::nullopt);
      row.relative_proportion.push_back(props[l][j]);
      active = active || c != 0.0;
    }
    if (active) table.rows.push_back(std::move(row));
  }
  auto peak = [](const CoefficientRow& r) {
    double best = 0.0;
    for (const auto& p : r.relative_proportion) best = std::max(best, p.value_or(0.0));
    return best;
  };
  std::stable_sort(table.rows.begin(), table.rows.end(),
                   [&](const CoefficientRow& a, const CoefficientRow& b) { return peak(a) > peak(b); });
  return table;
}

/// CSV; inactive entries render as "-".
inline void write_coefficient_table(std::ostream& out, const CoefficientTable& table) {
  out << "name";
  for (const auto& l : table.losses) out << ',' << l << ',' << l << "_rel_prop";
  out << '\n';
  for (const auto& row : table.rows) {
    out << row.name;
    for (std::size_t l = 0; l < table.losses.size(); ++l) {
      out << ',' << (row.coefficient[l] ? fixed(*row.coefficient[l], 6) : "-");
      out << ',' << (row.relative_proportion[l] ? fixed(*row.relative_proportion[l], 1) : "-");
    }
    out << '\n';
  }
}

struct NamedActiveSet {
  std::string label;
  std::set<std::size_t> members;
};

/// differences[a][b] = |A - B|; the diagonal is left unset.
struct SetDifferenceMatrix {
  std::vector<std::string> labels;
  std::vector<std::size_t> totals;
  std::vector<std::vector<std::optional<std::size_t>>> differences;
};

inline SetDifferenceMatrix set_differences(const std::vector<NamedActiveSet>& sets) {
  SetDifferenceMatrix m;
  for (const auto& s : sets) {
    m.labels.push_back(s.label);
    m.totals.push_back(s.members.size());
  }
  m.differences.assign(sets.size(), std::vector<std::optional<std::size_t>>(sets.size()));
  for (std::size_t a = 0; a < sets.size(); ++a)
    for (std::size_t b = 0; b < sets.size(); ++b) {
      if (a == b) continue;
      std::size_t only_a = 0;
      for (auto j : sets[a].members) only_a += sets[b].members.count(j) == 0 ? 1 : 0;
      m.differences[a][b] = only_a;
    }
  return m;
}

inline void write_set_differences(std::ostream& out, const SetDifferenceMatrix& m) {
  out << "set_a,total";
  for (const auto& l : m.labels) out << ',' << l;
  out << '\n';
  for (std::size_t a = 0; a < m.labels.size(); ++a) {
    out << m.labels[a] << ',' << m.totals[a];
    for (std::size_t b = 0; b < m.labels.size(); ++b)
      out << ',' << (m.differences[a][b] ? std::to_string(*m.differences[a][b]) : "-");
    out << '\n';
  }
}

}  // namespace survboost
