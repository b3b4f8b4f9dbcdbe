#pragma once

// Random instances and slow reference implementations shared by the tests.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "survboost/survboost.hpp"

namespace testing_support {

using survboost::Matrix;
using survboost::StatusVector;
using survboost::Vector;

inline Vector normal_vector(std::size_t n, std::mt19937_64& rng, double sd = 1.0) {
  std::normal_distribution<double> nd(0.0, sd);
  Vector v(static_cast<Eigen::Index>(n));
  for (auto& x : v) x = nd(rng);
  return v;
}

inline Matrix normal_matrix(std::size_t n, std::size_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = nd(rng);
  return m;
}

inline StatusVector bernoulli_status(std::size_t n, double p_event, std::mt19937_64& rng) {
  std::bernoulli_distribution b(p_event);
  StatusVector s(static_cast<Eigen::Index>(n));
  for (auto& x : s) x = b(rng) ? 1 : 0;
  return s;
}

/// Residuals drawn from a small integer grid so ties are frequent.
inline Vector tied_vector(std::size_t n, int levels, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> u(0, levels - 1);
  Vector v(static_cast<Eigen::Index>(n));
  for (auto& x : v) x = 0.5 * u(rng) - 1.0;
  return v;
}

/// Positive times with optional ties, a linear signal and censoring.
inline survboost::SurvivalDataset random_dataset(std::size_t n, std::size_t d, std::mt19937_64& rng,
                                                 double p_event = 0.7) {
  Matrix x = normal_matrix(n, d, rng);
  Vector beta = Vector::Zero(static_cast<Eigen::Index>(d));
  beta(0) = 1.0;
  if (d > 2) beta(2) = -0.5;
  const Vector log_t = x * beta + normal_vector(n, rng, 0.5);
  return {log_t.array().exp().matrix(), bernoulli_status(n, p_event, rng), std::move(x)};
}

// ---- oracles ---------------------------------------------------------------

/// n^-2 sum_i Delta_i sum_j (e_j - e_i) I(e_i <= e_j), as a plain double loop.
inline double gehan_loss_brute(const Vector& e, const StatusVector& s) {
  const Eigen::Index n = e.size();
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (s(i) == 1 && e(i) <= e(j)) total += e(j) - e(i);
  return total / static_cast<double>(n * n);
}

/// -(1/n) sum_{i event} [f_i - log sum_{U_j >= U_i} exp(f_j)], unshifted.
inline double cox_loss_brute(const Vector& f, const Vector& u, const StatusVector& s) {
  const Eigen::Index n = f.size();
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (s(i) != 1) continue;
    double risk = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
      if (u(j) >= u(i)) risk += std::exp(f(j));
    total += f(i) - std::log(risk);
  }
  return -total / static_cast<double>(n);
}

/// Central differences of a scalar function of a vector.
template <typename F>
Vector finite_difference(F&& loss, const Vector& at, double h) {
  Vector g(at.size());
  for (Eigen::Index k = 0; k < at.size(); ++k) {
    Vector plus = at, minus = at;
    plus(k) += h;
    minus(k) -= h;
    g(k) = (loss(plus) - loss(minus)) / (2.0 * h);
  }
  return g;
}

/// Product over censoring times <= t of (1 - 1/at_risk); tie-free input.
inline double km_brute(const Vector& u, const StatusVector& s, double t) {
  double g = 1.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (s(i) != 0 || u(i) > t) continue;
    double at_risk = 0.0;
    for (Eigen::Index j = 0; j < u.size(); ++j) at_risk += u(j) >= u(i) ? 1.0 : 0.0;
    g *= 1.0 - 1.0 / at_risk;
  }
  return g;
}

struct BruteSplit {
  int feature = -1;
  double threshold = 0.0;
  double sse = 0.0;
};

/// Every feature, every midpoint between sorted distinct values; first
/// strictly best in (feature, threshold) order.
inline BruteSplit best_split_brute(const Vector& z, const Matrix& x) {
  auto sse_of = [](const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double m = 0.0;
    for (double a : v) m += a;
    m /= static_cast<double>(v.size());
    double s = 0.0;
    for (double a : v) s += (a - m) * (a - m);
    return s;
  };
  std::vector<double> all(z.data(), z.data() + z.size());
  BruteSplit best{-1, 0.0, sse_of(all)};
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    std::vector<double> vals(x.col(j).data(), x.col(j).data() + x.rows());
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    for (std::size_t k = 0; k + 1 < vals.size(); ++k) {
      const double thr = 0.5 * (vals[k] + vals[k + 1]);
      std::vector<double> l, r;
      for (Eigen::Index i = 0; i < x.rows(); ++i) (x(i, j) <= thr ? l : r).push_back(z(i));
      const double sse = sse_of(l) + sse_of(r);
      if (sse < best.sse - 1e-12 * std::max(1.0, best.sse)) best = {static_cast<int>(j), thr, sse};
    }
  }
  return best;
}

// ---- files -----------------------------------------------------------------

inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("survboost_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

inline void write_dataset_csv(const std::filesystem::path& p, const survboost::SurvivalDataset& data) {
  std::ofstream out(p);
  out << "time,status";
  for (const auto& name : data.column_names()) out << ',' << name;
  out << '\n';
  out.precision(17);
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(data.n()); ++i) {
    out << data.time()(i) << ',' << data.status()(i);
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(data.d()); ++j)
      out << ',' << data.covariates()(i, j);
    out << '\n';
  }
}

}  // namespace testing_support
