#pragma once

// Monte Carlo scenarios for censored log-linear lifetimes:
//   log T = X beta + sigma * eps,  X ~ N(0, Sigma), Sigma_jk = rho^|j-k|,
// with independent, calibrated, or covariate-dependent censoring.

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "survboost/errors.hpp"
#include "survboost/losses.hpp"
#include "survboost/survdata.hpp"

namespace survboost {

// Coefficient rules ----------------------------------------------------------

/// (3, 3/2, 0, 0, 2, 0, 0, 0) * kappa, unit error scale.
struct FixedKappa {
  double kappa = 1.0;
};
/// Two clusters centred on predictors 4 and 13 (1-based), scaled to a
/// theoretical R^2. `symmetric` switches (h-k)^2 to (h-|k|)^2.
struct Cluster {
  int h = 1;
  double r2_target = 0.75;
  bool symmetric = false;
};
/// (3, 3/2, 0, 0, 2, 0, 0, 0) with error scale sigma.
struct FixedSigma {
  double sigma = 1.0;
};
using BetaRule = std::variant<FixedKappa, Cluster, FixedSigma>;

// Error laws -----------------------------------------------------------------

struct NormalErrors {};
/// Log of a unit exponential (minimum Gumbel).
struct ExtremeValueErrors {};
/// t_df with probability p, otherwise N(0, 1).
struct ContaminatedNormal {
  double p = 0.2;
  double df = 3.0;
};
struct StudentT {
  double df = 3.0;
};
using ErrorLaw = std::variant<NormalErrors, ExtremeValueErrors, ContaminatedNormal, StudentT>;

// Censoring ------------------------------------------------------------------

struct NoCensoring {};
/// C ~ Un(0, tau) on the time scale, tau calibrated to a target rate.
struct UniformTau {
  double target_rate = 0.25;
};
/// C ~ Un(0, upper) on the time scale, or log C ~ Un(0, upper) when
/// log_scale is set.
struct UniformCensoring {
  double upper = 5.0;
  bool log_scale = false;
};
/// log C = X beta + Un(0, width).
struct CovariateShift {
  double width = 2.0;
};
using CensoringLaw = std::variant<NoCensoring, UniformTau, UniformCensoring, CovariateShift>;

struct SimulationScenario {
  std::string name = "custom";
  std::size_t n = 60;
  std::size_t d = 8;
  double ar_rho = 0.5;
  BetaRule beta_rule = FixedKappa{};
  ErrorLaw error = NormalErrors{};
  CensoringLaw censoring = NoCensoring{};
  int replicates = 100;
  std::uint64_t seed = 1;

  double noise_scale() const {
    if (const auto* s = std::get_if<FixedSigma>(&beta_rule)) return s->sigma;
    return 1.0;
  }

  void validate() const {
    if (n < 2) throw UsageError("scenario: n must be at least 2");
    if (d < 1) throw UsageError("scenario: d must be at least 1");
    if (!(std::abs(ar_rho) < 1.0)) throw UsageError("scenario: |ar_rho| must be < 1");
    if (replicates < 1) throw UsageError("scenario: replicates must be positive");
    if (const auto* c = std::get_if<ContaminatedNormal>(&error))
      if (!(c->p >= 0.0 && c->p <= 1.0) || !(c->df >= 1.0))
        throw UsageError("scenario: contamination needs p in [0,1] and df >= 1");
    if (const auto* t = std::get_if<StudentT>(&error))
      if (!(t->df >= 1.0)) throw UsageError("scenario: df must be >= 1");
    if (const auto* u = std::get_if<UniformTau>(&censoring))
      if (!(u->target_rate > 0.0 && u->target_rate < 1.0))
        throw UsageError("scenario: censoring rate must lie in (0, 1)");
    if (const auto* u = std::get_if<UniformCensoring>(&censoring))
      if (!(u->upper > 0.0)) throw UsageError("scenario: censoring upper bound must be positive");
    if (const auto* c = std::get_if<CovariateShift>(&censoring))
      if (!(c->width > 0.0)) throw UsageError("scenario: censoring width must be positive");
    if (const auto* s = std::get_if<FixedSigma>(&beta_rule))
      if (!(s->sigma > 0.0)) throw UsageError("scenario: sigma must be positive");
    if (const auto* c = std::get_if<Cluster>(&beta_rule)) {
      if (c->h < 1 || c->h > 4) throw UsageError("scenario: cluster h must lie in 1..4");
      if (!(c->r2_target > 0.0 && c->r2_target < 1.0))
        throw UsageError("scenario: r2 must lie in (0, 1)");
    }
  }
};

struct GeneratedReplicate {
  SurvivalDataset dataset;
  Vector true_beta;
  Matrix true_covariance;
  Vector linear_predictor;  // X beta
  double realized_censoring_rate = 0.0;
  int attempts = 1;
};

// ---------------------------------------------------------------------------

/// Independent generator for (seed, index, purpose, attempt).
inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t index,
                                 std::uint32_t purpose = 0, std::uint32_t attempt = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    purpose, attempt};
  return std::mt19937_64(seq);
}

inline Matrix ar1_covariance(std::size_t d, double rho) {
  Matrix sigma(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (Eigen::Index j = 0; j < sigma.rows(); ++j)
    for (Eigen::Index k = 0; k < sigma.cols(); ++k)
      sigma(j, k) = std::pow(rho, static_cast<double>(std::abs(j - k)));
  return sigma;
}

inline Matrix ar1_factor(std::size_t d, double rho) {
  if (!(std::abs(rho) < 1.0)) throw UsageError("AR(1) correlation must satisfy |rho| < 1");
  Eigen::LLT<Matrix> llt(ar1_covariance(d, rho));
  if (llt.info() != Eigen::Success) throw NumericError("AR(1) covariance factorization failed");
  return llt.matrixL();
}

namespace detail {
template <typename Rng>
Matrix correlated_normals(std::size_t n, const Matrix& lower, Rng& rng) {
  std::normal_distribution<double> normal;
  Matrix z(static_cast<Eigen::Index>(n), lower.rows());
  for (Eigen::Index i = 0; i < z.rows(); ++i)
    for (Eigen::Index j = 0; j < z.cols(); ++j) z(i, j) = normal(rng);
  return z * lower.transpose();
}
}  // namespace detail

/// n i.i.d. rows from N(0, Sigma), Sigma_jk = rho^|j-k|.
template <typename Rng>
Matrix gen_ar1_covariates(std::size_t n, std::size_t d, double rho, Rng& rng) {
  return detail::correlated_normals(n, ar1_factor(d, rho), rng);
}

inline Vector make_beta(const BetaRule& rule, std::size_t d, double ar_rho = 0.5) {
  Vector beta = Vector::Zero(static_cast<Eigen::Index>(d));
  if (const auto* c = std::get_if<Cluster>(&rule)) {
    if (c->h < 1 || c->h > 4) throw UsageError("cluster h must lie in 1..4");
    if (d < static_cast<std::size_t>(12 + c->h))
      throw UsageError("cluster rule with h=" + std::to_string(c->h) + " needs d >= " +
                       std::to_string(12 + c->h));
    for (int k = -(c->h - 1); k <= c->h - 1; ++k) {
      const double base = c->symmetric ? c->h - std::abs(k) : c->h - k;
      // 1-based indices 4+k and 13+k.
      beta(3 + k) = base * base;
      beta(12 + k) = base * base;
    }
    const double quad = beta.dot(ar1_covariance(d, ar_rho) * beta);
    const double sigma = 1.0;
    beta *= sigma * std::sqrt(c->r2_target / (1.0 - c->r2_target) / quad);
    return beta;
  }
  if (d < 8) throw UsageError("fixed coefficient rule needs d >= 8");
  const double scale = std::holds_alternative<FixedKappa>(rule) ? std::get<FixedKappa>(rule).kappa : 1.0;
  beta(0) = 3.0 * scale;
  beta(1) = 1.5 * scale;
  beta(4) = 2.0 * scale;
  return beta;
}

/// Theoretical R^2 = b'Sb / (b'Sb + sigma^2).
inline double theoretical_r2(const Vector& beta, const Matrix& covariance, double sigma) {
  const double quad = beta.dot(covariance * beta);
  return quad / (quad + sigma * sigma);
}

template <typename Rng>
Vector gen_errors(const ErrorLaw& law, std::size_t n, Rng& rng) {
  Vector eps(static_cast<Eigen::Index>(n));
  std::normal_distribution<double> normal;
  std::visit(
      [&](const auto& l) {
        using L = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<L, NormalErrors>) {
          for (auto& e : eps) e = normal(rng);
        } else if constexpr (std::is_same_v<L, ExtremeValueErrors>) {
          std::exponential_distribution<double> expo(1.0);
          for (auto& e : eps) {
            double draw = expo(rng);
            while (!(draw > 0.0)) draw = expo(rng);
            e = std::log(draw);
          }
        } else if constexpr (std::is_same_v<L, ContaminatedNormal>) {
          std::bernoulli_distribution contaminate(l.p);
          std::student_t_distribution<double> t(l.df);
          for (auto& e : eps) e = contaminate(rng) ? t(rng) : normal(rng);
        } else {
          std::student_t_distribution<double> t(l.df);
          for (auto& e : eps) e = t(rng);
        }
      },
      law);
  return eps;
}

namespace detail {
// Log-times are clamped so exp() stays finite and positive; heavy-tailed
// draws beyond the clamp keep their rank.
constexpr double kLogTimeClamp = 700.0;

inline double clamp_log_time(double v) {
  return std::clamp(v, -kLogTimeClamp, kLogTimeClamp);
}

template <typename Rng>
double open_unit(Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double v = u(rng);
  while (!(v > 0.0)) v = u(rng);
  return v;
}
}  // namespace detail

struct TauCalibration {
  double tau = 0.0;
  double pilot_rate = 0.0;
  int iterations = 0;
};

/// Bisection on log(tau) against a common-random-numbers pilot sample of
/// `pilot` draws, stopping within min(0.01, half the distance to 0 or 1) of
/// the target rate.
inline TauCalibration calibrate_tau(const SimulationScenario& scenario, double target_rate,
                                    std::size_t pilot = 20000) {
  if (!(target_rate > 0.0 && target_rate < 1.0))
    throw UsageError("target censoring rate must lie in (0, 1)");
  auto rng = substream(scenario.seed, 0, /*purpose=*/1);
  const Vector beta = make_beta(scenario.beta_rule, scenario.d, scenario.ar_rho);
  const Matrix x = gen_ar1_covariates(pilot, scenario.d, scenario.ar_rho, rng);
  const Vector eps = gen_errors(scenario.error, pilot, rng);
  // T > tau V  <=>  log T - log V > log tau
  std::vector<double> margin(pilot);
  for (std::size_t i = 0; i < pilot; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const double log_t = detail::clamp_log_time(x.row(ii).dot(beta) + scenario.noise_scale() * eps(ii));
    margin[i] = log_t - std::log(detail::open_unit(rng));
  }
  auto rate = [&](double log_tau) {
    std::size_t censored = 0;
    for (double m : margin) censored += m > log_tau ? 1 : 0;
    return static_cast<double>(censored) / static_cast<double>(pilot);
  };
  const double tol = std::min({0.01, 0.5 * target_rate, 0.5 * (1.0 - target_rate)});
  double lo = *std::min_element(margin.begin(), margin.end()) - 1.0;
  double hi = *std::max_element(margin.begin(), margin.end()) + 1.0;
  for (int widen = 0; rate(lo) < target_rate || rate(hi) > target_rate; ++widen) {
    if (widen == 10 || !std::isfinite(lo) || !std::isfinite(hi))
      throw NumericError("censoring calibration failed to bracket the target rate");
    lo -= 10.0;
    hi += 10.0;
  }
  TauCalibration out;
  double mid = 0.5 * (lo + hi);
  double r = rate(mid);
  for (out.iterations = 1; std::abs(r - target_rate) > tol; ++out.iterations) {
    if (out.iterations > 200) throw NumericError("censoring calibration did not converge");
    (r > target_rate ? lo : hi) = mid;
    mid = 0.5 * (lo + hi);
    r = rate(mid);
  }
  out.tau = std::exp(mid);
  out.pilot_rate = r;
  return out;
}

/// Reusable per-scenario state: coefficients, covariance factor and, when
/// needed, the calibrated tau.
class ScenarioSampler {
 public:
  explicit ScenarioSampler(SimulationScenario scenario) : scenario_(std::move(scenario)) {
    scenario_.validate();
    beta_ = make_beta(scenario_.beta_rule, scenario_.d, scenario_.ar_rho);
    covariance_ = ar1_covariance(scenario_.d, scenario_.ar_rho);
    factor_ = ar1_factor(scenario_.d, scenario_.ar_rho);
    if (const auto* u = std::get_if<UniformTau>(&scenario_.censoring))
      tau_ = calibrate_tau(scenario_, u->target_rate).tau;
  }

  const SimulationScenario& scenario() const { return scenario_; }
  const Vector& beta() const { return beta_; }
  const Matrix& covariance() const { return covariance_; }
  std::optional<double> tau() const { return tau_; }

  static constexpr int kMaxAttempts = 100;

  GeneratedReplicate replicate(std::uint64_t index) const {
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
      auto rng = substream(scenario_.seed, index, /*purpose=*/0, static_cast<std::uint32_t>(attempt));
      auto rep = draw(rng);
      if (rep) {
        rep->attempts = attempt + 1;
        return std::move(*rep);
      }
    }
    throw NumericError("scenario '" + scenario_.name + "' replicate " + std::to_string(index) +
                       " was fully censored in " + std::to_string(kMaxAttempts) + " attempts");
  }

 private:
  std::optional<GeneratedReplicate> draw(std::mt19937_64& rng) const {
    const std::size_t n = scenario_.n;
    Matrix x = detail::correlated_normals(n, factor_, rng);
    const Vector eps = gen_errors(scenario_.error, n, rng);
    const Vector lp = x * beta_;
    Vector time(static_cast<Eigen::Index>(n));
    StatusVector status(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < time.size(); ++i) {
      const double log_t = detail::clamp_log_time(lp(i) + scenario_.noise_scale() * eps(i));
      double log_c = std::numeric_limits<double>::infinity();
      std::visit(
          [&](const auto& c) {
            using C = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<C, UniformTau>) {
              log_c = std::log(*tau_ * detail::open_unit(rng));
            } else if constexpr (std::is_same_v<C, UniformCensoring>) {
              const double u = c.upper * detail::open_unit(rng);
              log_c = c.log_scale ? u : std::log(u);
            } else if constexpr (std::is_same_v<C, CovariateShift>) {
              log_c = detail::clamp_log_time(lp(i) + c.width * detail::open_unit(rng));
            }
          },
          scenario_.censoring);
      const bool event = log_t <= log_c;
      status(i) = event ? 1 : 0;
      time(i) = std::exp(event ? log_t : log_c);
    }
    if (status.sum() == 0) return std::nullopt;
    const double rate = 1.0 - static_cast<double>(status.sum()) / static_cast<double>(n);
    return GeneratedReplicate{SurvivalDataset(std::move(time), std::move(status), std::move(x)),
                              beta_, covariance_, lp, rate, 1};
  }

  SimulationScenario scenario_;
  Vector beta_;
  Matrix covariance_;
  Matrix factor_;
  std::optional<double> tau_;
};

inline GeneratedReplicate gen_replicate(const SimulationScenario& scenario, std::uint64_t index) {
  return ScenarioSampler(scenario).replicate(index);
}

// ---------------------------------------------------------------------------
// Presets and scenario files
// ---------------------------------------------------------------------------

struct ScenarioPoint {
  std::string parameter;  // e.g. "kappa", "h", "sigma", "df"
  double value = 0.0;
  std::string error_label;
  SimulationScenario scenario;
};

struct SimulationPlan {
  std::string name;
  std::vector<ScenarioPoint> points;
  std::vector<LossKind> losses;
};

inline std::string error_label(const ErrorLaw& law) {
  return std::visit(
      [](const auto& l) -> std::string {
        using L = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<L, NormalErrors>) return "normal";
        else if constexpr (std::is_same_v<L, ExtremeValueErrors>) return "extreme_value";
        else if constexpr (std::is_same_v<L, ContaminatedNormal>) return "contaminated";
        else return "t" + std::to_string(static_cast<int>(l.df));
      },
      law);
}

namespace detail {
inline std::uint64_t point_seed(std::uint64_t seed, std::size_t point) {
  auto rng = substream(seed, point, /*purpose=*/2);
  return rng();
}
}  // namespace detail

inline SimulationPlan preset_plan(const std::string& name, int replicates, std::uint64_t seed) {
  SimulationPlan plan;
  plan.name = name;
  auto add = [&](std::string parameter, double value, SimulationScenario s) {
    s.replicates = replicates;
    s.seed = detail::point_seed(seed, plan.points.size());
    std::string label = error_label(s.error);
    plan.points.push_back({std::move(parameter), value, std::move(label), std::move(s)});
  };
  if (name == "fig3") {
    plan.losses = {LossKind::PlainL2, LossKind::Gehan, LossKind::CoxPH};
    for (ErrorLaw err : {ErrorLaw{NormalErrors{}}, ErrorLaw{ExtremeValueErrors{}},
                         ErrorLaw{ContaminatedNormal{0.2, 3.0}}})
      for (double kappa : {0.25, 0.5, 0.75, 1.0}) {
        SimulationScenario s;
        s.name = name;
        s.n = 60;
        s.d = 8;
        s.beta_rule = FixedKappa{kappa};
        s.error = err;
        s.censoring = NoCensoring{};
        add("kappa", kappa, s);
      }
  } else if (name == "fig4") {
    plan.losses = {LossKind::CoxPH, LossKind::Gehan};
    for (int h = 1; h <= 4; ++h) {
      SimulationScenario s;
      s.name = name;
      s.n = 100;
      s.d = 20;
      s.beta_rule = Cluster{h, 0.75, false};
      s.error = NormalErrors{};
      s.censoring = UniformTau{0.25};
      add("h", h, s);
    }
  } else if (name == "fig5") {
    plan.losses = {LossKind::IpwL2, LossKind::Gehan};
    for (ErrorLaw err : {ErrorLaw{NormalErrors{}}, ErrorLaw{ExtremeValueErrors{}},
                         ErrorLaw{StudentT{3.0}}})
      for (double sigma : {0.5, 1.0, 1.5, 2.0}) {
        SimulationScenario s;
        s.name = name;
        s.n = 60;
        s.d = 8;
        s.beta_rule = FixedSigma{sigma};
        s.error = err;
        s.censoring = UniformCensoring{5.0};
        add("sigma", sigma, s);
      }
  } else if (name == "fig6") {
    plan.losses = {LossKind::IpwL2, LossKind::Gehan};
    for (double df : {1.0, 3.0, 5.0, 10.0, 15.0, 20.0}) {
      SimulationScenario s;
      s.name = name;
      s.n = 60;
      s.d = 8;
      s.beta_rule = FixedSigma{1.0};
      s.error = StudentT{df};
      s.censoring = CovariateShift{2.0};
      add("df", df, s);
    }
  } else {
    throw UsageError("unknown scenario preset '" + name + "'");
  }
  return plan;
}

/// key=value scenario documents; '#' starts a comment. Returns the scenario
/// and the loss list (defaults to gehan and coxph when absent).
struct ScenarioFile {
  SimulationScenario scenario;
  std::vector<LossKind> losses{LossKind::Gehan, LossKind::CoxPH};
};

inline ScenarioFile parse_scenario(std::istream& in) {
  ScenarioFile file;
  SimulationScenario& s = file.scenario;
  std::string beta_rule = "fixed_kappa", error = "normal", censoring = "none";
  double kappa = 1.0, r2 = 0.75, sigma = 1.0, p = 0.2, df = 3.0;
  double censoring_rate = 0.25, censoring_upper = 5.0, censoring_width = 2.0;
  int h = 1;
  bool symmetric = false;
  bool censoring_log_scale = false;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError("scenario line " + std::to_string(line_no) + ": expected key=value");
    auto strip = [](std::string v) {
      const auto b = v.find_first_not_of(" \t\r");
      const auto e = v.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string{} : v.substr(b, e - b + 1);
    };
    const std::string key = strip(line.substr(0, eq));
    const std::string value = strip(line.substr(eq + 1));
    auto number = [&]() {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(value, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != value.size())
        throw UsageError("scenario line " + std::to_string(line_no) + ": '" + key +
                         "' needs a number, got '" + value + "'");
      return v;
    };
    auto whole = [&]() {
      const double v = number();
      if (v != std::floor(v) || v < 0)
        throw UsageError("scenario line " + std::to_string(line_no) + ": '" + key +
                         "' needs a nonnegative integer");
      return v;
    };
    if (key == "name") s.name = value;
    else if (key == "n") s.n = static_cast<std::size_t>(whole());
    else if (key == "d") s.d = static_cast<std::size_t>(whole());
    else if (key == "ar_rho") s.ar_rho = number();
    else if (key == "beta_rule") beta_rule = value;
    else if (key == "kappa") kappa = number();
    else if (key == "h") h = static_cast<int>(whole());
    else if (key == "r2") r2 = number();
    else if (key == "cluster_form") {
      if (value != "printed" && value != "symmetric")
        throw UsageError("scenario: cluster_form must be printed or symmetric");
      symmetric = value == "symmetric";
    } else if (key == "sigma") sigma = number();
    else if (key == "error") error = value;
    else if (key == "contamination_p") p = number();
    else if (key == "df") df = number();
    else if (key == "censoring") censoring = value;
    else if (key == "censoring_rate") censoring_rate = number();
    else if (key == "censoring_upper") censoring_upper = number();
    else if (key == "censoring_scale") {
      if (value != "time" && value != "log")
        throw UsageError("scenario: censoring_scale must be time or log");
      censoring_log_scale = value == "log";
    }
    else if (key == "censoring_width") censoring_width = number();
    else if (key == "replicates") s.replicates = static_cast<int>(whole());
    else if (key == "seed") s.seed = static_cast<std::uint64_t>(whole());
    else if (key == "losses") {
      file.losses.clear();
      std::stringstream list(value);
      std::string item;
      while (std::getline(list, item, ',')) file.losses.push_back(parse_loss(strip(item)));
      if (file.losses.empty()) throw UsageError("scenario: empty loss list");
    } else {
      throw UsageError("scenario line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }

  if (beta_rule == "fixed_kappa") s.beta_rule = FixedKappa{kappa};
  else if (beta_rule == "cluster") s.beta_rule = Cluster{h, r2, symmetric};
  else if (beta_rule == "fixed_sigma") s.beta_rule = FixedSigma{sigma};
  else throw UsageError("scenario: unknown beta_rule '" + beta_rule + "'");

  if (error == "normal") s.error = NormalErrors{};
  else if (error == "extreme_value") s.error = ExtremeValueErrors{};
  else if (error == "contaminated") s.error = ContaminatedNormal{p, df};
  else if (error == "student_t") s.error = StudentT{df};
  else throw UsageError("scenario: unknown error '" + error + "'");

  if (censoring == "none") s.censoring = NoCensoring{};
  else if (censoring == "uniform_tau") s.censoring = UniformTau{censoring_rate};
  else if (censoring == "uniform") s.censoring = UniformCensoring{censoring_upper, censoring_log_scale};
  else if (censoring == "covariate_shift") s.censoring = CovariateShift{censoring_width};
  else throw UsageError("scenario: unknown censoring '" + censoring + "'");

  s.validate();
  make_beta(s.beta_rule, s.d, s.ar_rho);  // surfaces dimension errors early
  return file;
}

inline ScenarioFile load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open scenario file '" + path + "'");
  return parse_scenario(in);
}

}  // namespace survboost
