#include <gtest/gtest.h>

#include "support.hpp"

using namespace survboost;
namespace ts = testing_support;

namespace {

ResidualContext ctx(const Vector& e, const StatusVector& s) { return {as_span(e), as_span(s)}; }

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  std::copy(v.begin(), v.end(), out.data());
  return out;
}

StatusVector ivec(std::initializer_list<int> v) {
  StatusVector out(static_cast<Eigen::Index>(v.size()));
  std::copy(v.begin(), v.end(), out.data());
  return out;
}

}  // namespace

TEST(Gehan, LossExamples) {
  EXPECT_NEAR(gehan_loss(ctx(vec({0, 1, 2}), ivec({1, 1, 1}))), 4.0 / 9.0, 1e-15);
  EXPECT_NEAR(gehan_loss(ctx(vec({0, 1}), ivec({1, 0}))), 0.25, 1e-15);
  EXPECT_EQ(gehan_loss(ctx(vec({3, -1, 2}), ivec({0, 0, 0}))), 0.0);
}

TEST(Gehan, GradientExamples) {
  const Vector z = gehan_negative_gradient(ctx(vec({0, 1, 2}), ivec({1, 1, 1})));
  EXPECT_NEAR(z(0), -2.0 / 3.0, 1e-15);
  EXPECT_NEAR(z(1), 0.0, 1e-15);
  EXPECT_NEAR(z(2), 2.0 / 3.0, 1e-15);
  const Vector z2 = gehan_negative_gradient(ctx(vec({0, 1}), ivec({1, 0})));
  EXPECT_NEAR(z2(0), -0.5, 1e-15);
  EXPECT_NEAR(z2(1), 0.5, 1e-15);
  EXPECT_TRUE(gehan_negative_gradient(ctx(vec({1, 2, 3}), ivec({0, 0, 0}))).isZero(0.0));
  EXPECT_TRUE(gehan_negative_gradient_fast(ctx(vec({1, 2, 3}), ivec({0, 0, 0}))).isZero(0.0));
}

TEST(Gehan, FastKernelSmallCases) {
  for (const auto& [e, s] : std::vector<std::pair<Vector, StatusVector>>{
           {vec({0, 0, 0}), ivec({1, 1, 0})},
           {vec({0.3, -0.2}), ivec({1, 0})},
           {vec({1.0, 1.0}), ivec({0, 1})}}) {
    const Vector fast = gehan_negative_gradient_fast(ctx(e, s));
    const Vector brute = gehan_negative_gradient(ctx(e, s));
    EXPECT_EQ(fast, brute);
  }
}

TEST(Gehan, LossMatchesDoubleSum) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 40);
    const Vector e = trial % 2 ? ts::tied_vector(n, 5, rng) : ts::normal_vector(n, rng);
    const StatusVector s = ts::bernoulli_status(n, 0.6, rng);
    EXPECT_NEAR(gehan_loss(ctx(e, s)), ts::gehan_loss_brute(e, s), 1e-13);
  }
}

TEST(GehanProperty, FastEqualsBruteWithTies) {
  std::mt19937_64 rng(99);
  const Vector e = ts::tied_vector(200, 15, rng);
  const StatusVector s = ts::bernoulli_status(200, 0.5, rng);
  EXPECT_LE((gehan_negative_gradient_fast(ctx(e, s)) - gehan_negative_gradient(ctx(e, s))).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(GehanProperty, FiniteDifferencesScaledByN) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 20;
    const Vector logu = ts::normal_vector(n, rng);
    const StatusVector s = ts::bernoulli_status(n, 0.6, rng);
    const Vector f = ts::normal_vector(n, rng, 0.3);
    auto loss = [&](const Vector& g) {
      const Vector e = logu - g;
      return gehan_loss(ctx(e, s));
    };
    const Vector fd = ts::finite_difference(loss, f, 1e-6);
    const Vector e = logu - f;
    const Vector z = gehan_negative_gradient(ctx(e, s));
    for (Eigen::Index k = 0; k < z.size(); ++k) {
      const double expected = z(k) / static_cast<double>(n);
      EXPECT_NEAR(-fd(k), expected, 1e-5 * std::max(std::abs(expected), 1e-3));
    }
  }
}

TEST(GehanProperty, TranslationInvarianceAndZeroSum) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 3 + static_cast<std::size_t>(trial % 30);
    const Vector e = trial % 3 ? ts::normal_vector(n, rng) : ts::tied_vector(n, 4, rng);
    const StatusVector s = ts::bernoulli_status(n, 0.5, rng);
    const Vector shifted = (e.array() + 0.75).matrix();
    EXPECT_NEAR(gehan_loss(ctx(e, s)), gehan_loss(ctx(shifted, s)), 1e-12);
    EXPECT_NEAR(gehan_negative_gradient_fast(ctx(e, s)).sum(), 0.0, 1e-12);
  }
}

TEST(Gehan, RejectsWeights) {
  const Vector e = vec({0, 1}), w = vec({1, 1});
  const StatusVector s = ivec({1, 1});
  EXPECT_THROW(gehan_loss({as_span(e), as_span(s), as_span(w)}), UsageError);
  EXPECT_THROW(gehan_negative_gradient_fast({as_span(e), as_span(s), as_span(w)}), UsageError);
}

TEST(Cox, Examples) {
  const Vector f = vec({0, 0}), u = vec({1, 2});
  const StatusVector s = ivec({1, 1});
  EXPECT_NEAR(cox_negative_log_pl(as_span(f), as_span(u), as_span(s)), std::log(2.0) / 2.0, 1e-15);
  const Vector z = cox_negative_gradient(as_span(f), as_span(u), as_span(s));
  EXPECT_NEAR(z(0), 0.5, 1e-15);
  EXPECT_NEAR(z(1), -0.5, 1e-15);
  const StatusVector none = ivec({0, 0});
  EXPECT_EQ(cox_negative_log_pl(as_span(f), as_span(u), as_span(none)), 0.0);
  EXPECT_TRUE(cox_negative_gradient(as_span(f), as_span(u), as_span(none)).isZero(0.0));
}

TEST(Cox, MatchesBruteForceWithTiedTimes) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 25);
    const Vector f = ts::normal_vector(n, rng);
    const Vector u = (ts::tied_vector(n, 6, rng).array() + 2.0).matrix();
    const StatusVector s = ts::bernoulli_status(n, 0.7, rng);
    EXPECT_NEAR(cox_negative_log_pl(as_span(f), as_span(u), as_span(s)), ts::cox_loss_brute(f, u, s), 1e-12);
  }
}

TEST(CoxProperty, FiniteDifferences) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 20;
    const Vector f = ts::normal_vector(n, rng);
    const Vector u = ts::normal_vector(n, rng).array().exp();
    const StatusVector s = ts::bernoulli_status(n, 0.6, rng);
    auto loss = [&](const Vector& g) { return cox_negative_log_pl(as_span(g), as_span(u), as_span(s)); };
    const Vector fd = ts::finite_difference(loss, f, 1e-5);
    const Vector z = cox_negative_gradient(as_span(f), as_span(u), as_span(s));
    for (Eigen::Index k = 0; k < z.size(); ++k) {
      const double expected = z(k) / static_cast<double>(n);
      EXPECT_NEAR(-fd(k), expected, 1e-6 * std::max(std::abs(expected), 1e-2));
    }
  }
}

TEST(CoxProperty, TranslationInvarianceZeroSumAndOverflow) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 30);
    const Vector f = ts::normal_vector(n, rng, 2.0);
    const Vector u = (ts::tied_vector(n, 8, rng).array() + 3.0).matrix();
    const StatusVector s = ts::bernoulli_status(n, 0.6, rng);
    const Vector f5 = (f.array() + 5.0).matrix();
    EXPECT_NEAR(cox_negative_log_pl(as_span(f), as_span(u), as_span(s)),
                cox_negative_log_pl(as_span(f5), as_span(u), as_span(s)), 1e-12);
    EXPECT_NEAR(cox_negative_gradient(as_span(f), as_span(u), as_span(s)).sum(), 0.0, 1e-12);
  }
  const Vector big = vec({800, 801, 799});
  const Vector u = vec({1, 2, 3});
  const StatusVector s = ivec({1, 1, 1});
  EXPECT_TRUE(std::isfinite(cox_negative_log_pl(as_span(big), as_span(u), as_span(s))));
  EXPECT_TRUE(cox_negative_gradient(as_span(big), as_span(u), as_span(s)).allFinite());
}

TEST(CoxProperty, Convexity) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> lam(0.01, 0.99);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 15;
    const Vector u = ts::normal_vector(n, rng).array().exp();
    const StatusVector s = ts::bernoulli_status(n, 0.6, rng);
    const Vector f1 = ts::normal_vector(n, rng), f2 = ts::normal_vector(n, rng);
    const double l = lam(rng);
    const Vector mix = l * f1 + (1 - l) * f2;
    auto L = [&](const Vector& f) { return cox_negative_log_pl(as_span(f), as_span(u), as_span(s)); };
    EXPECT_LE(L(mix), l * L(f1) + (1 - l) * L(f2) + 1e-10);
  }
}

TEST(L2, Examples) {
  const Vector e = vec({1, -1});
  const StatusVector s = ivec({1, 1});
  EXPECT_DOUBLE_EQ(plain_l2_loss(ctx(e, s)), 0.5);
  const Vector z = plain_l2_negative_gradient(ctx(e, s));
  EXPECT_DOUBLE_EQ(z(0), 0.5);
  EXPECT_DOUBLE_EQ(z(1), -0.5);
  const Vector zero = Vector::Zero(3);
  const StatusVector s3 = ivec({1, 0, 1});
  EXPECT_EQ(plain_l2_loss(ctx(zero, s3)), 0.0);
  EXPECT_TRUE(plain_l2_negative_gradient(ctx(zero, s3)).isZero(0.0));
}

TEST(Ipw, Examples) {
  const Vector e = vec({1, 123.0}), w = vec({2, 0});
  const StatusVector s = ivec({1, 0});
  const ResidualContext c{as_span(e), as_span(s), as_span(w)};
  EXPECT_DOUBLE_EQ(ipw_l2_loss(c), 0.5);
  const Vector z = ipw_l2_negative_gradient(c);
  EXPECT_DOUBLE_EQ(z(0), 1.0);
  EXPECT_DOUBLE_EQ(z(1), 0.0);

  std::mt19937_64 rng(4);
  const Vector r = ts::normal_vector(9, rng), ones = Vector::Ones(9);
  const StatusVector all = StatusVector::Ones(9);
  const ResidualContext unit{as_span(r), as_span(all), as_span(ones)};
  EXPECT_EQ(ipw_l2_loss(unit), plain_l2_loss(ctx(r, all)));
  EXPECT_EQ(ipw_l2_negative_gradient(unit), plain_l2_negative_gradient(ctx(r, all)));

  const Vector zero = Vector::Zero(9);
  const ResidualContext at_min{as_span(zero), as_span(all), as_span(ones)};
  EXPECT_EQ(ipw_l2_loss(at_min), 0.0);
  EXPECT_TRUE(ipw_l2_negative_gradient(at_min).isZero(0.0));
  EXPECT_THROW(ipw_l2_loss(ctx(r, all)), UsageError);
}

TEST(LossKind, Names) {
  for (auto k : {LossKind::Gehan, LossKind::CoxPH, LossKind::IpwL2, LossKind::PlainL2})
    EXPECT_EQ(parse_loss(to_string(k)), k);
  EXPECT_EQ(parse_loss("cox"), LossKind::CoxPH);
  EXPECT_THROW(parse_loss("huber"), UsageError);
  EXPECT_TRUE(is_hazard_scale(LossKind::CoxPH));
  EXPECT_FALSE(is_hazard_scale(LossKind::Gehan));
}
