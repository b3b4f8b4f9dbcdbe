#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"

using namespace survboost;
using testing_support::scratch_dir;
using testing_support::write_text;

namespace {

SurvivalDataset tiny() {
  Vector t(3);
  t << 1.0, 2.0, 3.0;
  StatusVector s(3);
  s << 1, 0, 1;
  Matrix x(3, 1);
  x << 0.5, -0.5, 0.0;
  return {t, s, x};
}

}  // namespace

TEST(LoadDelimited, ThreeRowFile) {
  const auto dir = scratch_dir("load3");
  write_text(dir / "d.csv", "time,status,x1\n1.0,1,0.5\n2.0,0,-0.5\n3.0,1,0.0\n");
  const auto data = load_delimited((dir / "d.csv").string(), "time", "status");
  EXPECT_EQ(data.n(), 3u);
  EXPECT_EQ(data.d(), 1u);
  EXPECT_EQ(data.column_names(), std::vector<std::string>{"x1"});
  EXPECT_DOUBLE_EQ(data.time()(1), 2.0);
  EXPECT_EQ(data.status()(1), 0);
  EXPECT_DOUBLE_EQ(data.covariates()(0, 0), 0.5);
}

TEST(LoadDelimited, TabsColumnOrderAndBlankLines) {
  const auto dir = scratch_dir("loadtab");
  write_text(dir / "d.tsv", "\xEF\xBB\xBFgene_a\tT\tD\tgene_b\r\n0.1\t4\t1\t7\r\n\r\n0.2\t5\t0\t8\r\n");
  const auto data = load_delimited((dir / "d.tsv").string(), "T", "D", '\t');
  EXPECT_EQ(data.n(), 2u);
  EXPECT_EQ(data.column_names(), (std::vector<std::string>{"gene_a", "gene_b"}));
  EXPECT_DOUBLE_EQ(data.covariates()(1, 1), 8.0);
  EXPECT_DOUBLE_EQ(data.time()(0), 4.0);
}

TEST(LoadDelimited, ValidationErrors) {
  const auto dir = scratch_dir("loadbad");
  auto expect_error = [&](const std::string& body, const std::string& fragment) {
    write_text(dir / "d.csv", body);
    try {
      load_delimited((dir / "d.csv").string(), "time", "status");
      ADD_FAILURE() << "no error for: " << body;
    } catch (const DataError& e) {
      EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
    }
  };
  expect_error("time,status,x1\n1,2,0\n2,1,1\n", "status outside {0,1}");
  expect_error("time,status,x1\n0.0,1,0\n2,1,1\n", "non-positive time");
  expect_error("time,status,x1\n-1,1,0\n2,1,1\n", "non-positive time");
  expect_error("time,status,x1\n1,1,abc\n2,1,1\n", "non-numeric cell");
  expect_error("time,status,x1\n1,1,0\n", "fewer than 2 rows");
  expect_error("tim,status,x1\n1,1,0\n2,1,1\n", "missing column 'time'");
  expect_error("time,status,x1\n1,1\n2,1,1\n", "expected 3");
  EXPECT_THROW(load_delimited((dir / "absent.csv").string(), "time", "status"), DataError);
}

// Inject exactly one violation of each dataset invariant.
TEST(SurvivalDatasetProperty, EveryMutationRejected) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const auto base = testing_support::random_dataset(12, 3, rng);
    const auto i = static_cast<Eigen::Index>(trial % 12);
    {
      Vector t = base.time();
      t(i) = trial % 2 ? 0.0 : -1.0;
      EXPECT_THROW(SurvivalDataset(t, base.status(), base.covariates()), DataError);
    }
    {
      Vector t = base.time();
      t(i) = std::numeric_limits<double>::infinity();
      EXPECT_THROW(SurvivalDataset(t, base.status(), base.covariates()), DataError);
    }
    {
      StatusVector s = base.status();
      s(i) = trial % 2 ? 2 : -1;
      EXPECT_THROW(SurvivalDataset(base.time(), s, base.covariates()), DataError);
    }
    {
      Matrix x = base.covariates();
      x(i, trial % 3) = std::nan("");
      EXPECT_THROW(SurvivalDataset(base.time(), base.status(), x), DataError);
    }
    EXPECT_THROW(SurvivalDataset(base.time().head(11), base.status(), base.covariates()), DataError);
    EXPECT_NO_THROW(SurvivalDataset(base.time(), base.status(), base.covariates()));
  }
  EXPECT_THROW(SurvivalDataset(Vector::Ones(1), StatusVector::Ones(1), Matrix::Ones(1, 1)), DataError);
}

TEST(Standardize, OneTwoThree) {
  Vector t(3);
  t << 1, 2, 3;
  Matrix x(3, 1);
  x << 1, 2, 3;
  const auto [scaled, st] = standardize(SurvivalDataset(t, StatusVector::Ones(3), x));
  // sample sd of (1,2,3) is 1, so the column maps to (-1, 0, 1) exactly
  EXPECT_DOUBLE_EQ(st.scales(0), 1.0);
  EXPECT_DOUBLE_EQ(scaled.covariates()(0, 0), -1.0);
  EXPECT_DOUBLE_EQ(scaled.covariates()(1, 0), 0.0);
  EXPECT_DOUBLE_EQ(scaled.covariates()(2, 0), 1.0);
  EXPECT_DOUBLE_EQ(scaled.covariates().col(0).mean(), 0.0);
}

TEST(Standardize, Idempotent) {
  std::mt19937_64 rng(3);
  const auto data = testing_support::random_dataset(40, 4, rng);
  const auto once = standardize(data).first;
  const auto twice = standardize(once).first;
  EXPECT_LT((once.covariates() - twice.covariates()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Standardize, ConstantColumnNamed) {
  Vector t(3);
  t << 1, 2, 3;
  Matrix x(3, 2);
  x << 1, 5, 2, 5, 3, 5;
  try {
    standardize(SurvivalDataset(t, StatusVector::Ones(3), x, {"a", "flat"}));
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("'flat'"), std::string::npos);
  }
}

TEST(StandardizeProperty, RoundTrip) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> nd(3, 500), dd(1, 50);
  for (int trial = 0; trial < 20; ++trial) {
    const auto n = static_cast<std::size_t>(nd(rng));
    const auto d = static_cast<std::size_t>(dd(rng));
    Matrix x = testing_support::normal_matrix(n, d, rng);
    for (Eigen::Index j = 0; j < x.cols(); ++j) x.col(j) = x.col(j) * (1.0 + j) + Vector::Constant(x.rows(), 10.0 * j);
    const SurvivalDataset data(Vector::Ones(static_cast<Eigen::Index>(n)), StatusVector::Ones(static_cast<Eigen::Index>(n)), x);
    const auto [scaled, st] = standardize(data);
    const Matrix back = st.invert(scaled.covariates());
    EXPECT_LT((back - x).cwiseAbs().maxCoeff() / x.cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(LogTimes, Identities) {
  Vector t(3);
  t << 1.0, std::exp(1.0), std::exp(2.0);
  const auto lt = log_times(SurvivalDataset(t, StatusVector::Ones(3), Matrix::Identity(3, 1)));
  EXPECT_NEAR(lt(0), 0.0, 1e-15);
  EXPECT_NEAR(lt(1), 1.0, 1e-15);
  EXPECT_NEAR(lt(2), 2.0, 1e-15);
  const auto twos = log_times(SurvivalDataset(Vector::Constant(4, 2.0), StatusVector::Ones(4), Matrix::Identity(4, 2)));
  for (double v : twos) EXPECT_EQ(v, std::log(2.0));
}

TEST(Subset, KeepsRowsAndNames) {
  const auto data = tiny();
  const std::vector<std::size_t> rows{2, 0};
  const auto sub = data.subset(rows);
  EXPECT_EQ(sub.n(), 2u);
  EXPECT_DOUBLE_EQ(sub.time()(0), 3.0);
  EXPECT_EQ(sub.status()(1), 1);
  EXPECT_EQ(sub.column_names(), data.column_names());
  EXPECT_EQ(data.event_count(), 2u);
}
