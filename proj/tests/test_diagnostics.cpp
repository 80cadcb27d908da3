#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "oracles.hpp"
#include "robitmc/diagnostics.hpp"
#include "robitmc/rng.hpp"
#include "robitmc/special.hpp"

using namespace robitmc;

TEST_SUITE("diagnostics") {

TEST_CASE("autocorrelation of a short series by hand") {
  // {1,2,3,4}: c0 = 1.25, c1 = 0.3125, c2 = -0.375, c3 = -0.5625.
  const std::vector<double> series{1.0, 2.0, 3.0, 4.0};
  const AcfResult acf = autocorrelation(series, 3);
  REQUIRE(acf.lags.size() == 4);
  CHECK(acf.lags[0] == 0);
  CHECK(acf.lags[3] == 3);
  CHECK(acf.values[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(acf.values[1] == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(acf.values[2] == doctest::Approx(-0.3).epsilon(1e-14));
  CHECK(acf.values[3] == doctest::Approx(-0.45).epsilon(1e-14));
}

TEST_CASE("autocorrelation validation") {
  CHECK_THROWS_AS((void)autocorrelation({1.0, 1.0, 1.0}, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)autocorrelation({1.0, 2.0}, 2),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)autocorrelation({1.0, 2.0}, -1),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)autocorrelation({1.0}, 0), std::invalid_argument);
}

TEST_CASE("autocorrelation stays within [-1, 1]") {
  RngStream rng(1, 0);
  std::vector<double> series;
  for (int i = 0; i < 500; ++i) {
    series.push_back(rng.normal() + (i % 7 == 0 ? 10.0 : 0.0));
  }
  const AcfResult acf = autocorrelation(series, 400);
  for (double v : acf.values) {
    CHECK(v <= 1.0);
    CHECK(v >= -1.0);
  }
}

TEST_CASE("autocorrelation of an AR(1) series") {
  const std::vector<double> series = oracle::ar1_series(0.6, 200000, 99);
  const AcfResult acf = autocorrelation(series, 5);
  for (int k = 1; k <= 5; ++k) {
    CHECK(std::fabs(acf.values[k] - std::pow(0.6, k)) <= 0.02);
  }
}

TEST_CASE("autocorrelation of white noise") {
  RngStream rng(7, 3);
  std::vector<double> series;
  series.reserve(100000);
  for (int i = 0; i < 100000; ++i) series.push_back(rng.normal());
  const AcfResult acf = autocorrelation(series, 10);
  for (int k = 1; k <= 10; ++k) {
    CHECK(std::fabs(acf.values[k]) <= 5.0 / std::sqrt(100000.0));
  }
}

TEST_CASE("running mean") {
  const std::vector<double> got = running_mean({2.0, 4.0, 6.0});
  REQUIRE(got.size() == 3);
  CHECK(got[0] == doctest::Approx(2.0));
  CHECK(got[1] == doctest::Approx(3.0));
  CHECK(got[2] == doctest::Approx(4.0));
  CHECK_THROWS_AS((void)running_mean({}), std::invalid_argument);
}

TEST_CASE("batch-means error for independent draws") {
  RngStream rng(13, 0);
  std::vector<double> series;
  const int n = 100000;
  series.reserve(n);
  for (int i = 0; i < n; ++i) series.push_back(2.0 * rng.normal() + 5.0);
  const double got = mcse_batch_means(series, 100);
  const double want = 2.0 / std::sqrt(static_cast<double>(n));
  CHECK(got / want > 0.8);
  CHECK(got / want < 1.25);
}

TEST_CASE("batch-means error for an AR(1) series") {
  // Marginal variance 1, so the asymptotic mean error is
  // sqrt((1 + phi) / (1 - phi) / n).
  const int n = 200000;
  const std::vector<double> series = oracle::ar1_series(0.5, n, 14);
  const double got = mcse_batch_means(series, 100);
  const double want = std::sqrt(3.0 / static_cast<double>(n));
  CHECK(got / want > 0.75);
  CHECK(got / want < 1.35);
}

TEST_CASE("batch-means validation") {
  CHECK_THROWS_AS((void)mcse_batch_means({1.0, 2.0, 3.0}, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)mcse_batch_means({1.0, 2.0}, 3),
                  std::invalid_argument);
}

TEST_CASE("log likelihood by hand") {
  Eigen::MatrixXd X(2, 1);
  X << 1.0, -2.0;
  Eigen::VectorXi y(2);
  y << 1, 0;
  const Dataset data = Dataset::create(X, y);
  Eigen::VectorXd beta(1);
  beta << 0.7;

  const ModelKind robit = ModelKind::robit(3.0);
  const double want_robit =
      std::log(t_cdf(3.0, 0.7)) + std::log(1.0 - t_cdf(3.0, -1.4));
  CHECK(log_likelihood(beta, data, robit) ==
        doctest::Approx(want_robit).epsilon(1e-12));

  const ModelKind probit = ModelKind::probit();
  const double want_probit =
      std::log(oracle::normal_cdf(0.7)) + std::log(oracle::normal_cdf(1.4));
  CHECK(log_likelihood(beta, data, probit) ==
        doctest::Approx(want_probit).epsilon(1e-12));

  Eigen::VectorXd wrong(2);
  wrong << 0.0, 0.0;
  CHECK_THROWS_AS((void)log_likelihood(wrong, data, robit),
                  std::invalid_argument);
}

TEST_CASE("log likelihood stays finite in deep tails") {
  Eigen::MatrixXd X(2, 1);
  X << 1.0, -1.0;
  Eigen::VectorXi y(2);
  y << 0, 1;  // both observations oppose a large positive beta
  const Dataset data = Dataset::create(X, y);
  Eigen::VectorXd beta(1);
  beta << 500.0;

  const double probit_ll = log_likelihood(beta, data, ModelKind::probit());
  CHECK(std::isfinite(probit_ll));
  // Two normal tails at -500: each roughly -x^2/2.
  CHECK(probit_ll == doctest::Approx(2.0 * normal_log_cdf(-500.0)).epsilon(1e-12));

  const double robit_ll = log_likelihood(beta, data, ModelKind::robit(3.0));
  CHECK(std::isfinite(robit_ll));
  CHECK(robit_ll == doctest::Approx(2.0 * t_log_cdf(3.0, -500.0)).epsilon(1e-12));
}

TEST_CASE("log posterior combines likelihood and prior") {
  Eigen::MatrixXd X(2, 2);
  X << 1.0, 0.5, -0.5, 2.0;
  Eigen::VectorXi y(2);
  y << 1, 0;
  const Dataset data = Dataset::create(X, y);

  Eigen::MatrixXd sigma(2, 2);
  sigma << 2.0, 0.3, 0.3, 1.0;
  Eigen::VectorXd mean(2);
  mean << 0.1, -0.2;
  const Prior prior = Prior::create(mean, sigma);

  Eigen::VectorXd beta(2);
  beta << 0.4, 0.9;
  const ModelKind model = ModelKind::robit(5.0);

  const Eigen::VectorXd centered = beta - mean;
  const double want = log_likelihood(beta, data, model) -
                      std::log(2.0 * M_PI) +
                      0.5 * std::log(sigma.determinant()) -
                      0.5 * centered.dot(sigma * centered);
  CHECK(log_posterior(beta, data, prior, model) ==
        doctest::Approx(want).epsilon(1e-12));
}

}  // TEST_SUITE
