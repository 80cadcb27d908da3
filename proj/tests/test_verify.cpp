#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <stdexcept>
#include <vector>

#include "oracles.hpp"
#include "robitmc/special.hpp"
#include "robitmc/verify.hpp"
#include "robitmc/verifyrun.hpp"

using namespace robitmc;

namespace {

std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> out;
  for (int i = 0; i < count; ++i) {
    out.push_back(lo + (hi - lo) * i / (count - 1));
  }
  return out;
}

}  // namespace

TEST_SUITE("verify") {

TEST_CASE("tail constants") {
  // kappa_m(nu, m) = Gamma((nu+1)/2)(nu-m)m^{nu/2-1} / (2 sqrt(pi) Gamma(nu/2))
  CHECK(kappa(3.0) == doctest::Approx(2.0 / M_PI).epsilon(1e-14));
  CHECK(kappa_m(4.0, 2.0) == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(kappa_m(3.0, 1.0) == kappa(3.0));
  CHECK(kappa(2.1) > 0.0);
  CHECK_THROWS_AS((void)kappa_m(3.0, 0.0), std::domain_error);
  CHECK_THROWS_AS((void)kappa_m(3.0, 3.0), std::domain_error);
  CHECK_THROWS_AS((void)kappa_m(3.0, -1.0), std::domain_error);
  CHECK_THROWS_AS((void)kappa(1.0), std::domain_error);
}

TEST_CASE("mills bound direct cross-check at moderate points") {
  // Both sides evaluated naively in linear space; the report's margin must
  // agree in sign with the direct comparison everywhere it is representable.
  for (double nu : {2.5, 3.0, 6.0}) {
    for (double t : {-4.0, -1.0, 0.0, 0.5, 2.0, 8.0}) {
      const double m = 1.0;
      const double lhs =
          1.0 / (t_survival(nu, t) * std::pow(t * t + nu, 0.5 * (nu - 1.0)));
      const double rhs = std::sqrt(t * t + nu - m) / kappa_m(nu, m);
      CHECK(lhs <= rhs * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("mills bound holds on a dense grid") {
  auto grid = linspace(-60.0, 60.0, 2401);
  grid.push_back(-1e6);
  grid.push_back(1e6);
  for (double nu : {2.1, 3.0, 5.0, 30.0}) {
    for (double m : {0.5, 1.0}) {
      if (m >= nu) continue;
      const BoundCheckReport report = check_mills_bound(nu, m, grid);
      INFO(report.name, " worst ", report.worst_margin, " at ",
           report.worst_point);
      CHECK(report.pass);
      CHECK(report.worst_margin >= -1e-12);
    }
  }
}

TEST_CASE("mills check fails under an inflated constant") {
  // Asymptotically LHS/RHS -> 2 nu^{nu/2-1} / ((nu-m) m^{nu/2-1}); inflating
  // kappa by 10 pushes the claimed bound below the true ratio for these
  // (nu, m), so a correct checker must report failure.
  const auto grid = linspace(-40.0, 40.0, 1601);
  for (double nu : {2.1, 3.0}) {
    const BoundCheckReport report = check_mills_bound(nu, 1.0, grid, 10.0);
    CHECK_FALSE(report.pass);
    CHECK(report.worst_margin < 0.0);
  }
}

TEST_CASE("per-observation integrand bound") {
  Eigen::MatrixXd W(3, 1);
  W << 1.0, -1.0, 2.0;
  Eigen::VectorXd c_tilde(1);
  c_tilde << 0.0;
  Eigen::MatrixXd thetas(3, 1);
  thetas << 0.5, 2.0, -3.0;  // s values reach +-6

  for (double nu : {2.1, 3.0, 5.0}) {
    const BoundCheckReport report =
        check_step4_bound(W, c_tilde, thetas, nu);
    INFO("nu ", nu, " worst ", report.worst_margin, " at ", report.worst_point);
    CHECK(report.pass);
  }

  // At s = -2, nu = 3: 1/min(F, 1-F) is about 14.3 while the bound with
  // kappa inflated by 50 is about 2.6.
  const BoundCheckReport inflated =
      check_step4_bound(W, c_tilde, thetas, 3.0, 50.0);
  CHECK_FALSE(inflated.pass);
}

TEST_CASE("omega spectral certification") {
  RngStream rng(5150, 0);
  const std::pair<int, int> shapes[] = {{6, 3}, {3, 6}, {4, 4}, {1, 3}};
  for (const auto& [n, p] : shapes) {
    Eigen::MatrixXd W(n, p);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < p; ++j) W(i, j) = rng.normal();
    }
    Eigen::VectorXd lam(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      lam[i] = std::pow(10.0, -3.0 + 6.0 * rng.uniform());
    }
    const BoundCheckReport report =
        check_omega_spectrum(W, LambdaDiag::create(lam));
    INFO(report.grid, " worst ", report.worst_margin, " at ", report.worst_point);
    CHECK(report.pass);
  }
}

TEST_CASE("kernel diagonal is exact for a zero design") {
  // With X = 0 the beta update is the prior regardless of (z, lambda), so
  // every Rao-Blackwellized draw equals the prior density at beta.
  Eigen::MatrixXd X(1, 1);
  X << 0.0;
  Eigen::VectorXi y(1);
  y << 1;
  const Dataset data = Dataset::create(X, y);
  const Prior prior = build_identity_prior(1);
  Eigen::VectorXd beta(1);
  beta << 0.3;

  RngStream rng(17, 0);
  const McEstimate est = kernel_diag_mc(beta, data, prior, 3.0, 200, rng);
  CHECK(est.estimate ==
        doctest::Approx(0.38138781546052414).epsilon(1e-13));  // phi(0.3)
  CHECK(est.se == 0.0);
}

TEST_CASE("kernel diagonal matches nested quadrature") {
  // n = p = 1, X = 0.8, y = 1, nu = 3, standard normal prior, evaluated at
  // beta = 0.4. The oracle integrates the closed-form beta-update density
  // against the exact (z, lambda) conditional, z truncated to (0, inf).
  Eigen::MatrixXd X(1, 1);
  X << 0.8;
  Eigen::VectorXi y(1);
  y << 1;
  const Dataset data = Dataset::create(X, y);
  const Prior prior = build_identity_prior(1);
  Eigen::VectorXd beta(1);
  beta << 0.4;
  const double mu = 0.8 * 0.4;

  const auto inner = [&](double z) {
    const double rate = 0.5 * (3.0 + (z - mu) * (z - mu));
    const double lam_hi = 40.0 / rate;
    return oracle::integrate(
        [&](double lam) {
          const double prec = lam * 0.64 + 1.0;
          const double mean = lam * 0.8 * z / prec;
          const double dens = std::sqrt(prec) *
                              oracle::normal_pdf((0.4 - mean) * std::sqrt(prec));
          return dens * oracle::gamma_pdf(lam, 2.0, rate);
        },
        0.0, lam_hi, 1e-10);
  };
  const double normalizer = t_cdf(3.0, mu);  // P(z > 0)
  const double want =
      oracle::integrate([&](double z) { return inner(z) * oracle::t_pdf(3.0, z - mu); },
                        0.0, 400.0, 1e-8) /
      normalizer;

  RngStream rng(23, 1);
  const McEstimate est = kernel_diag_mc(beta, data, prior, 3.0, 200000, rng);
  INFO("mc ", est.estimate, " +- ", est.se, " quadrature ", want);
  CHECK(est.se > 0.0);
  CHECK(std::fabs(est.estimate - want) <= 4.0 * est.se + 1e-5);
}

TEST_CASE("trace integral is exactly one for a zero design") {
  Eigen::MatrixXd X(1, 1);
  X << 0.0;
  Eigen::VectorXi y(1);
  y << 0;
  const Dataset data = Dataset::create(X, y);
  const Prior prior = build_identity_prior(1);

  RngStream rng(31, 0);
  const TraceEstimate est = trace_mc(data, prior, 3.0, 65, 50, rng);
  CHECK(std::fabs(est.estimate - 1.0) <= 1e-6);
  CHECK(est.se == 0.0);
  CHECK(est.domain_lo < 0.0);
  CHECK(est.domain_hi > 0.0);
  CHECK(est.outer_nodes >= 65);
}

TEST_CASE("trace integral is stable across seeds and node counts") {
  const Dataset data = synthetic_dataset(2, 1, 4);
  const Prior prior = build_identity_prior(1);

  RngStream rng_a(1, 7);
  RngStream rng_b(2, 7);
  RngStream rng_c(3, 7);
  const TraceEstimate a = trace_mc(data, prior, 3.0, 61, 600, rng_a);
  const TraceEstimate b = trace_mc(data, prior, 3.0, 61, 600, rng_b);
  const TraceEstimate c = trace_mc(data, prior, 3.0, 123, 600, rng_c);

  // Scan probes come from a fixed pilot stream, so all three runs integrate
  // the same box and differ only by Monte Carlo noise at the nodes.
  CHECK(a.domain_lo == b.domain_lo);
  CHECK(a.domain_hi == c.domain_hi);

  CHECK(std::isfinite(a.estimate));
  CHECK(a.estimate > 0.0);
  // The constant eigenfunction alone contributes 1.
  CHECK(a.estimate >= 1.0 - 3.0 * a.se - 1e-6);
  CHECK(std::fabs(a.estimate - b.estimate) <=
        3.0 * std::hypot(a.se, b.se) + 1e-6);
  CHECK(std::fabs(a.estimate - c.estimate) <=
        3.0 * std::hypot(a.se, c.se) + 1e-6);
}

TEST_CASE("trace estimator rejects unsupported inputs") {
  const Dataset data = synthetic_dataset(3, 3, 5);
  const Prior prior = build_identity_prior(3);
  RngStream rng(1, 0);
  CHECK_THROWS_AS((void)trace_mc(data, prior, 3.0, 41, 100, rng),
                  std::invalid_argument);  // p > 2
}

TEST_CASE("synthetic datasets are reproducible") {
  const Dataset a = synthetic_dataset(8, 2, 99);
  const Dataset b = synthetic_dataset(8, 2, 99);
  const Dataset c = synthetic_dataset(8, 2, 100);
  CHECK((a.X - b.X).isZero(0.0));
  CHECK((a.y.array() == b.y.array()).all());
  CHECK((a.X - c.X).norm() > 0.0);
  int ones = 0;
  for (Eigen::Index i = 0; i < a.n(); ++i) ones += a.y[i];
  CHECK(ones > 0);  // seed chosen checks both labels occur
  CHECK(ones < 8);
}

TEST_CASE("verification battery") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "robitmc_verify_smoke";
  fs::remove_all(dir);

  VerifyRequest request;
  request.seeds = 2;
  // 61 nodes keep the Simpson error of the doubling check well under its
  // 3 sigma budget; fewer starves the peak on the wide integration box.
  request.outer_nodes = 61;
  request.inner_draws = 300;
  request.out_dir = dir.string();

  const VerifySummary summary = run_verification(request);
  CHECK(summary.pass);
  CHECK(summary.report.at("pass").get<bool>());
  CHECK(summary.report.at("checks").size() > 20);
  CHECK(summary.report.at("trace").at("pass").get<bool>());
  CHECK(fs::exists(dir / "verification_report.json"));

  VerifyRequest falsified = request;
  falsified.falsify_mills = true;
  falsified.out_dir.clear();
  const VerifySummary bad = run_verification(falsified);
  CHECK_FALSE(bad.pass);
  // The inflated constant breaks only the tail-bound checks.
  CHECK(bad.report.at("trace").at("pass").get<bool>());
  fs::remove_all(dir);
}

}  // TEST_SUITE
