#include "robitmc/verifyrun.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "robitmc/manifest.hpp"

namespace robitmc {

namespace {

std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    out.push_back(lo + (hi - lo) * i / (count - 1));
  }
  return out;
}

std::vector<double> mills_t_grid() {
  auto grid = linspace(-100.0, -10.0, 46);
  const auto center = linspace(-10.0, 10.0, 801);
  const auto tail = linspace(10.0, 100.0, 181);
  grid.insert(grid.end(), center.begin(), center.end());
  grid.insert(grid.end(), tail.begin(), tail.end());
  return grid;
}

std::vector<double> m_grid_for(double nu) {
  std::vector<double> ms = {0.25 * nu, 0.5 * nu, 0.75 * nu};
  if (1.0 < nu) ms.push_back(1.0);
  std::vector<double> out;
  for (double m : ms) {
    if (m > 0.0 && m < nu &&
        std::find(out.begin(), out.end(), m) == out.end()) {
      out.push_back(m);
    }
  }
  return out;
}

}  // namespace

nlohmann::json bound_report_json(const BoundCheckReport& report) {
  return {{"name", report.name},
          {"grid", report.grid},
          {"worst_margin", report.worst_margin},
          {"worst_point", report.worst_point},
          {"pass", report.pass}};
}

VerifySummary run_verification(const VerifyRequest& request) {
  nlohmann::json checks = nlohmann::json::array();
  bool all_pass = true;
  const auto add = [&](const BoundCheckReport& report) {
    checks.push_back(bound_report_json(report));
    all_pass = all_pass && report.pass;
  };

  // Mills-ratio tail bound across the nu/m grid.
  const double inflation = request.falsify_mills ? 10.0 : 1.0;
  const auto t_grid = mills_t_grid();
  for (double nu : {2.1, 3.0, 5.0, 30.0}) {
    for (double m : m_grid_for(nu)) {
      add(check_mills_bound(nu, m, t_grid, inflation));
    }
  }

  // Per-observation integrand bound on synthetic whitened instances.
  for (double nu : {2.1, 3.0, 5.0}) {
    const Dataset data = synthetic_dataset(6, 2, 7002);
    const Prior prior = Prior::create(Eigen::VectorXd::Constant(2, 0.3),
                                      Eigen::MatrixXd::Identity(2, 2));
    const Whitened wh = whiten(data, prior);
    RngStream rng(request.seed, 11);
    Eigen::MatrixXd thetas(64, 2);
    for (Eigen::Index i = 0; i < thetas.rows(); ++i) {
      for (Eigen::Index j = 0; j < thetas.cols(); ++j) {
        thetas(i, j) = 3.0 * rng.normal();
      }
    }
    add(check_step4_bound(wh.W, wh.c_tilde, thetas, nu, inflation));
  }

  // Omega spectral identities over random shapes, including n < p.
  {
    RngStream rng(request.seed, 12);
    const std::pair<int, int> shapes[] = {{6, 3}, {3, 6}, {5, 5}, {1, 4}, {4, 1}};
    for (const auto& [n, p] : shapes) {
      for (int rep = 0; rep < 4; ++rep) {
        Eigen::MatrixXd W(n, p);
        for (Eigen::Index i = 0; i < n; ++i) {
          for (Eigen::Index j = 0; j < p; ++j) W(i, j) = rng.normal();
        }
        Eigen::VectorXd lam(n);
        for (Eigen::Index i = 0; i < n; ++i) {
          lam[i] = std::pow(10.0, -3.0 + 6.0 * rng.uniform());
        }
        add(check_omega_spectrum(W, LambdaDiag::create(lam)));
      }
    }
  }

  // Trace integral: finite, stable across seeds, stable under node doubling.
  nlohmann::json trace;
  {
    const auto& spec = request.trace_instance;
    const Dataset data = synthetic_dataset(spec.n, spec.p, 9001);
    const Prior prior = build_identity_prior(spec.p);

    nlohmann::json estimates = nlohmann::json::array();
    std::vector<TraceEstimate> by_seed;
    for (int s = 0; s < std::max(1, request.seeds); ++s) {
      RngStream rng(request.seed, 100 + static_cast<std::uint64_t>(s));
      const TraceEstimate est = trace_mc(data, prior, spec.nu,
                                         request.outer_nodes,
                                         request.inner_draws, rng);
      by_seed.push_back(est);
      estimates.push_back({{"stream", 100 + s},
                           {"estimate", est.estimate},
                           {"se", est.se},
                           {"outer_nodes", est.outer_nodes},
                           {"inner_draws", est.inner_draws},
                           {"domain_lo", est.domain_lo},
                           {"domain_hi", est.domain_hi}});
    }

    bool trace_pass = true;
    for (const auto& est : by_seed) {
      if (!std::isfinite(est.estimate) || !(est.estimate > 0.0)) {
        trace_pass = false;
      }
    }
    nlohmann::json consistency = nlohmann::json::array();
    for (std::size_t i = 0; i + 1 < by_seed.size(); ++i) {
      const double diff = std::fabs(by_seed[i].estimate - by_seed[i + 1].estimate);
      const double tol = 3.0 * std::hypot(by_seed[i].se, by_seed[i + 1].se);
      const bool ok = diff <= std::max(tol, 1e-12);
      trace_pass = trace_pass && ok;
      consistency.push_back({{"kind", "cross-seed"},
                             {"diff", diff},
                             {"tolerance", tol},
                             {"pass", ok}});
    }
    {
      RngStream rng(request.seed, 200);
      const TraceEstimate doubled = trace_mc(data, prior, spec.nu,
                                             2 * request.outer_nodes + 1,
                                             request.inner_draws, rng);
      const double diff = std::fabs(doubled.estimate - by_seed[0].estimate);
      const double tol = 3.0 * std::hypot(doubled.se, by_seed[0].se);
      const bool ok = diff <= std::max(tol, 1e-12);
      trace_pass = trace_pass && ok;
      consistency.push_back({{"kind", "node-doubling"},
                             {"diff", diff},
                             {"tolerance", tol},
                             {"pass", ok}});
    }

    trace["instance"] = {{"n", spec.n}, {"p", spec.p}, {"nu", spec.nu}};
    trace["estimates"] = estimates;
    trace["consistency"] = consistency;
    trace["pass"] = trace_pass;
    all_pass = all_pass && trace_pass;
  }

  VerifySummary summary;
  summary.report["version"] = kVersion;
  summary.report["falsify"] = request.falsify_mills;
  summary.report["checks"] = checks;
  summary.report["trace"] = trace;
  summary.report["pass"] = all_pass;
  summary.pass = all_pass;

  if (!request.out_dir.empty()) {
    std::filesystem::create_directories(request.out_dir);
    const auto path =
        std::filesystem::path(request.out_dir) / "verification_report.json";
    std::ofstream out(path, std::ios::binary);
    if (!out) {
      throw std::runtime_error("cannot write '" + path.string() + "'");
    }
    out << summary.report.dump(2) << "\n";
  }
  return summary;
}

}  // namespace robitmc
