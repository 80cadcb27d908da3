#pragma once

#include <json.hpp>
#include <string>

#include "robitmc/verify.hpp"

namespace robitmc {

struct TraceInstanceSpec {
  Eigen::Index n = 2;
  Eigen::Index p = 1;
  double nu = 3.0;
};

struct VerifyRequest {
  bool falsify_mills = false;  // inflate kappa so the mills check must fail
  TraceInstanceSpec trace_instance;
  int seeds = 2;          // independent streams for the trace estimate
  int outer_nodes = 61;   // Simpson nodes (doubled once for the node check)
  int inner_draws = 2000;
  std::uint64_t seed = 0;
  std::string out_dir;  // verification_report.json goes here; "" skips writing
};

struct VerifySummary {
  nlohmann::json report;
  bool pass = false;
};

// Runs the full verification battery: the Mills-ratio tail bound over a
// nu x m x t grid, the per-observation integrand bound, the Omega spectral
// identities on random instances, and the Monte Carlo trace integral with
// cross-seed and node-doubling consistency checks.
VerifySummary run_verification(const VerifyRequest& request);

nlohmann::json bound_report_json(const BoundCheckReport& report);

}  // namespace robitmc
