#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "robitmc/chains.hpp"

namespace robitmc {

enum class TraceMode { Coords, LikPd };

struct ChainRequest {
  ModelKind model;
  ChainKind kind = ChainKind::DataAugmentation;
};

struct RunRequest {
  Dataset data;
  Prior prior;
  std::string prior_label = "identity";
  std::vector<ChainRequest> chains;
  std::int64_t iterations = 0;
  std::int64_t burn_in = -1;  // -1 resolves to 2 * iterations
  std::int64_t thin = 1;
  std::uint64_t seed = 0;
  Eigen::VectorXd init_beta;  // empty resolves to zeros
  int max_lag = 50;
  TraceMode trace_mode = TraceMode::Coords;
  std::vector<std::string> coord_labels;  // optional names for beta_1..beta_p
  std::string out_dir;
  nlohmann::json config_echo;  // resolved configuration, hashed into the manifest
};

struct ChainResult {
  std::string label;
  ModelKind model;
  ChainKind kind = ChainKind::DataAugmentation;
  std::uint64_t stream = 0;
  SampleMatrix samples;
  double seconds = 0;
};

struct RunOutput {
  std::string manifest_hash;
  std::vector<std::string> files;  // paths written, relative to out_dir
  std::vector<ChainResult> results;
};

// "<model>-<kind>-<prior>", e.g. "robit-3-sandwich-g1000".
std::string chain_label(const ModelKind& model, ChainKind kind,
                        const std::string& prior_label);

// Runs every requested chain (in parallel, one RNG stream per chain, stream
// id = position in the request) and writes samples_<label>.csv, acf.csv,
// runmean.csv, trace_scalars.csv, summary.json and figures/*.svg into
// out_dir. Every file carries the manifest hash; identical requests produce
// byte-identical sample files.
RunOutput run_chains_to_dir(const RunRequest& request);

}  // namespace robitmc
