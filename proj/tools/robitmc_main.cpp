#include <CLI11.hpp>
#include <charconv>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "robitmc/io.hpp"
#include "robitmc/manifest.hpp"
#include "robitmc/runner.hpp"
#include "robitmc/verifyrun.hpp"

namespace {

using robitmc::ChainKind;
using robitmc::ModelKind;

std::string format_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

struct RunOptions {
  std::string data_path;
  std::string response;
  bool intercept = true;
  std::string columns;  // integer (first k) or comma-separated names
  std::vector<std::string> models = {"robit"};
  std::vector<double> nus = {3.0};
  std::string chain = "both";
  std::string prior = "identity";
  double g = 1000.0;
  std::string prior_mean_path;
  std::string prior_precision_path;
  std::vector<double> init;
  std::int64_t iters = 0;
  std::int64_t burnin = -1;
  std::int64_t thin = 1;
  std::uint64_t seed = 0;
  int max_lag = 50;
  std::string trace = "coords";
  std::string out_dir;
};

int do_run(const RunOptions& opt) {
  robitmc::IngestOptions ingest;
  ingest.response_column = opt.response;
  ingest.intercept = opt.intercept;
  std::vector<std::string> selected_names;
  if (!opt.columns.empty()) {
    int k = 0;
    const auto [ptr, ec] =
        std::from_chars(opt.columns.data(),
                        opt.columns.data() + opt.columns.size(), k);
    if (ec == std::errc() && ptr == opt.columns.data() + opt.columns.size()) {
      ingest.first_k = k;
    } else {
      std::size_t start = 0;
      for (;;) {
        const auto comma = opt.columns.find(',', start);
        ingest.columns.push_back(opt.columns.substr(
            start, comma == std::string::npos ? comma : comma - start));
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
    }
  }
  robitmc::Dataset data = robitmc::ingest_csv(opt.data_path, ingest);

  robitmc::RunRequest request;
  request.prior_label = "identity";
  if (opt.prior == "identity") {
    request.prior = robitmc::build_identity_prior(data.p());
  } else if (opt.prior == "gprior") {
    request.prior = robitmc::build_gprior(data.X, opt.g);
    request.prior_label = "g" + format_g(opt.g);
  } else if (opt.prior == "file") {
    if (opt.prior_precision_path.empty()) {
      throw std::runtime_error("--prior file requires --prior-precision");
    }
    Eigen::VectorXd mean = opt.prior_mean_path.empty()
                               ? Eigen::VectorXd::Zero(data.p())
                               : robitmc::read_numeric_vector(opt.prior_mean_path);
    request.prior = robitmc::Prior::create(
        std::move(mean), robitmc::read_numeric_matrix(opt.prior_precision_path));
    request.prior_label = "file";
  } else {
    throw std::runtime_error("unknown prior '" + opt.prior + "'");
  }

  std::vector<ChainKind> kinds;
  if (opt.chain == "da") {
    kinds = {ChainKind::DataAugmentation};
  } else if (opt.chain == "sandwich") {
    kinds = {ChainKind::Sandwich};
  } else if (opt.chain == "both") {
    kinds = {ChainKind::DataAugmentation, ChainKind::Sandwich};
  } else {
    throw std::runtime_error("unknown chain kind '" + opt.chain + "'");
  }

  for (const auto& model : opt.models) {
    if (model == "probit") {
      for (ChainKind kind : kinds) {
        request.chains.push_back({ModelKind::probit(), kind});
      }
    } else if (model == "robit") {
      for (double nu : opt.nus) {
        for (ChainKind kind : kinds) {
          request.chains.push_back({ModelKind::robit(nu), kind});
        }
      }
    } else {
      throw std::runtime_error("unknown model '" + model + "'");
    }
  }

  request.data = std::move(data);
  request.iterations = opt.iters;
  request.burn_in = opt.burnin;
  request.thin = opt.thin;
  request.seed = opt.seed;
  request.max_lag = opt.max_lag;
  request.trace_mode = opt.trace == "likpd" ? robitmc::TraceMode::LikPd
                                            : robitmc::TraceMode::Coords;
  request.out_dir = opt.out_dir;
  if (!opt.init.empty()) {
    request.init_beta = Eigen::Map<const Eigen::VectorXd>(
        opt.init.data(), static_cast<Eigen::Index>(opt.init.size()));
  }

  nlohmann::json config;
  config["command"] = "run";
  config["data"] = opt.data_path;
  config["response"] = opt.response;
  config["intercept"] = opt.intercept;
  config["columns"] = opt.columns;
  config["models"] = opt.models;
  config["nus"] = opt.nus;
  config["chain"] = opt.chain;
  config["prior"] = opt.prior;
  if (opt.prior == "gprior") config["g"] = opt.g;
  if (opt.prior == "file") {
    config["prior_mean"] = opt.prior_mean_path;
    config["prior_precision"] = opt.prior_precision_path;
  }
  config["init"] = opt.init;
  config["iters"] = opt.iters;
  config["burnin"] = opt.burnin < 0 ? 2 * opt.iters : opt.burnin;
  config["thin"] = opt.thin;
  config["seed"] = opt.seed;
  config["max_lag"] = opt.max_lag;
  config["trace"] = opt.trace;
  request.config_echo = config;

  const robitmc::RunOutput output = robitmc::run_chains_to_dir(request);
  std::cout << "manifest " << output.manifest_hash << "\n";
  for (const auto& r : output.results) {
    std::cout << r.label << ": kept " << r.samples.kept() << " draws in "
              << format_g(r.seconds) << "s";
    if (r.samples.degenerate_rescales > 0) {
      std::cout << " (degenerate rescales: " << r.samples.degenerate_rescales
                << ")";
    }
    std::cout << "\n";
  }
  std::cout << "wrote " << output.files.size() << " files to " << opt.out_dir
            << "\n";
  return 0;
}

robitmc::TraceInstanceSpec parse_trace_instance(const std::string& text) {
  robitmc::TraceInstanceSpec spec;
  std::size_t start = 0;
  while (start < text.size()) {
    auto comma = text.find(',', start);
    if (comma == std::string::npos) comma = text.size();
    const std::string part = text.substr(start, comma - start);
    const auto eq = part.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("bad --trace-instance component '" + part +
                               "', expected key=value");
    }
    const std::string key = part.substr(0, eq);
    const double value = std::stod(part.substr(eq + 1));
    if (key == "n") {
      spec.n = static_cast<Eigen::Index>(value);
    } else if (key == "p") {
      spec.p = static_cast<Eigen::Index>(value);
    } else if (key == "nu") {
      spec.nu = value;
    } else {
      throw std::runtime_error("unknown --trace-instance key '" + key + "'");
    }
    start = comma + 1;
  }
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Data-augmentation and sandwich MCMC for robit and probit "
               "binary regression, with numerical verification of the "
               "sampler's trace-class bounds"};
  app.require_subcommand(1);

  RunOptions run_opt;
  CLI::App* run = app.add_subcommand("run", "Run chains and write diagnostics");
  run->add_option("--data", run_opt.data_path, "CSV with header row")
      ->required();
  run->add_option("--response", run_opt.response, "response column name (0/1)")
      ->required();
  run->add_flag("--intercept,!--no-intercept", run_opt.intercept,
                "prepend an intercept column (default on)");
  run->add_option("--columns", run_opt.columns,
                  "predictor subset: a count (first k) or comma-separated names");
  run->add_option("--model", run_opt.models,
                  "model families to run: probit and/or robit")
      ->check(CLI::IsMember({"probit", "robit"}))
      ->delimiter(',');
  run->add_option("--nu", run_opt.nus, "robit degrees of freedom (repeatable)")
      ->delimiter(',');
  run->add_option("--chain", run_opt.chain, "da, sandwich, or both")
      ->check(CLI::IsMember({"da", "sandwich", "both"}));
  run->add_option("--prior", run_opt.prior, "identity, gprior, or file")
      ->check(CLI::IsMember({"identity", "gprior", "file"}));
  run->add_option("--g", run_opt.g, "g-prior scale (precision X^T X / g)");
  run->add_option("--prior-mean", run_opt.prior_mean_path,
                  "prior mean vector file (with --prior file)");
  run->add_option("--prior-precision", run_opt.prior_precision_path,
                  "prior precision matrix file (with --prior file)");
  run->add_option("--init", run_opt.init,
                  "initial beta, comma-separated (default zeros)")
      ->delimiter(',');
  run->add_option("--iters", run_opt.iters, "post-burn-in iterations")
      ->required();
  run->add_option("--burnin", run_opt.burnin,
                  "burn-in sweeps (default 2x iters)");
  run->add_option("--thin", run_opt.thin, "record every thin-th draw");
  run->add_option("--seed", run_opt.seed, "RNG seed (one stream per chain)");
  run->add_option("--max-lag", run_opt.max_lag, "largest autocorrelation lag");
  run->add_option("--trace", run_opt.trace,
                  "series for acf/runmean: coords or likpd")
      ->check(CLI::IsMember({"coords", "likpd"}));
  run->add_option("--out", run_opt.out_dir, "output directory")->required();

  robitmc::VerifyRequest verify_opt;
  std::string falsify;
  std::string trace_instance;
  CLI::App* verify =
      app.add_subcommand("verify", "Run the numerical verification battery");
  verify->add_option("--falsify", falsify,
                     "deliberately tighten a bound to prove the check can fail")
      ->check(CLI::IsMember({"mills"}));
  verify->add_option("--trace-instance", trace_instance,
                     "trace integral instance, e.g. n=2,p=1,nu=3");
  verify->add_option("--seeds", verify_opt.seeds,
                     "independent streams for the trace estimate");
  verify->add_option("--nodes", verify_opt.outer_nodes,
                     "Simpson nodes for the trace quadrature");
  verify->add_option("--inner", verify_opt.inner_draws,
                     "Monte Carlo draws per quadrature node");
  verify->add_option("--seed", verify_opt.seed, "RNG seed");
  verify->add_option("--out", verify_opt.out_dir,
                     "directory for verification_report.json");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return do_run(run_opt);
    verify_opt.falsify_mills = falsify == "mills";
    if (!trace_instance.empty()) {
      verify_opt.trace_instance = parse_trace_instance(trace_instance);
    }
    if (verify_opt.out_dir.empty()) verify_opt.out_dir = ".";
    const robitmc::VerifySummary summary = robitmc::run_verification(verify_opt);
    int failed = 0;
    for (const auto& check : summary.report["checks"]) {
      if (!check["pass"].get<bool>()) ++failed;
      std::cout << (check["pass"].get<bool>() ? "[PASS] " : "[FAIL] ")
                << check["name"].get<std::string>() << " ("
                << check["grid"].get<std::string>()
                << ") worst margin " << check["worst_margin"].get<double>()
                << " at " << check["worst_point"].get<std::string>() << "\n";
    }
    const bool trace_pass = summary.report["trace"]["pass"].get<bool>();
    std::cout << (trace_pass ? "[PASS] " : "[FAIL] ")
              << "trace-integral consistency\n";
    std::cout << (summary.pass ? "verification passed" : "verification FAILED")
              << (failed > 0 ? " (" + std::to_string(failed) + " checks failed)"
                             : "")
              << "\n";
    return summary.pass ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
