#include "robitmc/runner.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <set>
#include <stdexcept>

#include "robitmc/diagnostics.hpp"
#include "robitmc/io.hpp"
#include "robitmc/manifest.hpp"
#include "robitmc/svg.hpp"

namespace robitmc {

namespace {

std::vector<double> eigen_to_vec(const Eigen::VectorXd& v) {
  return {v.data(), v.data() + v.size()};
}

std::vector<double> matrix_column(const Eigen::MatrixXd& m, Eigen::Index j) {
  std::vector<double> out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out[static_cast<std::size_t>(i)] = m(i, j);
  }
  return out;
}

std::string sanitize(const std::string& name) {
  std::string out;
  for (char c : name) {
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' ||
            c == '.')
               ? c
               : '_';
  }
  return out;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write '" + path.string() + "'");
  }
  return out;
}

// Model/kind drawing conventions: probit red; the smallest robit nu gray,
// larger nus blue then the extended palette; DA solid, sandwich dashed.
std::string model_color(const ModelKind& model,
                        const std::vector<double>& robit_nus) {
  if (!model.is_robit()) return "#d62728";
  static const char* kPalette[] = {"#7f7f7f", "#1f77b4", "#2ca02c",
                                   "#9467bd", "#8c564b", "#e377c2"};
  const auto it =
      std::find(robit_nus.begin(), robit_nus.end(), model.nu);
  const std::size_t idx =
      it == robit_nus.end() ? 0 : static_cast<std::size_t>(it - robit_nus.begin());
  return kPalette[idx % (sizeof(kPalette) / sizeof(kPalette[0]))];
}

struct ChainSeries {
  std::string name;            // beta_1.. or lik/lpd
  std::vector<double> values;  // one per kept draw
};

std::vector<ChainSeries> traced_series(const SampleMatrix& samples,
                                       TraceMode mode,
                                       const std::vector<std::string>& labels) {
  std::vector<ChainSeries> out;
  if (mode == TraceMode::Coords) {
    for (Eigen::Index j = 0; j < samples.draws.cols(); ++j) {
      const std::string name = j < static_cast<Eigen::Index>(labels.size())
                                   ? labels[static_cast<std::size_t>(j)]
                                   : "beta_" + std::to_string(j + 1);
      out.push_back({name, matrix_column(samples.draws, j)});
    }
  } else {
    out.push_back({"lik", eigen_to_vec(samples.lik)});
    out.push_back({"lpd", eigen_to_vec(samples.lpd)});
  }
  return out;
}

}  // namespace

std::string chain_label(const ModelKind& model, ChainKind kind,
                        const std::string& prior_label) {
  return model.label() + "-" + chain_kind_label(kind) + "-" + prior_label;
}

RunOutput run_chains_to_dir(const RunRequest& request) {
  if (request.chains.empty()) {
    throw std::invalid_argument("run: no chains requested");
  }
  if (request.iterations < 1) {
    throw std::invalid_argument("run: iterations must be >= 1");
  }
  if (request.out_dir.empty()) {
    throw std::invalid_argument("run: output directory required");
  }
  {
    std::set<std::string> labels;
    for (const auto& c : request.chains) {
      if (!labels.insert(chain_label(c.model, c.kind, request.prior_label))
               .second) {
        throw std::invalid_argument("run: duplicate chain label");
      }
    }
  }

  const std::filesystem::path out_dir(request.out_dir);
  std::filesystem::create_directories(out_dir / "figures");

  const nlohmann::json manifest =
      make_manifest(request.config_echo, request.data);
  const std::string hash = manifest_hash(manifest);

  const std::int64_t burn_in =
      request.burn_in >= 0 ? request.burn_in : 2 * request.iterations;
  const Eigen::VectorXd init = request.init_beta.size() > 0
                                   ? request.init_beta
                                   : Eigen::VectorXd::Zero(request.data.p());

  // One stream per chain, id = position in the request.
  std::vector<std::future<ChainResult>> futures;
  for (std::size_t idx = 0; idx < request.chains.size(); ++idx) {
    futures.push_back(std::async(std::launch::async, [&, idx]() {
      const ChainRequest& cr = request.chains[idx];
      ChainConfig config;
      config.iterations = request.iterations;
      config.burn_in = burn_in;
      config.thin = request.thin;
      config.seed = request.seed;
      config.stream = idx;
      config.init_beta = init;
      const auto start = std::chrono::steady_clock::now();
      ChainResult result;
      result.label = chain_label(cr.model, cr.kind, request.prior_label);
      result.model = cr.model;
      result.kind = cr.kind;
      result.stream = idx;
      result.samples =
          run_chain(request.data, request.prior, cr.model, cr.kind, config);
      result.seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
              .count();
      return result;
    }));
  }

  RunOutput output;
  output.manifest_hash = hash;
  for (auto& f : futures) output.results.push_back(f.get());

  const Eigen::Index p = request.data.p();
  std::vector<std::string> coord_labels = request.coord_labels;
  if (coord_labels.size() != static_cast<std::size_t>(p)) {
    coord_labels.clear();
    for (Eigen::Index j = 0; j < p; ++j) {
      coord_labels.push_back("beta_" + std::to_string(j + 1));
    }
  }

  const auto emit = [&](const std::string& rel) {
    output.files.push_back(rel);
    return open_out(out_dir / rel);
  };

  // samples_<label>.csv: iteration is the post-burn-in sweep index.
  for (const auto& r : output.results) {
    auto out = emit("samples_" + sanitize(r.label) + ".csv");
    out << "# manifest: " << hash << "\n";
    out << "iteration";
    for (const auto& name : coord_labels) out << "," << name;
    out << ",lik,lpd\n";
    for (Eigen::Index i = 0; i < r.samples.kept(); ++i) {
      out << (i + 1) * request.thin;
      for (Eigen::Index j = 0; j < p; ++j) {
        out << "," << format_g17(r.samples.draws(i, j));
      }
      out << "," << format_g17(r.samples.lik[i]) << ","
          << format_g17(r.samples.lpd[i]) << "\n";
    }
  }

  // Per-chain traced series drive acf.csv, runmean.csv, and the figures.
  std::vector<std::vector<ChainSeries>> all_series;
  Eigen::Index kept_min = std::numeric_limits<Eigen::Index>::max();
  for (const auto& r : output.results) {
    all_series.push_back(
        traced_series(r.samples, request.trace_mode, coord_labels));
    kept_min = std::min(kept_min, r.samples.kept());
  }
  if (kept_min < 2) {
    throw std::invalid_argument(
        "run: fewer than 2 kept draws per chain; reduce thin or raise iters");
  }
  const int max_lag =
      std::max(1, std::min<int>(request.max_lag,
                                static_cast<int>(kept_min) - 1));

  std::vector<double> robit_nus;
  for (const auto& r : output.results) {
    if (r.model.is_robit() &&
        std::find(robit_nus.begin(), robit_nus.end(), r.model.nu) ==
            robit_nus.end()) {
      robit_nus.push_back(r.model.nu);
    }
  }
  std::sort(robit_nus.begin(), robit_nus.end());

  // acf.csv: lag, then one column per chain/series pair.
  {
    std::vector<std::vector<double>> acfs;
    std::vector<std::string> names;
    for (std::size_t c = 0; c < output.results.size(); ++c) {
      for (const auto& s : all_series[c]) {
        names.push_back(output.results[c].label + "." + s.name);
        acfs.push_back(autocorrelation(s.values, max_lag).values);
      }
    }
    auto out = emit("acf.csv");
    out << "# manifest: " << hash << "\n";
    out << "lag";
    for (const auto& n : names) out << "," << n;
    out << "\n";
    for (int k = 0; k <= max_lag; ++k) {
      out << k;
      for (const auto& a : acfs) out << "," << format_g17(a[static_cast<std::size_t>(k)]);
      out << "\n";
    }

    // One ACF figure per series name, all chains overlaid.
    for (std::size_t si = 0; si < all_series[0].size(); ++si) {
      std::vector<SvgSeries> fig;
      for (std::size_t c = 0; c < output.results.size(); ++c) {
        SvgSeries s;
        s.label = output.results[c].label;
        s.color = model_color(output.results[c].model, robit_nus);
        s.dashed = output.results[c].kind == ChainKind::Sandwich;
        for (int k = 0; k <= max_lag; ++k) {
          s.x.push_back(k);
          s.y.push_back(acfs[c * all_series[0].size() + si][static_cast<std::size_t>(k)]);
        }
        fig.push_back(std::move(s));
      }
      const std::string name = all_series[0][si].name;
      auto out_fig = emit("figures/acf_" + sanitize(name) + ".svg");
      out_fig << render_line_chart("autocorrelation: " + name, "lag",
                                   "autocorrelation", fig,
                                   "manifest: " + hash);
    }
  }

  // runmean.csv and running-mean figures.
  {
    std::vector<std::vector<double>> means;
    std::vector<std::string> names;
    for (std::size_t c = 0; c < output.results.size(); ++c) {
      for (const auto& s : all_series[c]) {
        names.push_back(output.results[c].label + "." + s.name);
        means.push_back(running_mean(s.values));
      }
    }
    auto out = emit("runmean.csv");
    out << "# manifest: " << hash << "\n";
    out << "iteration";
    for (const auto& n : names) out << "," << n;
    out << "\n";
    for (Eigen::Index i = 0; i < kept_min; ++i) {
      out << (i + 1) * request.thin;
      for (const auto& m : means) {
        out << "," << format_g17(m[static_cast<std::size_t>(i)]);
      }
      out << "\n";
    }

    const std::size_t stride =
        std::max<std::size_t>(1, static_cast<std::size_t>(kept_min) / 2000);
    for (std::size_t si = 0; si < all_series[0].size(); ++si) {
      std::vector<SvgSeries> fig;
      for (std::size_t c = 0; c < output.results.size(); ++c) {
        SvgSeries s;
        s.label = output.results[c].label;
        s.color = model_color(output.results[c].model, robit_nus);
        s.dashed = output.results[c].kind == ChainKind::Sandwich;
        const auto& m = means[c * all_series[0].size() + si];
        for (std::size_t i = 0; i < m.size(); i += stride) {
          s.x.push_back(static_cast<double>((i + 1) * request.thin));
          s.y.push_back(m[i]);
        }
        fig.push_back(std::move(s));
      }
      const std::string name = all_series[0][si].name;
      auto out_fig = emit("figures/runmean_" + sanitize(name) + ".svg");
      out_fig << render_line_chart("running mean: " + name, "iteration",
                                   "running mean", fig, "manifest: " + hash);
    }
  }

  // trace_scalars.csv: lik and lpd for every chain.
  {
    auto out = emit("trace_scalars.csv");
    out << "# manifest: " << hash << "\n";
    out << "iteration";
    for (const auto& r : output.results) {
      out << "," << r.label << ".lik," << r.label << ".lpd";
    }
    out << "\n";
    for (Eigen::Index i = 0; i < kept_min; ++i) {
      out << (i + 1) * request.thin;
      for (const auto& r : output.results) {
        out << "," << format_g17(r.samples.lik[i]) << ","
            << format_g17(r.samples.lpd[i]);
      }
      out << "\n";
    }
  }

  // summary.json: manifest, per-chain statistics, file list.
  {
    nlohmann::json chains = nlohmann::json::array();
    for (const auto& r : output.results) {
      nlohmann::json stats;
      stats["label"] = r.label;
      stats["model"] = r.model.label();
      stats["kind"] = chain_kind_label(r.kind);
      if (r.model.is_robit()) stats["nu"] = r.model.nu;
      stats["seed"] = request.seed;
      stats["stream"] = r.stream;
      stats["iterations"] = request.iterations;
      stats["burn_in"] = burn_in;
      stats["thin"] = request.thin;
      stats["kept"] = r.samples.kept();
      stats["degenerate_rescales"] = r.samples.degenerate_rescales;
      stats["seconds"] = r.seconds;
      const Eigen::Index kept = r.samples.kept();
      nlohmann::json mean = nlohmann::json::array();
      nlohmann::json mcse = nlohmann::json::array();
      nlohmann::json acf1 = nlohmann::json::array();
      for (Eigen::Index j = 0; j < p; ++j) {
        const auto col = matrix_column(r.samples.draws, j);
        mean.push_back(r.samples.draws.col(j).mean());
        if (kept >= 4) {
          const int batches = static_cast<int>(
              std::clamp<Eigen::Index>(kept / 10, 2, 100));
          mcse.push_back(mcse_batch_means(col, batches));
        } else {
          mcse.push_back(nullptr);
        }
        if (kept >= 3) {
          acf1.push_back(autocorrelation(col, 1).values[1]);
        } else {
          acf1.push_back(nullptr);
        }
      }
      stats["coord_mean"] = mean;
      stats["coord_mcse"] = mcse;
      stats["coord_acf1"] = acf1;
      stats["lik_mean"] = r.samples.lik.mean();
      stats["lpd_mean"] = r.samples.lpd.mean();
      chains.push_back(stats);
    }
    nlohmann::json summary;
    summary["manifest"] = manifest;
    summary["manifest_hash"] = hash;
    summary["coord_labels"] = coord_labels;
    summary["chains"] = chains;
    auto out = emit("summary.json");
    out << summary.dump(2) << "\n";
  }

  return output;
}

}  // namespace robitmc
