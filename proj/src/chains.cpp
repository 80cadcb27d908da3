#include "robitmc/chains.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <stdexcept>

#include "robitmc/diagnostics.hpp"
#include "robitmc/special.hpp"

namespace robitmc {

namespace {

std::string format_nu(double nu) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", nu);
  return buf;
}

// beta ~ N(M^{-1} rhs, M^{-1}) from an existing factorization of M.
Eigen::VectorXd draw_beta(const Eigen::LLT<Eigen::MatrixXd>& llt,
                          const Eigen::VectorXd& rhs, RngStream& rng) {
  const Eigen::VectorXd mean = llt.solve(rhs);
  Eigen::VectorXd xi(rhs.size());
  for (Eigen::Index i = 0; i < xi.size(); ++i) xi[i] = rng.normal();
  return mean + llt.matrixU().solve(xi);
}

struct Augmented {
  Eigen::VectorXd z;
  Eigen::VectorXd lambda;
};

Augmented draw_latents(RngStream& rng, const ChainState& state,
                       const Dataset& data, const ModelKind& model) {
  const Eigen::Index n = data.n();
  const Eigen::VectorXd xb = data.X * state.beta;
  Augmented aug{Eigen::VectorXd(n), Eigen::VectorXd::Ones(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const TruncationSide side =
        data.y[i] == 1 ? TruncationSide::Positive : TruncationSide::Negative;
    if (model.is_robit()) {
      aug.z[i] = sample_truncated_t(rng, model.nu, xb[i], side);
      const double resid = aug.z[i] - xb[i];
      aug.lambda[i] = sample_gamma(rng, 0.5 * (model.nu + 1.0),
                                   0.5 * (model.nu + resid * resid));
    } else {
      aug.z[i] = sample_truncated_normal(rng, xb[i], side);
    }
  }
  return aug;
}

ChainState da_step(RngStream& rng, const ChainState& state,
                   const Dataset& data, const Prior& prior,
                   const ModelKind& model) {
  Augmented aug = draw_latents(rng, state, data, model);
  const LambdaDiag lambda{aug.lambda};
  const Eigen::MatrixXd prec = posterior_precision(data.X, lambda, prior.sigma_a);
  const Eigen::VectorXd rhs =
      data.X.transpose() * lambda.values.cwiseProduct(aug.z) +
      prior.sigma_a * prior.beta_a;
  Eigen::LLT<Eigen::MatrixXd> llt(prec);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("chain step: posterior precision not positive definite");
  }
  ChainState next;
  next.beta = draw_beta(llt, rhs, rng);
  next.last_z = std::move(aug.z);
  next.last_lambda = std::move(aug.lambda);
  next.step_index = state.step_index + 1;
  return next;
}

ChainState sandwich_step(RngStream& rng, const ChainState& state,
                         const Dataset& data, const Prior& prior,
                         const ModelKind& model,
                         std::int64_t* degenerate_rescales,
                         bool force_unit_h) {
  Augmented aug = draw_latents(rng, state, data, model);
  const LambdaDiag lambda{aug.lambda};
  const Eigen::MatrixXd prec = posterior_precision(data.X, lambda, prior.sigma_a);
  Eigen::LLT<Eigen::MatrixXd> llt(prec);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("chain step: posterior precision not positive definite");
  }
  const Eigen::VectorXd lam_z = lambda.values.cwiseProduct(aug.z);
  const Eigen::VectorXd u = data.X.transpose() * lam_z;

  double h = 1.0;
  if (!force_unit_h) {
    // Gamma rate z^T Lambda^{1/2} (I - Q) Lambda^{1/2} z / 2 with
    // Q = Lambda^{1/2} X M^{-1} X^T Lambda^{1/2}, rewritten as the
    // cancellation-free sum of the weighted residual norm and the prior
    // quadratic at b_hat = M^{-1} u.
    const Eigen::VectorXd b_hat = llt.solve(u);
    const Eigen::VectorXd resid = aug.z - data.X * b_hat;
    const double rate =
        0.5 * (resid.dot(lambda.values.cwiseProduct(resid)) +
               b_hat.dot(prior.sigma_a * b_hat));
    if (std::isfinite(rate) && rate > 0.0) {
      h = std::sqrt(sample_gamma(rng, 0.5 * static_cast<double>(data.n()), rate));
    } else if (degenerate_rescales != nullptr) {
      ++*degenerate_rescales;
    }
  }

  const Eigen::VectorXd rhs = h * u + prior.sigma_a * prior.beta_a;
  ChainState next;
  next.beta = draw_beta(llt, rhs, rng);
  next.last_z = h * aug.z;
  next.last_lambda = std::move(aug.lambda);
  next.step_index = state.step_index + 1;
  return next;
}

}  // namespace

std::string ModelKind::label() const {
  return is_robit() ? "robit-" + format_nu(nu) : "probit";
}

ModelKind ModelKind::probit() { return ModelKind{Family::Probit, 0.0}; }

ModelKind ModelKind::robit(double nu) {
  if (!std::isfinite(nu) || nu <= 0.0) {
    throw std::invalid_argument("robit model: nu must be positive and finite");
  }
  if (nu <= 2.0) {
    std::cerr << "warning: robit with nu = " << format_nu(nu)
              << " <= 2; the trace-class guarantee requires nu > 2\n";
  }
  return ModelKind{Family::Robit, nu};
}

std::string chain_kind_label(ChainKind kind) {
  return kind == ChainKind::DataAugmentation ? "da" : "sandwich";
}

ChainState init_state(const Dataset& data, Eigen::VectorXd init_beta) {
  if (init_beta.size() != data.p()) {
    throw std::invalid_argument("initial beta length does not match design");
  }
  if (!init_beta.allFinite()) {
    throw std::invalid_argument("initial beta has non-finite entries");
  }
  ChainState state;
  state.beta = std::move(init_beta);
  state.last_z = Eigen::VectorXd::Zero(data.n());
  state.last_lambda = Eigen::VectorXd::Ones(data.n());
  state.step_index = 0;
  return state;
}

ChainConfig ChainConfig::with_defaults(std::int64_t iterations,
                                       Eigen::VectorXd init_beta) {
  ChainConfig config;
  config.iterations = iterations;
  config.burn_in = 2 * iterations;
  config.init_beta = std::move(init_beta);
  return config;
}

ChainState robit_da_step(RngStream& rng, const ChainState& state,
                         const Dataset& data, const Prior& prior, double nu) {
  return da_step(rng, state, data, prior, ModelKind::robit(nu));
}

ChainState robit_sandwich_step(RngStream& rng, const ChainState& state,
                               const Dataset& data, const Prior& prior,
                               double nu, std::int64_t* degenerate_rescales,
                               bool force_unit_h) {
  return sandwich_step(rng, state, data, prior, ModelKind::robit(nu),
                       degenerate_rescales, force_unit_h);
}

ChainState probit_da_step(RngStream& rng, const ChainState& state,
                          const Dataset& data, const Prior& prior) {
  return da_step(rng, state, data, prior, ModelKind::probit());
}

ChainState probit_sandwich_step(RngStream& rng, const ChainState& state,
                                const Dataset& data, const Prior& prior,
                                std::int64_t* degenerate_rescales,
                                bool force_unit_h) {
  return sandwich_step(rng, state, data, prior, ModelKind::probit(),
                       degenerate_rescales, force_unit_h);
}

SampleMatrix run_chain(const Dataset& data, const Prior& prior,
                       const ModelKind& model, ChainKind kind,
                       const ChainConfig& config) {
  if (config.iterations < 1) {
    throw std::invalid_argument("run_chain: iterations must be >= 1");
  }
  if (config.burn_in < 0) {
    throw std::invalid_argument("run_chain: burn_in must be >= 0");
  }
  if (config.thin < 1) {
    throw std::invalid_argument("run_chain: thin must be >= 1");
  }
  if (prior.p() != data.p()) {
    throw std::invalid_argument("run_chain: prior dimension does not match design");
  }
  // A robit ModelKind validates nu on construction; reject a hand-rolled one.
  if (model.is_robit() && !(model.nu > 0.0)) {
    throw std::invalid_argument("run_chain: robit model requires nu > 0");
  }

  RngStream rng(config.seed, config.stream);
  ChainState state = init_state(data, config.init_beta);
  SampleMatrix out;

  const auto step = [&]() {
    switch (kind) {
      case ChainKind::DataAugmentation:
        state = model.is_robit() ? robit_da_step(rng, state, data, prior, model.nu)
                                 : probit_da_step(rng, state, data, prior);
        break;
      case ChainKind::Sandwich:
        state = model.is_robit()
                    ? robit_sandwich_step(rng, state, data, prior, model.nu,
                                          &out.degenerate_rescales)
                    : probit_sandwich_step(rng, state, data, prior,
                                           &out.degenerate_rescales);
        break;
    }
  };

  for (std::int64_t m = 0; m < config.burn_in; ++m) step();

  const Eigen::Index kept = config.iterations / config.thin;
  out.draws.resize(kept, data.p());
  out.lik.resize(kept);
  out.lpd.resize(kept);
  Eigen::Index row = 0;
  for (std::int64_t m = 1; m <= config.iterations; ++m) {
    step();
    if (m % config.thin == 0) {
      out.draws.row(row) = state.beta.transpose();
      out.lik[row] = log_likelihood(state.beta, data, model);
      out.lpd[row] = log_posterior(state.beta, data, prior, model);
      ++row;
    }
  }
  out.draws.conservativeResize(row, data.p());
  out.lik.conservativeResize(row);
  out.lpd.conservativeResize(row);
  return out;
}

}  // namespace robitmc
