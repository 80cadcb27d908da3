#include <doctest.h>

#include <stdexcept>
#include <vector>

#include "oracles.hpp"
#include "robitmc/chains.hpp"
#include "robitmc/diagnostics.hpp"
#include "robitmc/special.hpp"

using namespace robitmc;

namespace {

Dataset three_point_dataset() {
  Eigen::MatrixXd X(3, 1);
  X << 0.5, -1.0, 1.5;
  Eigen::VectorXi y(3);
  y << 1, 0, 1;
  return Dataset::create(X, y);
}

std::vector<double> column(const SampleMatrix& samples, Eigen::Index j) {
  std::vector<double> out(static_cast<std::size_t>(samples.kept()));
  for (Eigen::Index i = 0; i < samples.kept(); ++i) {
    out[static_cast<std::size_t>(i)] = samples.draws(i, j);
  }
  return out;
}

// Sample mean against the quadrature posterior, with a batch-means error bar.
void check_against_oracle(const SampleMatrix& samples,
                          const oracle::Moments& want) {
  const std::vector<double> beta = column(samples, 0);
  const double got_mean = oracle::mean(beta);
  const double got_sd = oracle::sample_sd(beta);
  const double mcse = mcse_batch_means(beta, 30);
  const double want_sd = std::sqrt(want.variance);
  INFO("mean ", got_mean, " vs ", want.mean, ", mcse ", mcse);
  CHECK(std::fabs(got_mean - want.mean) <= 5.0 * mcse + 1e-4);
  CHECK(std::fabs(got_sd - want_sd) <= 0.05 * want_sd);
}

}  // namespace

TEST_SUITE("chains") {

TEST_CASE("model labels and validation") {
  CHECK(ModelKind::probit().label() == "probit");
  CHECK(ModelKind::robit(3.0).label() == "robit-3");
  CHECK(ModelKind::robit(2.5).label() == "robit-2.5");
  CHECK(ModelKind::robit(1000.0).label() == "robit-1000");
  CHECK_THROWS_AS((void)ModelKind::robit(0.0), std::invalid_argument);
  CHECK_THROWS_AS((void)ModelKind::robit(-1.0), std::invalid_argument);
  CHECK(chain_kind_label(ChainKind::DataAugmentation) == "da");
  CHECK(chain_kind_label(ChainKind::Sandwich) == "sandwich");
}

TEST_CASE("config defaults and run bookkeeping") {
  const ChainConfig config =
      ChainConfig::with_defaults(500, Eigen::VectorXd::Zero(1));
  CHECK(config.iterations == 500);
  CHECK(config.burn_in == 1000);
  CHECK(config.thin == 1);

  const Dataset data = three_point_dataset();
  const Prior prior = build_identity_prior(1);

  ChainConfig small;
  small.iterations = 10;
  small.burn_in = 5;
  small.thin = 3;
  small.seed = 9;
  small.init_beta = Eigen::VectorXd::Zero(1);
  const SampleMatrix out = run_chain(data, prior, ModelKind::robit(3.0),
                                     ChainKind::DataAugmentation, small);
  CHECK(out.kept() == 3);  // sweeps 3, 6, 9
  CHECK(out.lik.size() == 3);
  CHECK(out.lpd.size() == 3);
  CHECK(out.degenerate_rescales == 0);

  ChainConfig bad = small;
  bad.iterations = 0;
  CHECK_THROWS_AS((void)run_chain(data, prior, ModelKind::probit(),
                                  ChainKind::DataAugmentation, bad),
                  std::invalid_argument);
  bad = small;
  bad.thin = 0;
  CHECK_THROWS_AS((void)run_chain(data, prior, ModelKind::probit(),
                                  ChainKind::DataAugmentation, bad),
                  std::invalid_argument);
  bad = small;
  bad.burn_in = -1;
  CHECK_THROWS_AS((void)run_chain(data, prior, ModelKind::probit(),
                                  ChainKind::DataAugmentation, bad),
                  std::invalid_argument);
  bad = small;
  bad.init_beta = Eigen::VectorXd::Zero(2);
  CHECK_THROWS_AS((void)run_chain(data, prior, ModelKind::probit(),
                                  ChainKind::DataAugmentation, bad),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)run_chain(data, build_identity_prior(2),
                                  ModelKind::probit(),
                                  ChainKind::DataAugmentation, small),
                  std::invalid_argument);
}

TEST_CASE("latent draws respect the response signs") {
  const Dataset data = three_point_dataset();
  const Prior prior = build_identity_prior(1);
  RngStream rng(11, 0);
  ChainState state = init_state(data, Eigen::VectorXd::Zero(1));
  for (int sweep = 0; sweep < 200; ++sweep) {
    state = sweep % 2 == 0
                ? robit_da_step(rng, state, data, prior, 3.0)
                : robit_sandwich_step(rng, state, data, prior, 3.0);
    for (Eigen::Index i = 0; i < data.n(); ++i) {
      CHECK((state.last_z[i] > 0.0) == (data.y[i] == 1));
      CHECK(state.last_lambda[i] > 0.0);
    }
    CHECK(state.step_index == sweep + 1);
  }
}

TEST_CASE("probit sweeps keep unit mixing weights") {
  const Dataset data = three_point_dataset();
  const Prior prior = build_identity_prior(1);
  RngStream rng(12, 0);
  ChainState state = init_state(data, Eigen::VectorXd::Zero(1));
  for (int sweep = 0; sweep < 50; ++sweep) {
    state = probit_da_step(rng, state, data, prior);
    CHECK(state.last_lambda.isOnes(0.0));
    state = probit_sandwich_step(rng, state, data, prior);
    CHECK(state.last_lambda.isOnes(0.0));
  }
}

TEST_CASE("pinned-scale sandwich reproduces data augmentation exactly") {
  const Dataset data = three_point_dataset();
  const Prior prior = build_identity_prior(1);
  RngStream rng_da(77, 0);
  RngStream rng_sw(77, 0);
  ChainState da = init_state(data, Eigen::VectorXd::Constant(1, 0.3));
  ChainState sw = init_state(data, Eigen::VectorXd::Constant(1, 0.3));
  for (int sweep = 0; sweep < 100; ++sweep) {
    da = robit_da_step(rng_da, da, data, prior, 3.0);
    sw = robit_sandwich_step(rng_sw, sw, data, prior, 3.0, nullptr,
                             /*force_unit_h=*/true);
    CHECK(da.beta[0] == sw.beta[0]);
    CHECK((da.last_z - sw.last_z).isZero(0.0));
  }
}

TEST_CASE("runs reproduce bit for bit") {
  const Dataset data = three_point_dataset();
  const Prior prior = build_identity_prior(1);
  ChainConfig config;
  config.iterations = 200;
  config.burn_in = 50;
  config.seed = 314;
  config.init_beta = Eigen::VectorXd::Zero(1);

  const ModelKind model = ModelKind::robit(3.0);
  const SampleMatrix a = run_chain(data, prior, model, ChainKind::Sandwich, config);
  const SampleMatrix b = run_chain(data, prior, model, ChainKind::Sandwich, config);
  CHECK((a.draws - b.draws).isZero(0.0));
  CHECK((a.lik - b.lik).isZero(0.0));
  CHECK((a.lpd - b.lpd).isZero(0.0));

  ChainConfig other = config;
  other.stream = 1;
  const SampleMatrix c = run_chain(data, prior, model, ChainKind::Sandwich, other);
  CHECK(a.draws(0, 0) != c.draws(0, 0));
}

TEST_CASE("recorded likelihood columns match the recorded draws") {
  const Dataset data = three_point_dataset();
  const Prior prior = build_identity_prior(1);
  ChainConfig config;
  config.iterations = 25;
  config.burn_in = 10;
  config.seed = 5;
  config.init_beta = Eigen::VectorXd::Zero(1);
  const ModelKind model = ModelKind::robit(4.0);
  const SampleMatrix out =
      run_chain(data, prior, model, ChainKind::DataAugmentation, config);
  for (Eigen::Index k = 0; k < out.kept(); ++k) {
    const Eigen::VectorXd beta = out.draws.row(k).transpose();
    CHECK(out.lik[k] == log_likelihood(beta, data, model));
    CHECK(out.lpd[k] == log_posterior(beta, data, prior, model));
  }
}

TEST_CASE("stationary moments match quadrature") {
  const Dataset data = three_point_dataset();
  const Prior prior = build_identity_prior(1);

  oracle::Scalar1dPosterior robit_post;
  robit_post.x = {0.5, -1.0, 1.5};
  robit_post.y = {1, 0, 1};
  robit_post.log_cdf = [](double s) { return t_log_cdf(3.0, s); };
  robit_post.log_survival = [](double s) { return t_log_survival(3.0, s); };
  const oracle::Moments robit_want = oracle::posterior_moments_1d(robit_post);

  oracle::Scalar1dPosterior probit_post = robit_post;
  probit_post.log_cdf = [](double s) { return normal_log_cdf(s); };
  probit_post.log_survival = [](double s) { return normal_log_survival(s); };
  const oracle::Moments probit_want = oracle::posterior_moments_1d(probit_post);

  ChainConfig config;
  config.iterations = 30000;
  config.burn_in = 2000;
  config.seed = 20240915;
  config.init_beta = Eigen::VectorXd::Zero(1);

  SUBCASE("robit data augmentation") {
    check_against_oracle(run_chain(data, prior, ModelKind::robit(3.0),
                                   ChainKind::DataAugmentation, config),
                         robit_want);
  }
  SUBCASE("robit sandwich") {
    check_against_oracle(run_chain(data, prior, ModelKind::robit(3.0),
                                   ChainKind::Sandwich, config),
                         robit_want);
  }
  SUBCASE("probit data augmentation") {
    check_against_oracle(run_chain(data, prior, ModelKind::probit(),
                                   ChainKind::DataAugmentation, config),
                         probit_want);
  }
  SUBCASE("probit sandwich") {
    check_against_oracle(run_chain(data, prior, ModelKind::probit(),
                                   ChainKind::Sandwich, config),
                         probit_want);
  }
}

}  // TEST_SUITE
