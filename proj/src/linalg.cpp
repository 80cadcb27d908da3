#include "robitmc/linalg.hpp"

#include <stdexcept>
#include <string>

namespace robitmc {

namespace {

void check_finite(const Eigen::MatrixXd& m, const char* what) {
  if (!m.allFinite()) {
    throw std::invalid_argument(std::string(what) + " has non-finite entries");
  }
}

// Thin SVD of Lambda^{1/2} W.
Eigen::BDCSVD<Eigen::MatrixXd> whitened_svd(const Eigen::MatrixXd& W,
                                            const LambdaDiag& lambda,
                                            unsigned options) {
  if (lambda.values.size() != W.rows()) {
    throw std::invalid_argument("lambda length does not match row count");
  }
  const Eigen::MatrixXd A =
      lambda.values.array().sqrt().matrix().asDiagonal() * W;
  return Eigen::BDCSVD<Eigen::MatrixXd>(A, options);
}

// V f(D) V^T + complement * (I - V V^T) for spectral factors f(d_i^2).
Eigen::MatrixXd spectral_form(const Eigen::MatrixXd& W,
                              const LambdaDiag& lambda, bool invert) {
  const auto svd = whitened_svd(W, lambda, Eigen::ComputeThinV);
  const Eigen::Index p = W.cols();
  const Eigen::VectorXd d = svd.singularValues();
  Eigen::VectorXd factors(d.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    const double f = 2.0 * d[i] * d[i] + 1.0;
    factors[i] = invert ? f : 1.0 / f;
  }
  const Eigen::MatrixXd& V = svd.matrixV();
  if (W.rows() >= p) {
    return V * factors.asDiagonal() * V.transpose();
  }
  return V * factors.asDiagonal() * V.transpose() +
         (Eigen::MatrixXd::Identity(p, p) - V * V.transpose());
}

}  // namespace

Dataset Dataset::create(Eigen::MatrixXd X, Eigen::VectorXi y) {
  if (X.rows() < 1 || X.cols() < 1) {
    throw std::invalid_argument("dataset: X must have at least one row and column");
  }
  check_finite(X, "dataset: X");
  if (y.size() != X.rows()) {
    throw std::invalid_argument("dataset: y length does not match row count of X");
  }
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y[i] != 0 && y[i] != 1) {
      throw std::invalid_argument("dataset: y entries must be 0 or 1 (row " +
                                  std::to_string(i + 1) + ")");
    }
  }
  return Dataset{std::move(X), std::move(y)};
}

Prior Prior::create(Eigen::VectorXd beta_a, Eigen::MatrixXd sigma_a) {
  const Eigen::Index p = beta_a.size();
  if (sigma_a.rows() != p || sigma_a.cols() != p) {
    throw std::invalid_argument("prior: sigma_a must be p x p with p = len(beta_a)");
  }
  check_finite(sigma_a, "prior: sigma_a");
  check_finite(beta_a, "prior: beta_a");
  const double scale = sigma_a.norm();
  if ((sigma_a - sigma_a.transpose()).norm() > 1e-10 * scale) {
    throw std::invalid_argument("prior: sigma_a must be symmetric");
  }
  Eigen::MatrixXd sym = 0.5 * (sigma_a + sigma_a.transpose());
  Eigen::LLT<Eigen::MatrixXd> llt(sym);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("prior: sigma_a is not positive definite");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() <= 0.0) {
    throw std::runtime_error("prior: sigma_a is not positive definite");
  }
  const Eigen::VectorXd root = eig.eigenvalues().array().sqrt();
  Prior prior;
  prior.beta_a = std::move(beta_a);
  prior.sigma_a = sym;
  prior.log_det_sigma_a = eig.eigenvalues().array().log().sum();
  prior.sqrt_sigma_a =
      eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().transpose();
  prior.inv_sqrt_sigma_a = eig.eigenvectors() *
                           root.cwiseInverse().asDiagonal() *
                           eig.eigenvectors().transpose();
  const double recon_err =
      (prior.sqrt_sigma_a * prior.sqrt_sigma_a - sym).norm();
  if (recon_err > 1e-10 * scale) {
    throw std::runtime_error("prior: square root reconstruction failed");
  }
  return prior;
}

Prior build_identity_prior(Eigen::Index p) {
  if (p < 1) throw std::invalid_argument("identity prior: p must be >= 1");
  return Prior::create(Eigen::VectorXd::Zero(p),
                       Eigen::MatrixXd::Identity(p, p));
}

Prior build_gprior(const Eigen::MatrixXd& X, double g) {
  if (!(g > 0.0) || !std::isfinite(g)) {
    throw std::invalid_argument("g-prior: g must be positive and finite");
  }
  if (X.rows() < X.cols()) {
    throw std::invalid_argument(
        "g-prior: requires n >= p; X^T X is rank deficient when n < p");
  }
  const Eigen::MatrixXd gram = X.transpose() * X / g;
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("g-prior: X^T X / g is not positive definite");
  }
  return Prior::create(Eigen::VectorXd::Zero(X.cols()), gram);
}

Whitened whiten(const Dataset& data, const Prior& prior) {
  if (prior.p() != data.p()) {
    throw std::invalid_argument("whiten: prior dimension does not match design");
  }
  return Whitened{data.X * prior.inv_sqrt_sigma_a,
                  prior.sqrt_sigma_a * prior.beta_a};
}

LambdaDiag LambdaDiag::create(Eigen::VectorXd values) {
  if (values.size() < 1) {
    throw std::invalid_argument("lambda: must be non-empty");
  }
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i]) || values[i] <= 0.0) {
      throw std::invalid_argument("lambda: entries must be positive and finite");
    }
  }
  return LambdaDiag{std::move(values)};
}

Eigen::MatrixXd posterior_precision(const Eigen::MatrixXd& X,
                                    const LambdaDiag& lambda,
                                    const Eigen::MatrixXd& sigma_a) {
  if (lambda.values.size() != X.rows() || sigma_a.rows() != X.cols() ||
      sigma_a.cols() != X.cols()) {
    throw std::invalid_argument("posterior precision: dimension mismatch");
  }
  return X.transpose() * lambda.values.asDiagonal() * X + sigma_a;
}

Eigen::VectorXd whitened_singular_values(const Eigen::MatrixXd& W,
                                         const LambdaDiag& lambda) {
  return whitened_svd(W, lambda, 0).singularValues();
}

Eigen::MatrixXd omega_direct(const Eigen::MatrixXd& W,
                             const LambdaDiag& lambda) {
  const Eigen::Index n = W.rows();
  const Eigen::Index p = W.cols();
  if (lambda.values.size() != n) {
    throw std::invalid_argument("omega: lambda length does not match row count");
  }
  const auto L = lambda.values.asDiagonal();
  const Eigen::MatrixXd WtLW = W.transpose() * L * W;
  const Eigen::MatrixXd mid =
      WtLW + Eigen::MatrixXd::Identity(p, p);
  const Eigen::MatrixXd LW = L * W;
  Eigen::MatrixXd inner =
      Eigen::MatrixXd(lambda.values.asDiagonal()) +
      LW * Eigen::LLT<Eigen::MatrixXd>(mid).solve(LW.transpose());
  Eigen::LLT<Eigen::MatrixXd> inner_llt(inner);
  if (inner_llt.info() != Eigen::Success) {
    throw std::runtime_error("omega: inner matrix is not positive definite");
  }
  return 2.0 * WtLW + Eigen::MatrixXd::Identity(p, p) -
         4.0 * LW.transpose() * inner_llt.solve(LW);
}

Eigen::MatrixXd omega_closed_form(const Eigen::MatrixXd& W,
                                  const LambdaDiag& lambda) {
  return spectral_form(W, lambda, /*invert=*/false);
}

Eigen::MatrixXd sigma_lambda(const Eigen::MatrixXd& W,
                             const LambdaDiag& lambda) {
  return spectral_form(W, lambda, /*invert=*/true);
}

}  // namespace robitmc
