#pragma once

#include <Eigen/Dense>

namespace robitmc {

// Binary-response design. y entries are 0 or 1; X is n x p with finite
// entries; validated by create().
struct Dataset {
  Eigen::MatrixXd X;
  Eigen::VectorXi y;

  Eigen::Index n() const { return X.rows(); }
  Eigen::Index p() const { return X.cols(); }

  static Dataset create(Eigen::MatrixXd X, Eigen::VectorXi y);
};

// Gaussian prior N(beta_a, sigma_a^{-1}); sigma_a is the precision matrix.
// Caches the symmetric square root of sigma_a and its inverse, both built
// from the eigendecomposition.
struct Prior {
  Eigen::VectorXd beta_a;
  Eigen::MatrixXd sigma_a;
  Eigen::MatrixXd sqrt_sigma_a;      // sigma_a^{1/2}
  Eigen::MatrixXd inv_sqrt_sigma_a;  // sigma_a^{-1/2}
  double log_det_sigma_a = 0.0;

  Eigen::Index p() const { return beta_a.size(); }

  // Validates: square, symmetric, positive definite (Cholesky succeeds),
  // and sqrt * sqrt reproduces sigma_a to 1e-10 relative Frobenius error.
  static Prior create(Eigen::VectorXd beta_a, Eigen::MatrixXd sigma_a);
};

// Zero-mean prior with identity precision.
Prior build_identity_prior(Eigen::Index p);

// Zellner g-prior: zero mean, precision (1/g) X^T X. Requires g > 0 and
// n >= p (the Gram matrix is structurally rank deficient otherwise); throws
// if X^T X fails its Cholesky factorization.
Prior build_gprior(const Eigen::MatrixXd& X, double g);

// Whitened reparametrization: W = X sigma_a^{-1/2}, c_tilde = sigma_a^{1/2}
// beta_a. In whitened coordinates the prior is N(c_tilde, I_p) up to shift.
struct Whitened {
  Eigen::MatrixXd W;
  Eigen::VectorXd c_tilde;
};

Whitened whiten(const Dataset& data, const Prior& prior);

// Diagonal of the mixing-variable matrix Lambda; entries strictly positive
// and finite.
struct LambdaDiag {
  Eigen::VectorXd values;

  double max() const { return values.maxCoeff(); }

  static LambdaDiag create(Eigen::VectorXd values);
};

// X^T Lambda X + sigma_a, the full conditional precision of beta.
Eigen::MatrixXd posterior_precision(const Eigen::MatrixXd& X,
                                    const LambdaDiag& lambda,
                                    const Eigen::MatrixXd& sigma_a);

// Singular values of Lambda^{1/2} W, descending.
Eigen::VectorXd whitened_singular_values(const Eigen::MatrixXd& W,
                                         const LambdaDiag& lambda);

// Omega(Lambda) = (2 W^T Lambda W + I) -
//   4 W^T Lambda (Lambda + Lambda W (W^T Lambda W + I)^{-1} W^T Lambda)^{-1}
//   Lambda W, evaluated exactly as written.
Eigen::MatrixXd omega_direct(const Eigen::MatrixXd& W,
                             const LambdaDiag& lambda);

// Same matrix via the SVD of A = Lambda^{1/2} W: with A = U D V^T,
//   n >= p: V (2D^2 + I_p)^{-1} V^T
//   n <  p: V (2D^2 + I_n)^{-1} V^T + (I_p - V V^T).
Eigen::MatrixXd omega_closed_form(const Eigen::MatrixXd& W,
                                  const LambdaDiag& lambda);

// Sigma(Lambda) = Omega(Lambda)^{-1}, via the same SVD with inverted
// spectral factors. det Sigma = prod_i (2 d_i^2 + 1).
Eigen::MatrixXd sigma_lambda(const Eigen::MatrixXd& W,
                             const LambdaDiag& lambda);

}  // namespace robitmc
