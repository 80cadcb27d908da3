#pragma once

#include <Eigen/Dense>
#include <vector>

#include "robitmc/chains.hpp"
#include "robitmc/linalg.hpp"

namespace robitmc {

struct AcfResult {
  std::vector<int> lags;      // 0 .. max_lag
  std::vector<double> values;  // values[0] == 1
};

// Sample autocorrelation with the biased 1/N normalization, which keeps
// every value in [-1, 1]. Compensated summation throughout. Throws for a
// constant series or max_lag >= length.
AcfResult autocorrelation(const std::vector<double>& series, int max_lag);

// r_k = mean of the first k entries, k = 1..N.
std::vector<double> running_mean(const std::vector<double>& series);

// Batch-means Monte Carlo standard error of the series mean: split into
// batch_count equal batches (trailing remainder dropped), report
// sd(batch means) / sqrt(batch_count).
double mcse_batch_means(const std::vector<double>& series, int batch_count);

// log likelihood sum_i [y_i log F(x_i^T beta) + (1 - y_i) log(1 - F(x_i^T
// beta))] with F the model's link CDF; evaluated with tail-safe log CDFs.
double log_likelihood(const Eigen::VectorXd& beta, const Dataset& data,
                      const ModelKind& model);

// log likelihood plus the log prior density
// -(p/2) log(2 pi) + (1/2) log det sigma_a
// - (1/2)(beta - beta_a)^T sigma_a (beta - beta_a).
double log_posterior(const Eigen::VectorXd& beta, const Dataset& data,
                     const Prior& prior, const ModelKind& model);

}  // namespace robitmc
