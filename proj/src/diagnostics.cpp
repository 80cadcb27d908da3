#include "robitmc/diagnostics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "robitmc/special.hpp"

namespace robitmc {

namespace {

class KahanSum {
 public:
  void add(double x) {
    const double y = x - comp_;
    const double t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double kahan_mean(const std::vector<double>& xs) {
  KahanSum s;
  for (double x : xs) s.add(x);
  return s.value() / static_cast<double>(xs.size());
}

}  // namespace

AcfResult autocorrelation(const std::vector<double>& series, int max_lag) {
  const auto n = static_cast<std::ptrdiff_t>(series.size());
  if (max_lag < 0) throw std::invalid_argument("acf: max_lag must be >= 0");
  if (n < 2 || max_lag >= n) {
    throw std::invalid_argument("acf: series must be longer than max_lag");
  }
  const double mean = kahan_mean(series);
  KahanSum denom;
  for (double x : series) denom.add((x - mean) * (x - mean));
  if (denom.value() <= 0.0) {
    throw std::invalid_argument("acf: series is constant");
  }
  AcfResult result;
  result.lags.reserve(max_lag + 1);
  result.values.reserve(max_lag + 1);
  for (int k = 0; k <= max_lag; ++k) {
    KahanSum num;
    for (std::ptrdiff_t i = 0; i + k < n; ++i) {
      num.add((series[i] - mean) * (series[i + k] - mean));
    }
    result.lags.push_back(k);
    result.values.push_back(num.value() / denom.value());
  }
  return result;
}

std::vector<double> running_mean(const std::vector<double>& series) {
  if (series.empty()) {
    throw std::invalid_argument("running mean: series is empty");
  }
  std::vector<double> out;
  out.reserve(series.size());
  KahanSum s;
  for (std::size_t k = 0; k < series.size(); ++k) {
    s.add(series[k]);
    out.push_back(s.value() / static_cast<double>(k + 1));
  }
  return out;
}

double mcse_batch_means(const std::vector<double>& series, int batch_count) {
  if (batch_count < 2) {
    throw std::invalid_argument("mcse: need at least 2 batches");
  }
  const std::size_t batch_len = series.size() / static_cast<std::size_t>(batch_count);
  if (batch_len < 1) {
    throw std::invalid_argument("mcse: series shorter than batch count");
  }
  std::vector<double> means;
  means.reserve(batch_count);
  for (int b = 0; b < batch_count; ++b) {
    KahanSum s;
    for (std::size_t i = 0; i < batch_len; ++i) {
      s.add(series[b * batch_len + i]);
    }
    means.push_back(s.value() / static_cast<double>(batch_len));
  }
  const double grand = kahan_mean(means);
  KahanSum ss;
  for (double m : means) ss.add((m - grand) * (m - grand));
  const double var = ss.value() / static_cast<double>(batch_count - 1);
  return std::sqrt(var / static_cast<double>(batch_count));
}

double log_likelihood(const Eigen::VectorXd& beta, const Dataset& data,
                      const ModelKind& model) {
  if (beta.size() != data.p()) {
    throw std::invalid_argument("log likelihood: beta length does not match design");
  }
  const Eigen::VectorXd xb = data.X * beta;
  KahanSum sum;
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    double term;
    if (data.y[i] == 1) {
      term = model.is_robit() ? t_log_cdf(model.nu, xb[i]) : normal_log_cdf(xb[i]);
    } else {
      term = model.is_robit() ? t_log_survival(model.nu, xb[i])
                              : normal_log_survival(xb[i]);
    }
    sum.add(term);
  }
  return sum.value();
}

double log_posterior(const Eigen::VectorXd& beta, const Dataset& data,
                     const Prior& prior, const ModelKind& model) {
  if (beta.size() != prior.p()) {
    throw std::invalid_argument("log posterior: beta length does not match prior");
  }
  const Eigen::VectorXd centered = beta - prior.beta_a;
  const double quad = centered.dot(prior.sigma_a * centered);
  const double log_prior = -0.5 * static_cast<double>(prior.p()) *
                               std::log(2.0 * std::numbers::pi) +
                           0.5 * prior.log_det_sigma_a - 0.5 * quad;
  return log_likelihood(beta, data, model) + log_prior;
}

}  // namespace robitmc
