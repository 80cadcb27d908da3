#pragma once

// Independent reference implementations used only by tests: quadrature-based
// CDFs and posterior moments, a KS statistic, and simple series generators.
// Nothing here shares code with the library paths being checked except the
// RNG primitive.

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "robitmc/rng.hpp"

namespace oracle {

inline double adaptive_simpson_impl(const std::function<double(double)>& f,
                                    double a, double b, double fa, double fm,
                                    double fb, double whole, double tol,
                                    int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  return adaptive_simpson_impl(f, a, m, fa, flm, fm, left, 0.5 * tol,
                               depth - 1) +
         adaptive_simpson_impl(f, m, b, fm, frm, fb, right, 0.5 * tol,
                               depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a,
                        double b, double tol = 1e-12) {
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fm = f(m);
  const double fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson_impl(f, a, b, fa, fm, fb, whole, tol, 40);
}

inline double t_pdf(double nu, double x) {
  return std::exp(std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                  0.5 * std::log(nu * M_PI) -
                  0.5 * (nu + 1.0) * std::log1p(x * x / nu));
}

// CDF by quadrature of the density from 0 (uses symmetry, never the tails).
inline double t_cdf_quad(double nu, double t, double tol = 1e-13) {
  if (t == 0.0) return 0.5;
  const double body =
      integrate([nu](double x) { return t_pdf(nu, x); }, 0.0, std::fabs(t), tol);
  return t > 0.0 ? 0.5 + body : 0.5 - body;
}

// Regularized incomplete beta by quadrature; requires a >= 1 and p < 1 so
// the integrand has no endpoint singularity inside the range.
inline double ibeta_quad(double p, double a, double b, double tol = 1e-13) {
  if (a < 1.0 || p >= 1.0) {
    throw std::invalid_argument("ibeta_quad: needs a >= 1 and p < 1");
  }
  const double log_beta =
      std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  return integrate(
             [&](double u) {
               if (u <= 0.0) return a > 1.0 ? 0.0 : std::exp(-log_beta);
               return std::exp((a - 1.0) * std::log(u) +
                               (b - 1.0) * std::log1p(-u) - log_beta);
             },
             0.0, p, tol);
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

inline double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
}

inline double gamma_pdf(double x, double shape, double rate) {
  if (x <= 0.0) return 0.0;
  return std::exp(shape * std::log(rate) + (shape - 1.0) * std::log(x) -
                  rate * x - std::lgamma(shape));
}

// Kolmogorov-Smirnov statistic of values against Uniform(0,1).
inline double ks_uniform(std::vector<double> u) {
  std::sort(u.begin(), u.end());
  const double n = static_cast<double>(u.size());
  double d = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double hi = (static_cast<double>(i) + 1.0) / n - u[i];
    const double lo = u[i] - static_cast<double>(i) / n;
    d = std::max(d, std::max(hi, lo));
  }
  return d;
}

inline double mean(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

inline double sample_sd(const std::vector<double>& xs) {
  const double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

// AR(1) with unit marginal variance: x_t = phi x_{t-1} + sqrt(1-phi^2) e_t.
inline std::vector<double> ar1_series(double phi, std::size_t n,
                                      std::uint64_t seed) {
  robitmc::RngStream rng(seed, 77);
  std::vector<double> xs;
  xs.reserve(n);
  double x = rng.normal();
  const double innovation = std::sqrt(1.0 - phi * phi);
  for (std::size_t i = 0; i < n; ++i) {
    x = phi * x + innovation * rng.normal();
    xs.push_back(x);
  }
  return xs;
}

// Log posterior for a scalar-coefficient binary regression under a N(m0,
// 1/prec0) prior, with a caller-supplied log-link pair (log F, log(1-F)).
struct Scalar1dPosterior {
  std::vector<double> x;
  std::vector<int> y;
  double prior_mean = 0.0;
  double prior_precision = 1.0;
  std::function<double(double)> log_cdf;
  std::function<double(double)> log_survival;

  double log_density(double beta) const {
    double value = -0.5 * prior_precision * (beta - prior_mean) *
                   (beta - prior_mean);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double s = x[i] * beta;
      value += y[i] == 1 ? log_cdf(s) : log_survival(s);
    }
    return value;
  }
};

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

// Posterior mean/variance by adaptive quadrature, normalized internally.
inline Moments posterior_moments_1d(const Scalar1dPosterior& post,
                                    double tol = 1e-11) {
  double peak_at = 0.0;
  double peak = -1e300;
  for (double b = -20.0; b <= 20.0; b += 0.02) {
    const double v = post.log_density(b);
    if (v > peak) {
      peak = v;
      peak_at = b;
    }
  }
  double lo = peak_at - 1.0;
  while (post.log_density(lo) - peak > -46.0 && lo > peak_at - 60.0) lo -= 1.0;
  double hi = peak_at + 1.0;
  while (post.log_density(hi) - peak > -46.0 && hi < peak_at + 60.0) hi += 1.0;
  const auto weighted = [&](int power) {
    return integrate(
        [&](double b) {
          return std::pow(b, power) * std::exp(post.log_density(b) - peak);
        },
        lo, hi, tol);
  };
  const double m0 = weighted(0);
  const double m1 = weighted(1);
  const double m2 = weighted(2);
  Moments out;
  out.mean = m1 / m0;
  out.variance = m2 / m0 - out.mean * out.mean;
  return out;
}

}  // namespace oracle
