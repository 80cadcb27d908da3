#include "robitmc/special.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace robitmc {

namespace {

constexpr double kCfEps = 1e-16;
constexpr double kFpMin = 1e-300;
constexpr int kCfMaxIter = 500;
constexpr double kLogHalf = -0.6931471805599453094;
constexpr double kLogSqrt2Pi = 0.9189385332046727418;

void require(bool ok, const char* msg) {
  if (!ok) throw std::domain_error(msg);
}

// Continued fraction for the incomplete beta ratio (modified Lentz).
double beta_cf(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kCfMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) <= kCfEps) return h;
  }
  throw std::runtime_error("incomplete beta: continued fraction did not converge");
}

double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// log of the prefactor x^a (1-x)^b / B(a,b); xc is the caller's exact 1-x.
double log_prefactor(double x, double xc, double a, double b) {
  return a * std::log(x) + b * std::log(xc) - log_beta(a, b);
}

bool use_direct_branch(double x, double a, double b) {
  return x < (a + 1.0) / (a + b + 2.0);
}

// I_x(a,b) with the complement xc = 1-x supplied exactly by the caller so the
// symmetric branch does not lose precision near x = 1.
double ibeta_xc(double x, double xc, double a, double b) {
  require(a > 0.0 && b > 0.0, "incomplete beta: a and b must be positive");
  require(x > 0.0 && xc > 0.0, "incomplete beta: p must lie in (0,1)");
  if (use_direct_branch(x, a, b)) {
    return std::exp(log_prefactor(x, xc, a, b)) * beta_cf(a, b, x) / a;
  }
  return 1.0 - std::exp(log_prefactor(x, xc, a, b)) * beta_cf(b, a, xc) / b;
}

double log_ibeta_xc(double x, double xc, double a, double b) {
  require(a > 0.0 && b > 0.0, "incomplete beta: a and b must be positive");
  require(x > 0.0 && xc > 0.0, "incomplete beta: p must lie in (0,1)");
  if (use_direct_branch(x, a, b)) {
    return log_prefactor(x, xc, a, b) + std::log(beta_cf(a, b, x) / a);
  }
  // On this branch the complement I_{xc}(b,a) is bounded away from 1.
  const double log_comp =
      log_prefactor(x, xc, a, b) + std::log(beta_cf(b, a, xc) / b);
  return std::log1p(-std::exp(log_comp));
}

struct TailSplit {
  double x;   // nu / (t^2 + nu)
  double xc;  // t^2 / (t^2 + nu), exact complement
};

TailSplit t_tail_split(double nu, double t) {
  const double t2 = t * t;
  return {nu / (t2 + nu), t2 / (t2 + nu)};
}

// log of the two-sided tail mass 2*(1 - F_nu(|t|)) = I_x(nu/2, 1/2).
double t_log_two_sided_tail(double nu, double t) {
  const double abs_t = std::fabs(t);
  const double a = 0.5 * nu;
  const double b = 0.5;
  if (abs_t > 1e150) {
    // x underflows; small-x asymptote I_x ~ x^a / (a B(a,b)).
    const double log_x = std::log(nu) - 2.0 * std::log(abs_t);
    return a * log_x - std::log(a) - log_beta(a, b);
  }
  const auto [x, xc] = t_tail_split(nu, abs_t);
  return log_ibeta_xc(x, xc, a, b);
}

double check_nu(double nu) {
  require(std::isfinite(nu) && nu > 0.0, "t distribution: nu must be positive");
  return nu;
}

}  // namespace

double incomplete_beta_ratio(double p, double a, double b) {
  require(std::isfinite(p), "incomplete beta: p must be finite");
  return ibeta_xc(p, 1.0 - p, a, b);
}

double log_incomplete_beta_ratio(double p, double a, double b) {
  require(std::isfinite(p), "incomplete beta: p must be finite");
  return log_ibeta_xc(p, 1.0 - p, a, b);
}

double incomplete_beta_inverse(double target, double a, double b) {
  require(a > 0.0 && b > 0.0, "incomplete beta inverse: a and b must be positive");
  require(target > 0.0 && target < 1.0,
          "incomplete beta inverse: target must lie in (0,1)");
  double lo = 0.0;
  double hi = 1.0;
  double x = 0.5;
  const double log_b = log_beta(a, b);
  for (int iter = 0; iter < 200; ++iter) {
    const double f = incomplete_beta_ratio(x, a, b) - target;
    if (f > 0.0) {
      hi = x;
    } else {
      lo = x;
    }
    const double scale = std::min(target, 1.0 - target);
    if (std::fabs(f) <= 4e-16 * scale) break;
    const double log_dens =
        (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - log_b;
    double next = x - f * std::exp(-log_dens);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == x) break;
    x = next;
  }
  return x;
}

double t_pdf(double nu, double t) { return std::exp(t_log_pdf(nu, t)); }

double t_log_pdf(double nu, double t) {
  check_nu(nu);
  const double norm = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                      0.5 * std::log(nu * std::numbers::pi);
  double log1p_term;
  if (std::fabs(t) > 1e8) {
    log1p_term = 2.0 * std::log(std::fabs(t)) - std::log(nu) +
                 std::log1p(nu / (t * t));
  } else {
    log1p_term = std::log1p(t * t / nu);
  }
  return norm - 0.5 * (nu + 1.0) * log1p_term;
}

double t_cdf(double nu, double t) {
  check_nu(nu);
  if (t == 0.0) return 0.5;
  const double half_tail = 0.5 * std::exp(t_log_two_sided_tail(nu, t));
  return t > 0.0 ? 1.0 - half_tail : half_tail;
}

double t_survival(double nu, double t) { return t_cdf(nu, -t); }

double t_log_cdf(double nu, double t) {
  check_nu(nu);
  if (t == 0.0) return kLogHalf;
  const double log_half_tail = kLogHalf + t_log_two_sided_tail(nu, t);
  if (t < 0.0) return log_half_tail;
  return std::log1p(-std::exp(log_half_tail));
}

double t_log_survival(double nu, double t) { return t_log_cdf(nu, -t); }

double t_quantile_from_survival(double nu, double s) {
  check_nu(nu);
  require(s > 0.0 && s <= 0.5,
          "t quantile from survival: s must lie in (0, 0.5]");
  if (s == 0.5) return 0.0;
  const double log_s = std::log(s);

  // Initial guess: a normal quantile, replaced by inverting the small-x
  // asymptote of the incomplete beta ratio when that inversion lands in its
  // own validity region x << 1 (t^2 >> nu). For large nu the asymptote is
  // useless at any reachable s (the quantile sits in the Gaussian body), and
  // applying it anyway would take sqrt of a negative number.
  double t = std::max(0.0, -normal_quantile(s));
  if (s < 0.05) {
    const double a = 0.5 * nu;
    const double b = 0.5;
    const double log_x0 =
        (std::log(2.0 * s) + std::log(a) + log_beta(a, b)) / a;
    if (log_x0 < -1300.0) {
      throw std::runtime_error("t quantile: survival target out of range");
    }
    if (log_x0 < -1.0) {
      t = std::sqrt(nu * -std::expm1(log_x0)) * std::exp(-0.5 * log_x0);
    }
  }

  // Safeguarded Newton on log S(t) = log s; S is strictly decreasing.
  double lo = 0.0;                                    // S(lo) >= s
  double hi = std::numeric_limits<double>::infinity();  // S(hi) <= s
  for (int iter = 0; iter < 80; ++iter) {
    const double log_surv = t_log_survival(nu, t);
    const double resid = log_surv - log_s;
    if (std::fabs(resid) <= 1e-14) break;
    if (resid > 0.0) {
      lo = t;
    } else {
      hi = t;
    }
    // d(log S)/dt = -f(t)/S(t)
    const double deriv = -std::exp(t_log_pdf(nu, t) - log_surv);
    double next = t - resid / deriv;
    if (!(next > lo && next < hi) || !std::isfinite(next)) {
      next = std::isfinite(hi) ? 0.5 * (lo + hi) : (lo > 0.0 ? 2.0 * lo : 1.0);
    }
    if (next == t) break;
    t = next;
  }
  return t;
}

double t_quantile(double nu, double prob) {
  check_nu(nu);
  require(prob > 0.0 && prob < 1.0, "t quantile: prob must lie in (0,1)");
  if (prob == 0.5) return 0.0;
  const double s = std::min(prob, 1.0 - prob);
  const double t = t_quantile_from_survival(nu, s);
  return prob < 0.5 ? -t : t;
}

double normal_pdf(double x) { return std::exp(normal_log_pdf(x)); }

double normal_log_pdf(double x) { return -0.5 * x * x - kLogSqrt2Pi; }

double normal_cdf(double x) {
  return 0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0);
}

double normal_survival(double x) { return normal_cdf(-x); }

double normal_log_survival(double x) {
  if (x <= 36.0) return std::log(normal_survival(x));
  // Asymptotic expansion of the Mills ratio beyond erfc underflow.
  const double x2 = x * x;
  const double corr = -1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2);
  return -0.5 * x2 - std::log(x) - kLogSqrt2Pi + std::log1p(corr);
}

double normal_log_cdf(double x) { return normal_log_survival(-x); }

double normal_quantile(double prob) {
  require(prob > 0.0 && prob < 1.0, "normal quantile: prob must lie in (0,1)");
  // Wichura's PPND16 rational approximations.
  const double q = prob - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    const double num =
        q * (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                   6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
                 1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
               1.3314166789178437745e+2) * r + 3.3871328727963666080e+0);
    const double den =
        (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
              3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
            5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
          4.2313330701600911252e+1) * r + 1.0);
    return num / den;
  }
  double r = q < 0.0 ? prob : 1.0 - prob;
  r = std::sqrt(-std::log(r));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    const double num =
        (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
            3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
          4.63033784615654529590e+0) * r + 1.42343711074968357734e+0);
    const double den =
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
            6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
          2.05319162663775882187e+0) * r + 1.0);
    value = num / den;
  } else {
    r -= 5.0;
    const double num =
        (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
            2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
          5.46378491116411436990e+0) * r + 6.65790464350110377720e+0);
    const double den =
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
            1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
          5.99832206555887937690e-1) * r + 1.0);
    value = num / den;
  }
  return q < 0.0 ? -value : value;
}

namespace {

constexpr double kTailRejectThreshold = 1e-12;

// T ~ t_nu conditioned on T > a.
double sample_t_above(RngStream& rng, double nu, double a) {
  const double surv_a = t_survival(nu, a);
  // Pareto envelope on (a, inf): propose t = a u^{-1/nu}, accept with
  // probability (1 + nu/t^2)^{-(nu+1)/2}. Acceptance is worst at t = a, so
  // requiring it to beat 1% there bounds the expected trial count by 100.
  // Large nu never qualifies (its reachable tail is Gaussian, not
  // polynomial); quantile inversion covers it instead.
  if (surv_a < kTailRejectThreshold &&
      -0.5 * (nu + 1.0) * std::log1p(nu / (a * a)) > std::log(0.01)) {
    for (;;) {
      const double t = a * std::pow(rng.uniform(), -1.0 / nu);
      const double log_accept = -0.5 * (nu + 1.0) * std::log1p(nu / (t * t));
      if (std::log(rng.uniform()) <= log_accept) return t;
    }
  }
  if (surv_a <= 0.0) {
    throw std::runtime_error("truncated t: truncation point too extreme");
  }
  const double cdf_a = t_cdf(nu, a);
  const double u = rng.uniform();
  const double q_target = cdf_a + u * surv_a;
  if (q_target <= 0.5) return t_quantile(nu, q_target);
  return t_quantile_from_survival(nu, surv_a * (1.0 - u));
}

// T ~ N(0,1) conditioned on T > a.
double sample_normal_above(RngStream& rng, double a) {
  const double surv_a = normal_survival(a);
  if (surv_a < kTailRejectThreshold) {
    // Exponential envelope at rate a (a >> 1 here).
    for (;;) {
      const double t = a - std::log(rng.uniform()) / a;
      const double log_accept = -0.5 * (t - a) * (t - a);
      if (std::log(rng.uniform()) <= log_accept) return t;
    }
  }
  const double cdf_a = normal_cdf(a);
  const double u = rng.uniform();
  const double q_target = cdf_a + u * surv_a;
  if (q_target <= 0.5) return normal_quantile(q_target);
  return -normal_quantile(surv_a * (1.0 - u));
}

}  // namespace

double sample_truncated_t(RngStream& rng, double nu, double loc,
                          TruncationSide side) {
  check_nu(nu);
  require(std::isfinite(loc), "truncated t: location must be finite");
  // Positive side: loc + T with T > -loc. Negative side: mirror symmetry.
  if (side == TruncationSide::Positive) {
    return loc + sample_t_above(rng, nu, -loc);
  }
  return loc - sample_t_above(rng, nu, loc);
}

double sample_truncated_normal(RngStream& rng, double loc,
                               TruncationSide side) {
  require(std::isfinite(loc), "truncated normal: location must be finite");
  if (side == TruncationSide::Positive) {
    return loc + sample_normal_above(rng, -loc);
  }
  return loc - sample_normal_above(rng, loc);
}

double sample_gamma(RngStream& rng, double shape, double rate) {
  require(std::isfinite(shape) && shape > 0.0, "gamma: shape must be positive");
  require(std::isfinite(rate) && rate > 0.0, "gamma: rate must be positive");
  if (shape < 1.0) {
    const double g = sample_gamma(rng, shape + 1.0, 1.0);
    return g * std::pow(rng.uniform(), 1.0 / shape) / rate;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    const double x = rng.normal();
    const double t = 1.0 + c * x;
    if (t <= 0.0) continue;
    const double v = t * t * t;
    const double u = rng.uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v / rate;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
      return d * v / rate;
    }
  }
}

Eigen::VectorXd sample_mvn_from_precision(RngStream& rng,
                                          const Eigen::VectorXd& rhs,
                                          const Eigen::MatrixXd& precision) {
  if (precision.rows() != precision.cols() ||
      precision.rows() != rhs.size()) {
    throw std::invalid_argument("mvn from precision: dimension mismatch");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(precision);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("mvn from precision: matrix is not positive definite");
  }
  const Eigen::VectorXd mean = llt.solve(rhs);
  Eigen::VectorXd xi(rhs.size());
  for (Eigen::Index i = 0; i < xi.size(); ++i) xi[i] = rng.normal();
  // If P = U^T U then U^{-1} xi has covariance P^{-1}.
  return mean + llt.matrixU().solve(xi);
}

}  // namespace robitmc
