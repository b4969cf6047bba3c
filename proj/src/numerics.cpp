#include "smoothcert/numerics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace smoothcert {

void Tolerance::validate() const {
  if (!(abs_tol > 0) || !(rel_tol > 0) || max_iter < 1)
    throw std::domain_error("Tolerance: abs_tol > 0, rel_tol > 0, max_iter >= 1 required");
}

double ln_gamma(double x) {
  if (!std::isfinite(x) || x <= 0)
    throw std::domain_error("ln_gamma: argument must be finite and positive");
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

double std_normal_cdf(double x) {
  if (!std::isfinite(x)) throw std::domain_error("std_normal_cdf: non-finite argument");
  return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

namespace {

// Acklam's rational approximation to the normal quantile (|error| < 1.2e-9),
// used as the seed for one Halley refinement against erfc.
double norm_quantile_seed(double q) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double q_low = 0.02425;
  if (q < q_low) {
    double u = std::sqrt(-2.0 * std::log(q));
    return (((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u + c[5]) /
           ((((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1.0);
  }
  if (q > 1.0 - q_low) {
    double u = std::sqrt(-2.0 * std::log(1.0 - q));
    return -(((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u + c[5]) /
           ((((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1.0);
  }
  double u = q - 0.5;
  double t = u * u;
  return (((((a[0] * t + a[1]) * t + a[2]) * t + a[3]) * t + a[4]) * t + a[5]) * u /
         (((((b[0] * t + b[1]) * t + b[2]) * t + b[3]) * t + b[4]) * t + 1.0);
}

}  // namespace

double std_normal_quantile(double q) {
  if (!(q > 0.0 && q < 1.0))
    throw std::domain_error("std_normal_quantile: argument must lie in (0, 1)");
  double x = norm_quantile_seed(q);
  // Halley step: e = Phi(x) - q, u = e / phi(x).
  for (int i = 0; i < 2; ++i) {
    double e = std_normal_cdf(x) - q;
    double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                   const Tolerance& tol) {
  tol.validate();
  if (!(lo < hi)) throw std::domain_error("bisect_root: lo < hi required");
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0))
    throw std::invalid_argument("bisect_root: no sign change on bracket");
  for (int i = 0; i < tol.max_iter; ++i) {
    double mid = 0.5 * (lo + hi);
    if (hi - lo <= tol.abs_tol + tol.rel_tol * std::fabs(mid)) return mid;
    double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  throw std::runtime_error("bisect_root: max_iter exceeded before convergence");
}

std::pair<double, double> maximize_1d(const std::function<double(double)>& f,
                                      double lo, double hi, const Tolerance& tol) {
  tol.validate();
  if (!(lo < hi)) throw std::domain_error("maximize_1d: lo < hi required");
  const double inv_gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_gr * (b - a);
  double d = a + inv_gr * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < tol.max_iter; ++i) {
    if (b - a <= tol.abs_tol + tol.rel_tol * std::fabs(0.5 * (a + b))) break;
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_gr * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_gr * (b - a);
      fd = f(d);
    }
  }
  double x = 0.5 * (a + b);
  double fx = f(x);
  // Endpoints can carry the supremum for monotone f.
  double flo = f(lo), fhi = f(hi);
  if (flo > fx) {
    x = lo;
    fx = flo;
  }
  if (fhi > fx) {
    x = hi;
    fx = fhi;
  }
  return {x, fx};
}

double log_binomial_tail_ge(long long successes, long long trials, double p) {
  if (trials < 1 || successes < 0 || successes > trials)
    throw std::domain_error("log_binomial_tail_ge: need 0 <= successes <= trials, trials >= 1");
  if (successes == 0) return 0.0;  // P[X >= 0] = 1
  if (p <= 0.0) return -std::numeric_limits<double>::infinity();
  if (p >= 1.0) return 0.0;
  const double n = static_cast<double>(trials);
  const double k = static_cast<double>(successes);
  // First term C(n,k) p^k (1-p)^(n-k), then incremental ratios, with the
  // running sum rescaled into a log carry to avoid overflow.
  double log_first = ln_gamma(n + 1.0) - ln_gamma(k + 1.0) - ln_gamma(n - k + 1.0) +
                     k * std::log(p) + (n - k) * std::log1p(-p);
  const double odds = p / (1.0 - p);
  double carry = log_first;
  double term = 1.0;
  double sum = 1.0;
  for (long long i = successes; i < trials; ++i) {
    term *= (static_cast<double>(trials - i) / static_cast<double>(i + 1)) * odds;
    sum += term;
    if (sum > 1e280) {
      carry += std::log(sum);
      term /= sum;
      sum = 1.0;
    }
    if (term < 1e-20 * sum && static_cast<double>(i) > p * n) break;  // converged tail
  }
  double result = carry + std::log(sum);
  return result > 0.0 ? 0.0 : result;
}

double clopper_pearson_lower(long long successes, long long trials, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::domain_error("clopper_pearson_lower: gamma must lie in (0, 1)");
  if (trials < 1 || successes < 0 || successes > trials)
    throw std::domain_error("clopper_pearson_lower: need 0 <= successes <= trials, trials >= 1");
  if (successes == 0) return 0.0;
  if (successes == trials) return std::exp(std::log(gamma) / static_cast<double>(trials));
  const double log_gamma_target = std::log(gamma);
  // Tail P[Bin(n,p) >= k] is strictly increasing in p: bisect.
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 80; ++i) {
    double mid = 0.5 * (lo + hi);
    if (log_binomial_tail_ge(successes, trials, mid) < log_gamma_target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double hoeffding_confidence(int num_classes, long long samples, double eps) {
  if (num_classes < 2 || samples < 1 || !(eps > 0))
    throw std::domain_error("hoeffding_confidence: need num_classes >= 2, samples >= 1, eps > 0");
  double v = 1.0 - static_cast<double>(num_classes) *
                       std::exp(-2.0 * static_cast<double>(samples) * eps * eps);
  return v < 0.0 ? 0.0 : v;
}

}  // namespace smoothcert
