#pragma once

#include <functional>
#include <utility>

namespace smoothcert {

/// Termination control for the 1-D solvers. An interval [lo, hi] is
/// considered converged once hi - lo <= abs_tol + rel_tol * |mid|.
struct Tolerance {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  int max_iter = 200;

  void validate() const;
};

/// ln Gamma(x) for x > 0.
double ln_gamma(double x);

/// Standard normal CDF.
double std_normal_cdf(double x);

/// Standard normal quantile (inverse CDF) on (0, 1).
double std_normal_quantile(double q);

/// Root of a continuous function with a sign change on [lo, hi], by
/// bisection. Deterministic; throws if the bracket has no sign change or
/// max_iter is exhausted before the interval shrinks below tolerance.
double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                   const Tolerance& tol = {});

/// Bracketing maximization on [lo, hi] by golden-section search. Returns
/// (argmax, max). Exact for unimodal f up to tolerance; for other f the
/// result is a valid lower bound on the supremum.
std::pair<double, double> maximize_1d(const std::function<double(double)>& f,
                                      double lo, double hi,
                                      const Tolerance& tol = {});

/// log of the upper binomial tail P[Bin(trials, p) >= successes].
/// Exact log-domain summation; intended for trials <= 2e5.
double log_binomial_tail_ge(long long successes, long long trials, double p);

/// One-sided lower confidence bound on a Bernoulli parameter: the p with
/// P[Bin(trials, p) >= successes] = gamma (0 when successes == 0). The true
/// parameter is >= the bound with probability at least 1 - gamma.
double clopper_pearson_lower(long long successes, long long trials, double gamma);

/// Hoeffding prediction-error lower bound 1 - c * exp(-2 n eps^2),
/// clamped below at 0.
double hoeffding_confidence(int num_classes, long long samples, double eps);

}  // namespace smoothcert
