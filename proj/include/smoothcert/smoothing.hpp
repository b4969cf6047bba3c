#pragma once

#include <span>
#include <vector>

#include "smoothcert/divergence_bounds.hpp"
#include "smoothcert/rng.hpp"

namespace smoothcert {

/// Generalized Gaussian smoothing measure GN(mu, sigma, s) with density
/// proportional to exp(-|x - mu|^s / sigma^s). Laplace at s = 1, a Gaussian
/// with variance sigma^2 / 2 at s = 2.
struct GenGaussian {
  double sigma = 1.0;
  double shape = 2.0;  // closed-form KL requires an integer shape

  GenGaussian() = default;
  GenGaussian(double sigma_, double shape_) : sigma(sigma_), shape(shape_) { validate(); }

  void validate() const;
  bool integer_shape() const;
  int shape_int() const;
};

/// A location shift x - x' together with its cached power sums
/// sum_i |delta_i|^k for k = 1..max_order.
struct ShiftPair {
  std::vector<double> delta;
  std::vector<double> norm_pows;  // norm_pows[k-1] = ||delta||_k^k

  ShiftPair(std::vector<double> delta_, int max_order);
  /// ||delta||_k^k
  double norm_pow(int k) const;
};

/// Log density of GN(mu, sigma, s) at x.
double gn_log_density(const GenGaussian& g, double mu, double x);

/// One multivariate draw mu + theta, theta_i iid GN(0, sigma, s).
std::vector<double> gn_sample(const GenGaussian& g, std::span<const double> mu,
                              RngStream& rng);

/// In-place variant: out = mu + noise. Used by the sampling kernels.
void gn_sample_into(const GenGaussian& g, std::span<const double> mu,
                    RngStream& rng, std::span<double> out);

/// E|X|^k = sigma^k Gamma((k+1)/s) / Gamma(1/s) for X ~ GN(0, sigma, s).
double gn_abs_moment(const GenGaussian& g, int k);

/// Coefficient of ||delta||_k^k / sigma^k in the closed-form GN KL:
/// C(s,k) (1 + (-1)^(s-k)) Gamma((s-k+1)/s) / (2 Gamma(1/s)). Zero when
/// s - k is odd.
double gn_kl_coefficient(int s, int k);

/// Closed-form KL divergence between GN(x, sigma, s) and GN(x', sigma, s)
/// for integer shape. Exact for even s; a sound upper bound for odd s.
double gn_kl_closed(const GenGaussian& g, const ShiftPair& shift);

/// Quadrature oracle for the 1-D GN KL (product measures sum per
/// coordinate). Integrates p1 log(p1/p2) over [mu - 40 sigma, mu + 40 sigma].
double gn_kl_numeric(const GenGaussian& g, double delta_1d, int quad_points);

/// Closed-form divergence d(N(x, std^2), N(x', std^2)) as a function of
/// delta = ||x - x'||_2. Takes the Gaussian standard deviation explicitly;
/// the GN scale at shape 2 maps to std = sigma / sqrt(2).
double gaussian_divergence(DivergenceKind kind, double delta_l2, double std_dev);

/// Quadrature reference for gaussian_divergence (1-D Gaussians).
double gaussian_divergence_numeric(DivergenceKind kind, double delta_l2,
                                   double std_dev, int quad_points = 20000);

}  // namespace smoothcert
