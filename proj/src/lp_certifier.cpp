#include "smoothcert/lp_certifier.hpp"

#include <cmath>
#include <stdexcept>

#include "smoothcert/numerics.hpp"
#include "smoothcert/smoothing.hpp"

namespace smoothcert {

double budget(const TopTwoProbs& tt) {
  tt.validate();
  double arg = 2.0 * std::sqrt(tt.p1 * tt.p2) + 1.0 - tt.p1 - tt.p2;
  double b = -std::log(arg);
  return b < 0.0 ? 0.0 : b;
}

double kl_coefficient(int p, int k) { return gn_kl_coefficient(p, k); }

namespace {

// Solves lhs(eps) = B for a polynomial lhs that is 0 at 0 and strictly
// increasing; bracket grown by doubling from sigma.
template <typename Lhs>
double solve_increasing(Lhs&& lhs, double b, double sigma) {
  if (b <= 0.0) return 0.0;
  double hi = sigma;
  int guard = 0;
  while (lhs(hi) < b) {
    hi *= 2.0;
    if (++guard > 200) throw std::runtime_error("lp radius: bracket growth failed");
  }
  Tolerance tol{1e-15, 1e-14, 300};
  return bisect_root([&](double e) { return lhs(e) - b; }, 0.0, hi, tol);
}

}  // namespace

double radius_lp_closed_small(int p, const TopTwoProbs& tt, double sigma) {
  if (p != 1 && p != 2)
    throw std::domain_error("radius_lp_closed_small: p in {1, 2}; use radius_lp_naive");
  if (!(sigma > 0.0)) throw std::domain_error("radius_lp_closed_small: sigma > 0");
  double b = budget(tt);
  return p == 1 ? sigma * b : sigma * std::sqrt(b);
}

double radius_lp_naive(int p, const TopTwoProbs& tt, double sigma, long long dim) {
  if (p < 1) throw std::domain_error("radius_lp_naive: p >= 1 required");
  if (dim < 1) throw std::domain_error("radius_lp_naive: dim >= 1 required");
  if (!(sigma > 0.0)) throw std::domain_error("radius_lp_naive: sigma > 0");
  double b = budget(tt);
  auto lhs = [&](double eps) {
    double x = eps / sigma;
    double total = std::pow(x, p);
    for (int k = 1; k < p; ++k) {
      double c = kl_coefficient(p, k);
      if (c == 0.0) continue;
      total += c * std::pow(static_cast<double>(dim), 1.0 - static_cast<double>(k) / p) *
               std::pow(x, k);
    }
    return total;
  };
  return solve_increasing(lhs, b, sigma);
}

double radius_equal_eps(int p, const TopTwoProbs& tt, double sigma) {
  if (p < 1) throw std::domain_error("radius_equal_eps: p >= 1 required");
  if (!(sigma > 0.0)) throw std::domain_error("radius_equal_eps: sigma > 0");
  double b = budget(tt);
  auto lhs = [&](double eps) {
    double x = eps / sigma;
    double total = 0.0;
    for (int k = p; k >= 1; k -= 2) total += kl_coefficient(p, k) * std::pow(x, k);
    return total;
  };
  return solve_increasing(lhs, b, sigma);
}

std::vector<FrontierPoint> tradeoff_frontier(int p, const TopTwoProbs& tt,
                                             double sigma, long long dim,
                                             int n_points) {
  if (p != 3 && p != 4)
    throw std::length_error("tradeoff_frontier: two-norm frontier defined for p in {3, 4}");
  if (n_points < 2) throw std::domain_error("tradeoff_frontier: n_points >= 2");
  if (dim < 1) throw std::domain_error("tradeoff_frontier: dim >= 1");
  if (!(sigma > 0.0)) throw std::domain_error("tradeoff_frontier: sigma > 0");
  const double b = budget(tt);
  const int low = p - 2;
  const double c_low = kl_coefficient(p, low);
  const double gap = 1.0 / low - 1.0 / p;
  const double d_factor = std::pow(static_cast<double>(dim), gap);
  const double eq = radius_equal_eps(p, tt, sigma);
  std::vector<FrontierPoint> out;
  if (eq == 0.0) return out;
  out.reserve(n_points);
  for (int i = 1; i <= n_points; ++i) {
    double eps_high = eq * static_cast<double>(i) / n_points;
    double remaining = b - std::pow(eps_high / sigma, p);
    if (remaining < 0.0) remaining = 0.0;
    // One low-norm term left: linear in (eps/sigma)^low.
    double eps_low = sigma * std::pow(remaining / c_low, 1.0 / low);
    eps_low = std::min(eps_low, d_factor * eps_high);
    if (eps_low + 1e-12 < eps_high) continue;
    out.push_back({eps_high, eps_low});
  }
  return out;
}

VanishingDiagnostic vanishing_diagnostic(const std::vector<int>& p_list,
                                         const TopTwoProbs& tt, double sigma) {
  VanishingDiagnostic out;
  out.radii.reserve(p_list.size());
  for (std::size_t i = 0; i < p_list.size(); ++i) {
    if (i > 0 && p_list[i] <= p_list[i - 1])
      throw std::domain_error("vanishing_diagnostic: p_list must be ascending");
    out.radii.emplace_back(p_list[i], radius_equal_eps(p_list[i], tt, sigma));
  }
  out.strictly_decreasing_beyond_2 = true;
  for (std::size_t i = 1; i < out.radii.size(); ++i) {
    if (out.radii[i - 1].first >= 2 && out.radii[i].second >= out.radii[i - 1].second)
      out.strictly_decreasing_beyond_2 = false;
  }
  if (budget(tt) == 0.0) out.strictly_decreasing_beyond_2 = false;
  return out;
}

double linf_volume_ratio(long long p, long long dim) {
  if (p < 1 || dim < 1) throw std::domain_error("linf_volume_ratio: p, dim >= 1");
  double dp = static_cast<double>(p);
  double dd = static_cast<double>(dim);
  return std::exp(dd * ln_gamma(1.0 + 1.0 / dp) - ln_gamma(1.0 + dd / dp));
}

}  // namespace smoothcert
