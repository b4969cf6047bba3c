#pragma once

#include <vector>

#include "smoothcert/divergence_bounds.hpp"

namespace smoothcert {

/// KL certification budget B = -log(2 sqrt(p1 p2) + 1 - p1 - p2).
double budget(const TopTwoProbs& tt);

/// sigma-free coefficient of epsilon^k in the GN KL polynomial; zero when
/// p - k is odd.
double kl_coefficient(int p, int k);

/// Closed form (sigma^p B)^(1/p) for p in {1, 2}.
double radius_lp_closed_small(int p, const TopTwoProbs& tt, double sigma);

/// lp radius from the dimension-inflated polynomial inequality: the epsilon
/// solving (eps/sigma)^p + sum_k coef(p,k) d^(1-k/p) (eps/sigma)^k = B.
double radius_lp_naive(int p, const TopTwoProbs& tt, double sigma, long long dim);

/// The equal-epsilon multi-norm certificate: all active norm radii coincide
/// at the epsilon solving sum_{k active} coef(p,k) (eps/sigma)^k = B. Active
/// norms are k <= p with p - k even.
double radius_equal_eps(int p, const TopTwoProbs& tt, double sigma);

/// One point on the two-norm trade-off curve.
struct FrontierPoint {
  double eps_high = 0.0;  // lp radius
  double eps_low = 0.0;   // companion lower-norm radius (l1 for p=3, l2 for p=4)
};

/// Sweep of the (eps_high, eps_low) trade-off for p in {3, 4}: eps_high runs
/// over eq * i / n_points, i = 1..n_points; eps_low solves the remaining
/// budget, capped at d^(1/low - 1/high) * eps_high; points with
/// eps_low < eps_high are dropped.
std::vector<FrontierPoint> tradeoff_frontier(int p, const TopTwoProbs& tt,
                                             double sigma, long long dim,
                                             int n_points);

struct VanishingDiagnostic {
  std::vector<std::pair<int, double>> radii;  // (p, equal-eps radius)
  bool strictly_decreasing_beyond_2 = false;
};

/// radius_equal_eps per requested p, with the monotone-vanishing verdict.
VanishingDiagnostic vanishing_diagnostic(const std::vector<int>& p_list,
                                         const TopTwoProbs& tt, double sigma);

/// Volume of the unit lp ball relative to the unit linf ball:
/// Gamma(1 + 1/p)^d / Gamma(1 + d/p), in log space.
double linf_volume_ratio(long long p, long long dim);

}  // namespace smoothcert
