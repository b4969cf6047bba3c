#include "smoothcert/l2_certifier.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "smoothcert/numerics.hpp"
#include "smoothcert/smoothing.hpp"

namespace smoothcert {

L2Certificate make_l2_certificate(const L2Method& method, const TopTwoProbs& tt,
                                  double sigma) {
  L2Certificate cert;
  cert.method = method;
  cert.tt = tt;
  cert.sigma = sigma;
  switch (method.tag) {
    case L2Method::Tag::Divergence:
      cert.radius = radius_closed(method.divergence, tt, sigma);
      break;
    case L2Method::Tag::Cohen:
      cert.radius = radius_cohen(tt, sigma);
      break;
    case L2Method::Tag::LecuyerL2:
      cert.radius = radius_lecuyer_l2(tt, sigma);
      break;
    case L2Method::Tag::LecuyerL1:
      cert.radius = radius_baselines_l1(tt, sigma).lecuyer;
      break;
    case L2Method::Tag::LiL1:
      cert.radius = radius_baselines_l1(tt, sigma).li;
      break;
  }
  return cert;
}

double radius_generic(DivergenceKind kind, const TopTwoProbs& tt, double std_dev) {
  if (!(std_dev > 0.0)) throw std::domain_error("radius_generic: std > 0 required");
  double h = lower_bound(kind, tt);
  if (h <= 0.0) return 0.0;
  if (std::isinf(h)) return std::numeric_limits<double>::infinity();
  // g(delta) is strictly increasing from 0; grow the bracket, then bisect.
  double hi = std_dev;
  int guard = 0;
  while (gaussian_divergence(kind, hi, std_dev) < h) {
    hi *= 2.0;
    if (++guard > 200) throw std::runtime_error("radius_generic: bracket growth failed");
  }
  Tolerance tol{1e-14, 1e-13, 300};
  return bisect_root([&](double d) { return gaussian_divergence(kind, d, std_dev) - h; },
                     0.0, hi, tol);
}

double radius_closed(DivergenceKind kind, const TopTwoProbs& tt, double sigma) {
  tt.validate();
  if (!(sigma > 0.0)) throw std::domain_error("radius_closed: sigma > 0 required");
  const double p1 = tt.p1, p2 = tt.p2;
  if (p1 == p2) return 0.0;
  switch (kind.family) {
    case DivergenceFamily::KL:
      // sigma here is the GN scale (variance sigma^2/2 Gaussian).
      return std::sqrt(-sigma * sigma *
                       std::log(2.0 * std::sqrt(p1 * p2) + 1.0 - p1 - p2));
    case DivergenceFamily::Renyi: {
      double h = lower_bound(kind, tt);
      return std::sqrt(2.0 * sigma * sigma * h / kind.alpha);
    }
    case DivergenceFamily::Hellinger2: {
      double d = std::sqrt(p1) - std::sqrt(p2);
      return std::sqrt(-8.0 * sigma * sigma * std::log(std::sqrt(1.0 - 0.5 * d * d)));
    }
    case DivergenceFamily::Chi2: {
      double diff = p1 - p2;
      double denom = (p1 + p2) - diff * diff;
      if (denom <= 0.0) return std::numeric_limits<double>::infinity();
      return std::sqrt(sigma * sigma * std::log((p1 + p2) / denom));
    }
    case DivergenceFamily::Bhattacharyya: {
      double eta = 2.0 * std::sqrt(p1 * p2) + 2.0 - p1 - p2;
      return std::sqrt(-8.0 * sigma * sigma * std::log(std::sqrt(0.5 * eta)));
    }
    case DivergenceFamily::TV:
      // Inversion of 2 Phi(delta / 2 sigma) - 1 <= |p1 - p2| / 2.
      return 2.0 * sigma * std_normal_quantile(0.25 * std::fabs(p1 - p2) + 0.5);
  }
  throw std::logic_error("radius_closed: unknown kind");
}

double radius_renyi_sup(const TopTwoProbs& tt, double sigma) {
  tt.validate();
  if (!(sigma > 0.0)) throw std::domain_error("radius_renyi_sup: sigma > 0 required");
  if (tt.p1 == tt.p2) return 0.0;
  auto sq_radius = [&](double log_alpha) {
    double a = std::exp(log_alpha);
    double h = lower_bound(DivergenceKind::renyi(a), tt);
    return 2.0 * sigma * sigma * h / a;
  };
  Tolerance tol{1e-12, 1e-12, 400};
  auto [arg, best] = maximize_1d(sq_radius, std::log(1.0 + 1e-6), std::log(1e3), tol);
  (void)arg;
  // A few fixed probes guard against a missed bracket; any probed value is a
  // valid lower bound on the supremum.
  for (double a : {1.1, 1.5, 2.0, 4.0, 16.0, 128.0}) {
    double v = sq_radius(std::log(a));
    if (v > best) best = v;
  }
  return std::sqrt(std::max(0.0, best));
}

double radius_cohen(const TopTwoProbs& tt, double sigma) {
  tt.validate();
  if (!(sigma > 0.0)) throw std::domain_error("radius_cohen: sigma > 0 required");
  if (!(tt.p1 > 0.0 && tt.p1 < 1.0 && tt.p2 > 0.0 && tt.p2 < 1.0))
    throw std::domain_error("radius_cohen: probabilities must lie in (0, 1)");
  return 0.5 * sigma * (std_normal_quantile(tt.p1) - std_normal_quantile(tt.p2));
}

double radius_lecuyer_l2(const TopTwoProbs& tt, double sigma) {
  tt.validate();
  if (!(sigma > 0.0)) throw std::domain_error("radius_lecuyer_l2: sigma > 0 required");
  const double p1 = tt.p1, p2 = tt.p2;
  if (!(p1 > p2) || p2 <= 0.0) return 0.0;
  // Feasibility p1 - e^(2 beta) p2 > 0 is exactly beta < (1/2) log(p1/p2).
  double beta_max = std::min(1.0, 0.5 * std::log(p1 / p2));
  if (!(beta_max > 0.0)) return 0.0;
  double hi = beta_max * (1.0 - 1e-12);
  auto objective = [&](double beta) {
    double denom = p1 - std::exp(2.0 * beta) * p2;
    if (denom <= 0.0) return -std::numeric_limits<double>::infinity();
    double l = std::log(1.25 * (1.0 + std::exp(beta)) / denom);
    return sigma * beta / std::sqrt(2.0 * l);
  };
  Tolerance tol{1e-12, 1e-12, 400};
  auto [arg, best] = maximize_1d(objective, 1e-12, hi, tol);
  (void)arg;
  return std::max(0.0, best);
}

L1Baselines radius_baselines_l1(const TopTwoProbs& tt, double sigma) {
  tt.validate();
  if (!(sigma > 0.0)) throw std::domain_error("radius_baselines_l1: sigma > 0 required");
  if (tt.p2 <= 0.0)
    throw std::domain_error("radius_baselines_l1: p2 > 0 required");
  L1Baselines out;
  out.lecuyer = 0.5 * sigma * std::log(tt.p1 / tt.p2);
  out.li = -sigma * std::log(1.0 - tt.p1 + tt.p2);
  return out;
}

std::vector<HierarchyRow> hierarchy_report(const std::vector<double>& p1_grid,
                                           double sigma) {
  std::vector<HierarchyRow> rows;
  rows.reserve(p1_grid.size());
  for (double p1 : p1_grid) {
    if (!(p1 > 0.5 && p1 < 1.0))
      throw std::domain_error("hierarchy_report: grid must lie in (0.5, 1)");
    TopTwoProbs tt{p1, 1.0 - p1};
    HierarchyRow r;
    r.p1 = p1;
    r.kl = radius_closed(DivergenceKind::kl(), tt, sigma);
    r.hellinger = radius_closed(DivergenceKind::hellinger2(), tt, sigma);
    r.chi2 = radius_closed(DivergenceKind::chi2(), tt, sigma);
    r.bhattacharyya = radius_closed(DivergenceKind::bhattacharyya(), tt, sigma);
    r.tv = radius_closed(DivergenceKind::tv(), tt, sigma);
    r.renyi_sup = radius_renyi_sup(tt, sigma);
    r.lecuyer = radius_lecuyer_l2(tt, sigma);
    r.cohen = radius_cohen(tt, sigma);
    r.renyi_gt_chi2 = r.renyi_sup > r.chi2;
    r.chi2_gt_kl = r.chi2 > r.kl;
    r.chi2_gt_hellinger = r.chi2 > r.hellinger;
    r.bhat_eq_hellinger = std::fabs(r.bhattacharyya - r.hellinger) < 1e-9;
    r.hellinger_gt_kl = r.hellinger > r.kl;
    r.kl_gt_lecuyer = r.kl > r.lecuyer;
    rows.push_back(r);
  }
  return rows;
}

}  // namespace smoothcert
