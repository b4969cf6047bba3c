#pragma once

#include <vector>

#include "smoothcert/divergence_bounds.hpp"

namespace smoothcert {

/// How an l2 radius was produced: one of the divergence bounds or a
/// published baseline.
struct L2Method {
  enum class Tag { Divergence, Cohen, LecuyerL2, LecuyerL1, LiL1 };
  Tag tag = Tag::Divergence;
  DivergenceKind divergence;  // meaningful when tag == Divergence

  static L2Method from(DivergenceKind kind) { return {Tag::Divergence, kind}; }
  static L2Method cohen() { return {Tag::Cohen, {}}; }
  static L2Method lecuyer_l2() { return {Tag::LecuyerL2, {}}; }
  static L2Method lecuyer_l1() { return {Tag::LecuyerL1, {}}; }
  static L2Method li_l1() { return {Tag::LiL1, {}}; }
};

/// A computed certificate: method, inputs, and the resulting radius.
struct L2Certificate {
  L2Method method;
  double radius = 0.0;
  TopTwoProbs tt;
  double sigma = 0.0;
};

/// Evaluates the method's radius at (tt, sigma).
L2Certificate make_l2_certificate(const L2Method& method, const TopTwoProbs& tt,
                                  double sigma);

/// Certified l2 radius by generic inversion: the delta >= 0 with
/// gaussian_divergence(kind, delta, std_dev) = lower_bound(kind, tt).
/// Source of truth for all divergence-based radii.
double radius_generic(DivergenceKind kind, const TopTwoProbs& tt, double std_dev);

/// The published closed forms, evaluated verbatim in each row's own sigma
/// convention (the KL row uses the GN scale, the others the standard
/// deviation). The TV row uses the inversion-consistent form
/// 2 sigma Phi^-1(|p1-p2|/4 + 1/2).
double radius_closed(DivergenceKind kind, const TopTwoProbs& tt, double sigma);

/// sup over alpha > 1 of the Renyi radius, searched on log-spaced alpha in
/// (1 + 1e-6, 1e3].
double radius_renyi_sup(const TopTwoProbs& tt, double sigma);

/// Tight Gaussian baseline sigma/2 (Phi^-1(p1) - Phi^-1(p2)).
double radius_cohen(const TopTwoProbs& tt, double sigma);

/// Differential-privacy l2 baseline: sup over feasible beta of
/// sigma beta / sqrt(2 log(1.25 (1 + e^beta) / (p1 - e^(2 beta) p2))).
double radius_lecuyer_l2(const TopTwoProbs& tt, double sigma);

struct L1Baselines {
  double lecuyer = 0.0;  // (sigma/2) log(p1/p2)
  double li = 0.0;       // -sigma log(1 - p1 + p2)
};
L1Baselines radius_baselines_l1(const TopTwoProbs& tt, double sigma);

/// One row of the divergence-hierarchy table (binary convention p2 = 1 - p1).
struct HierarchyRow {
  double p1 = 0.0;
  double kl = 0.0;
  double hellinger = 0.0;
  double chi2 = 0.0;
  double bhattacharyya = 0.0;
  double tv = 0.0;
  double renyi_sup = 0.0;
  double lecuyer = 0.0;
  double cohen = 0.0;
  // Ordering verdicts between the closed-form radii at this p1.
  bool renyi_gt_chi2 = false;
  bool chi2_gt_kl = false;
  bool chi2_gt_hellinger = false;
  bool bhat_eq_hellinger = false;  // to 1e-9
  bool hellinger_gt_kl = false;    // expected to flip near p1 ~ 0.998
  bool kl_gt_lecuyer = false;
};

/// Radii and ordering verdicts over a grid of p1 in (0.5, 1), p2 = 1 - p1.
std::vector<HierarchyRow> hierarchy_report(const std::vector<double>& p1_grid,
                                           double sigma);

}  // namespace smoothcert
