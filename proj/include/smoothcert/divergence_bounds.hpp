#pragma once

#include <vector>

namespace smoothcert {

/// The two largest class probabilities of a multinomial output distribution.
struct TopTwoProbs {
  double p1 = 0.0;
  double p2 = 0.0;

  TopTwoProbs() = default;
  TopTwoProbs(double p1_, double p2_) : p1(p1_), p2(p2_) { validate(); }

  void validate() const;
};

enum class DivergenceFamily { KL, Renyi, Hellinger2, Chi2, Bhattacharyya, TV };

/// A divergence choice; Renyi carries its order alpha > 1.
struct DivergenceKind {
  DivergenceFamily family = DivergenceFamily::KL;
  double alpha = 0.0;  // meaningful for Renyi only

  static DivergenceKind kl() { return {DivergenceFamily::KL, 0.0}; }
  static DivergenceKind renyi(double alpha);
  static DivergenceKind hellinger2() { return {DivergenceFamily::Hellinger2, 0.0}; }
  static DivergenceKind chi2() { return {DivergenceFamily::Chi2, 0.0}; }
  static DivergenceKind bhattacharyya() { return {DivergenceFamily::Bhattacharyya, 0.0}; }
  static DivergenceKind tv() { return {DivergenceFamily::TV, 0.0}; }

  const char* name() const;
};

struct Multinomial {
  std::vector<double> probs;

  Multinomial() = default;
  explicit Multinomial(std::vector<double> p) : probs(std::move(p)) { validate(); }

  void validate() const;
  /// Copy with probabilities sorted in descending order.
  Multinomial sorted_desc() const;
};

/// d(Q, P) between multinomials, with the conventions 0 log(0/q) = 0 and
/// p log(p/0) = +inf.
double divergence(DivergenceKind kind, const Multinomial& q, const Multinomial& p);

/// Minimal divergence h(p1, p2) over all Q whose argmax differs from P's.
double lower_bound(DivergenceKind kind, const TopTwoProbs& tt);

/// The Q attaining lower_bound for a given P (returned against P sorted
/// descending): top two coordinates tied, the rest rescaled.
Multinomial minimizing_distribution(DivergenceKind kind, const Multinomial& p);

/// Grid-enumeration oracle for lower_bound: minimizes d(Q, P) over a simplex
/// grid of Q restricted to "index 1 is not the strict unique argmax of Q".
/// k <= 4 classes only. OpenMP-parallel scan; the reduction (min) is
/// order-independent, so results match the serial reference exactly.
double brute_force_lower_bound(DivergenceKind kind, const Multinomial& p,
                               double grid_resolution);

/// Serial reference for brute_force_lower_bound, kept for testing.
double brute_force_lower_bound_serial(DivergenceKind kind, const Multinomial& p,
                                      double grid_resolution);

}  // namespace smoothcert
