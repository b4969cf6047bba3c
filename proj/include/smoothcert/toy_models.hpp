#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "smoothcert/mc_pipeline.hpp"
#include "smoothcert/smoothing.hpp"

namespace smoothcert {

struct Dataset {
  std::vector<std::vector<double>> x;
  std::vector<int> y;
  int dim = 0;
  int classes = 0;

  void save_csv(const std::string& path) const;
  static Dataset load_csv(const std::string& path);
};

/// k isotropic unit-variance Gaussian clusters with centers at pairwise
/// distance >= separation. Deterministic per seed; exactly n_per_class
/// points per class.
Dataset make_blobs(int dim, int classes, int n_per_class, double separation,
                   std::uint64_t seed);

/// Linear softmax classifier, optionally with one ReLU hidden layer.
struct ToyModel {
  int dim = 0;
  int classes = 0;
  int hidden = 0;  // 0 -> linear: w1 is classes x dim, b1 length classes

  std::vector<double> w1, b1;  // hidden x dim / length hidden when hidden > 0
  std::vector<double> w2, b2;  // classes x hidden / length classes (hidden > 0)

  static ToyModel linear(int dim, int classes, std::uint64_t seed);
  static ToyModel mlp(int dim, int hidden, int classes, std::uint64_t seed);

  std::vector<double> logits(std::span<const double> x) const;
  int predict(std::span<const double> x) const;
  BaseClassifier classifier() const;

  std::vector<double> params() const;
  void set_params(std::span<const double> theta);
};

/// Mean cross-entropy over the batch; if grad is non-null it receives the
/// gradient with respect to the flattened parameters (params() layout).
double ce_loss_and_grad(const ToyModel& model,
                        const std::vector<std::vector<double>>& xs,
                        const std::vector<int>& ys, std::vector<double>* grad);

/// Gradient of the cross-entropy at (x, y) with respect to the input.
std::vector<double> ce_input_grad(const ToyModel& model, std::span<const double> x,
                                  int y);

/// Full-batch gradient descent on cross-entropy with a fresh GN noise draw
/// added to every example at every epoch. Deterministic per seed.
ToyModel train_noise_augmented(ToyModel model, const Dataset& data,
                               const GenGaussian& noise, int epochs,
                               double step_size, std::uint64_t seed);

/// Majority vote of the smoothed classifier over n_mc noise draws.
int smoothed_vote(const ToyModel& model, std::span<const double> x,
                  const GenGaussian& noise, int n_mc, std::uint64_t seed,
                  std::uint64_t round);

struct AttackResult {
  std::vector<double> delta;
  bool success = false;
  double norm = 0.0;  // ||delta||_2 when success
};

/// Expectation-over-transformation PGD in the l2 norm: gradient steps on the
/// expected cross-entropy (gradient averaged over n_mc fresh draws per
/// step), with a post-step bisection along the ray to the minimal scale that
/// still flips the smoothed majority vote.
AttackResult eot_pgd_l2(const ToyModel& model, std::span<const double> x, int y,
                        const GenGaussian& noise, int n_mc, int steps,
                        double step_size, std::uint64_t seed = 0x5eedULL);

}  // namespace smoothcert
