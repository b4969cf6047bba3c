#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "smoothcert/smoothing.hpp"

namespace smoothcert {

/// A deterministic base classifier: input vector -> class label (>= 0).
using BaseClassifier = std::function<int(std::span<const double>)>;

struct SmoothingConfig {
  double sigma = 0.25;
  int shape = 2;
  long long n0 = 100;
  long long n1 = 100000;
  double gamma0 = 0.001;
  double gamma1 = 0.001;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Per-input certification result.
struct Certificate {
  long long input_id = 0;
  int predicted = -1;
  double p1_lo = 0.0;
  double p2_hi = 1.0;
  std::map<int, double> radii;  // norm order -> radius; empty when abstained
  bool abstained = true;
  SmoothingConfig config;
};

/// Label counts over n noisy evaluations f(x + theta). Streams are keyed by
/// (seed, input_id, phase, sample), so the counts are identical for any
/// thread count. OpenMP-parallel over samples.
std::vector<long long> count_votes(const BaseClassifier& f, std::span<const double> x,
                                   const GenGaussian& noise, long long n,
                                   std::uint64_t seed, long long input_id,
                                   std::uint64_t phase);

/// Serial reference for count_votes, kept for testing.
std::vector<long long> count_votes_serial(const BaseClassifier& f,
                                          std::span<const double> x,
                                          const GenGaussian& noise, long long n,
                                          std::uint64_t seed, long long input_id,
                                          std::uint64_t phase);

/// Step 1: identify the top class from n0 samples. confident is true iff a
/// one-sided exact binomial test on the top-vs-runner-up counts rejects
/// "modal probability <= 1/2" at level gamma0.
std::pair<int, bool> predict_class(const BaseClassifier& f, std::span<const double> x,
                                   const SmoothingConfig& cfg, long long input_id = 0);

/// Step 2: Clopper-Pearson lower bound on p1 from n1 fresh samples, with
/// p2_hi = 1 - p1_lo.
std::pair<double, double> estimate_p1_lower(const BaseClassifier& f,
                                            std::span<const double> x, int label,
                                            const SmoothingConfig& cfg,
                                            long long input_id = 0);

/// Full three-step certification of one input. Every requested norm must be
/// active for the smoothing shape (norm <= shape, shape - norm even); all
/// active norms are certified simultaneously at the equal-epsilon radius.
/// Abstains when the class test fails or p1_lo <= 1/2. Total error
/// probability <= gamma0 + gamma1.
Certificate certify(const BaseClassifier& f, std::span<const double> x,
                    const SmoothingConfig& cfg, const std::vector<int>& norms,
                    long long input_id = 0);

/// Certify every input; parallel over inputs with per-input serial sampling
/// (certificates are identical to the per-input parallel path).
std::vector<Certificate> certify_dataset(const BaseClassifier& f,
                                         const std::vector<std::vector<double>>& inputs,
                                         const SmoothingConfig& cfg,
                                         const std::vector<int>& norms);

/// (radius, fraction of inputs certified correct at that radius) per grid
/// point; non-increasing in the radius.
std::vector<std::pair<double, double>> certified_accuracy_curve(
    const std::vector<Certificate>& certs, const std::vector<int>& labels, int norm,
    const std::vector<double>& radius_grid);

/// Certificate CSV: header input_id,label,predicted,abstained,p1_lo,p2_hi,
/// norm,radius; one row per (input, requested norm); abstained rows leave
/// the radius field empty.
std::string certificates_to_csv(const std::vector<Certificate>& certs,
                                const std::vector<int>& labels,
                                const std::vector<int>& norms);

/// JSON array with the same fields, one object per input; radii serialized
/// as a map from norm order to radius.
std::string certificates_to_json(const std::vector<Certificate>& certs,
                                 const std::vector<int>& labels);

/// Thread cap honoring SMOOTHCERT_THREADS (defaults to the OpenMP maximum).
int max_threads();

}  // namespace smoothcert
