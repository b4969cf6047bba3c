#include "smoothcert/mc_pipeline.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>

#include <json.hpp>

#include "smoothcert/lp_certifier.hpp"
#include "smoothcert/numerics.hpp"
#include "smoothcert/rng.hpp"

namespace smoothcert {

void SmoothingConfig::validate() const {
  GenGaussian(sigma, static_cast<double>(shape)).validate();
  if (shape < 1) throw std::domain_error("SmoothingConfig: shape >= 1");
  if (n0 < 1 || n1 < 1) throw std::domain_error("SmoothingConfig: n0, n1 >= 1");
  if (!(gamma0 > 0 && gamma0 < 1 && gamma1 > 0 && gamma1 < 1))
    throw std::domain_error("SmoothingConfig: gammas in (0, 1)");
}

std::string certificates_to_json(const std::vector<Certificate>& certs,
                                 const std::vector<int>& labels) {
  if (certs.size() != labels.size())
    throw std::invalid_argument("certificates_to_json: size mismatch");
  nlohmann::json arr = nlohmann::json::array();
  for (std::size_t i = 0; i < certs.size(); ++i) {
    const Certificate& c = certs[i];
    nlohmann::json radii = nlohmann::json::object();
    for (const auto& [p, r] : c.radii) radii[std::to_string(p)] = r;
    arr.push_back({{"input_id", c.input_id},
                   {"label", labels[i]},
                   {"predicted", c.predicted},
                   {"abstained", c.abstained},
                   {"p1_lo", c.p1_lo},
                   {"p2_hi", c.p2_hi},
                   {"radii", std::move(radii)}});
  }
  return arr.dump(2) + "\n";
}

int max_threads() {
  if (const char* env = std::getenv("SMOOTHCERT_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return std::min(n, omp_get_max_threads());
  }
  return omp_get_max_threads();
}

namespace {

void merge_counts(std::vector<long long>& into, const std::vector<long long>& from) {
  if (from.size() > into.size()) into.resize(from.size(), 0);
  for (std::size_t i = 0; i < from.size(); ++i) into[i] += from[i];
}

std::vector<long long> count_votes_impl(const BaseClassifier& f,
                                        std::span<const double> x,
                                        const GenGaussian& noise, long long n,
                                        std::uint64_t seed, long long input_id,
                                        std::uint64_t phase, bool parallel) {
  if (n < 1) throw std::domain_error("count_votes: n >= 1 required");
  std::vector<long long> counts;
  bool bad_label = false;
  const int threads = parallel ? max_threads() : 1;
#pragma omp parallel num_threads(threads)
  {
    std::vector<long long> local;
    std::vector<double> buf(x.size());
#pragma omp for schedule(static)
    for (long long j = 0; j < n; ++j) {
      RngStream rng = make_stream(seed, static_cast<std::uint64_t>(input_id), phase,
                                  static_cast<std::uint64_t>(j));
      gn_sample_into(noise, x, rng, buf);
      int label = f(buf);
      if (label < 0) {
#pragma omp atomic write
        bad_label = true;
        continue;
      }
      if (static_cast<std::size_t>(label) >= local.size()) local.resize(label + 1, 0);
      ++local[label];
    }
#pragma omp critical
    merge_counts(counts, local);
  }
  if (bad_label) throw std::domain_error("count_votes: classifier returned label < 0");
  return counts;
}

constexpr std::uint64_t kPhasePredict = 1;
constexpr std::uint64_t kPhaseEstimate = 2;

std::pair<int, bool> predict_from_counts(const std::vector<long long>& counts,
                                         double gamma0) {
  int top = -1, runner = -1;
  long long top_n = -1, runner_n = -1;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] > top_n) {
      runner = top;
      runner_n = top_n;
      top = static_cast<int>(i);
      top_n = counts[i];
    } else if (counts[i] > runner_n) {
      runner = static_cast<int>(i);
      runner_n = counts[i];
    }
  }
  (void)runner;
  if (top < 0) return {-1, false};
  long long nb = runner_n > 0 ? runner_n : 0;
  // Two-class reduction: is the top count consistent with probability 1/2?
  double log_pvalue = log_binomial_tail_ge(top_n, top_n + nb, 0.5);
  return {top, log_pvalue <= std::log(gamma0)};
}

}  // namespace

std::vector<long long> count_votes(const BaseClassifier& f, std::span<const double> x,
                                   const GenGaussian& noise, long long n,
                                   std::uint64_t seed, long long input_id,
                                   std::uint64_t phase) {
  return count_votes_impl(f, x, noise, n, seed, input_id, phase, true);
}

std::vector<long long> count_votes_serial(const BaseClassifier& f,
                                          std::span<const double> x,
                                          const GenGaussian& noise, long long n,
                                          std::uint64_t seed, long long input_id,
                                          std::uint64_t phase) {
  return count_votes_impl(f, x, noise, n, seed, input_id, phase, false);
}

std::pair<int, bool> predict_class(const BaseClassifier& f, std::span<const double> x,
                                   const SmoothingConfig& cfg, long long input_id) {
  cfg.validate();
  GenGaussian noise(cfg.sigma, cfg.shape);
  auto counts = count_votes(f, x, noise, cfg.n0, cfg.seed, input_id, kPhasePredict);
  return predict_from_counts(counts, cfg.gamma0);
}

std::pair<double, double> estimate_p1_lower(const BaseClassifier& f,
                                            std::span<const double> x, int label,
                                            const SmoothingConfig& cfg,
                                            long long input_id) {
  cfg.validate();
  GenGaussian noise(cfg.sigma, cfg.shape);
  auto counts = count_votes(f, x, noise, cfg.n1, cfg.seed, input_id, kPhaseEstimate);
  long long hits = 0;
  if (label >= 0 && static_cast<std::size_t>(label) < counts.size())
    hits = counts[label];
  double p1_lo = clopper_pearson_lower(hits, cfg.n1, cfg.gamma1);
  return {p1_lo, 1.0 - p1_lo};
}

Certificate certify(const BaseClassifier& f, std::span<const double> x,
                    const SmoothingConfig& cfg, const std::vector<int>& norms,
                    long long input_id) {
  cfg.validate();
  if (norms.empty()) throw std::invalid_argument("certify: at least one norm required");
  for (int p : norms) {
    if (p < 1 || p > cfg.shape || (cfg.shape - p) % 2 != 0)
      throw std::invalid_argument(
          "certify: requested norm must be active for the smoothing shape "
          "(norm <= shape, shape - norm even)");
  }
  Certificate cert;
  cert.input_id = input_id;
  cert.config = cfg;
  auto [label, confident] = predict_class(f, x, cfg, input_id);
  cert.predicted = label;
  if (!confident) return cert;  // abstain
  auto [p1_lo, p2_hi] = estimate_p1_lower(f, x, label, cfg, input_id);
  cert.p1_lo = p1_lo;
  cert.p2_hi = p2_hi;
  if (p1_lo <= 0.5) return cert;  // abstain
  cert.abstained = false;
  TopTwoProbs tt{p1_lo, p2_hi};
  double eps = radius_equal_eps(cfg.shape, tt, cfg.sigma);
  for (int p : norms) cert.radii[p] = eps;
  return cert;
}

std::vector<Certificate> certify_dataset(const BaseClassifier& f,
                                         const std::vector<std::vector<double>>& inputs,
                                         const SmoothingConfig& cfg,
                                         const std::vector<int>& norms) {
  cfg.validate();
  std::vector<Certificate> certs(inputs.size());
  std::exception_ptr error;
  const int threads = max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    try {
      certs[i] = certify(f, inputs[i], cfg, norms, static_cast<long long>(i));
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return certs;
}

std::vector<std::pair<double, double>> certified_accuracy_curve(
    const std::vector<Certificate>& certs, const std::vector<int>& labels, int norm,
    const std::vector<double>& radius_grid) {
  if (certs.size() != labels.size())
    throw std::invalid_argument("certified_accuracy_curve: size mismatch");
  std::vector<std::pair<double, double>> curve;
  curve.reserve(radius_grid.size());
  for (double r : radius_grid) {
    long long good = 0;
    for (std::size_t i = 0; i < certs.size(); ++i) {
      const Certificate& c = certs[i];
      if (c.abstained || c.predicted != labels[i]) continue;
      auto it = c.radii.find(norm);
      if (it != c.radii.end() && it->second >= r) ++good;
    }
    curve.emplace_back(r, certs.empty() ? 0.0
                                        : static_cast<double>(good) /
                                              static_cast<double>(certs.size()));
  }
  return curve;
}

std::string certificates_to_csv(const std::vector<Certificate>& certs,
                                const std::vector<int>& labels,
                                const std::vector<int>& norms) {
  if (certs.size() != labels.size())
    throw std::invalid_argument("certificates_to_csv: size mismatch");
  std::string out = "input_id,label,predicted,abstained,p1_lo,p2_hi,norm,radius\n";
  char buf[160];
  for (std::size_t i = 0; i < certs.size(); ++i) {
    const Certificate& c = certs[i];
    for (int p : norms) {
      std::snprintf(buf, sizeof(buf), "%lld,%d,%d,%d,%.12g,%.12g,%d,",
                    c.input_id, labels[i], c.predicted, c.abstained ? 1 : 0, c.p1_lo,
                    c.p2_hi, p);
      out += buf;
      if (!c.abstained) {
        std::snprintf(buf, sizeof(buf), "%.12g", c.radii.at(p));
        out += buf;
      }
      out += '\n';
    }
  }
  return out;
}

}  // namespace smoothcert
