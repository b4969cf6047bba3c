#include "smoothcert/divergence_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "smoothcert/numerics.hpp"

namespace smoothcert {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_add_exp(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  double m = std::max(a, b);
  return m + std::log1p(std::exp(-(std::fabs(a - b))));
}

// ((p1^(1-a) + p2^(1-a)) / 2)^(1/(1-a)) in log space; safe for large alpha.
double renyi_power_mean(double p1, double p2, double alpha) {
  double e = 1.0 - alpha;
  double la = p1 > 0 ? e * std::log(p1) : kInf;  // e < 0: p -> 0 sends term to +inf
  double lb = p2 > 0 ? e * std::log(p2) : kInf;
  if (std::isinf(la) || std::isinf(lb)) return 0.0;  // mean -> +inf, mean^(1/e) -> 0
  double lmean = log_add_exp(la, lb) - std::log(2.0);
  return std::exp(lmean / e);
}

}  // namespace

void TopTwoProbs::validate() const {
  if (!(p1 >= p2 && p2 >= 0.0 && p1 <= 1.0 && p1 + p2 <= 1.0 + 1e-12))
    throw std::domain_error("TopTwoProbs: need 1 >= p1 >= p2 >= 0 and p1 + p2 <= 1");
}

DivergenceKind DivergenceKind::renyi(double alpha) {
  if (!(alpha > 1.0)) throw std::domain_error("DivergenceKind::renyi: alpha > 1 required");
  return {DivergenceFamily::Renyi, alpha};
}

const char* DivergenceKind::name() const {
  switch (family) {
    case DivergenceFamily::KL: return "kl";
    case DivergenceFamily::Renyi: return "renyi";
    case DivergenceFamily::Hellinger2: return "hellinger";
    case DivergenceFamily::Chi2: return "chi2";
    case DivergenceFamily::Bhattacharyya: return "bhattacharyya";
    case DivergenceFamily::TV: return "tv";
  }
  return "?";
}

void Multinomial::validate() const {
  if (probs.size() < 2) throw std::domain_error("Multinomial: need at least 2 classes");
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0)) throw std::domain_error("Multinomial: negative probability");
    sum += p;
  }
  if (std::fabs(sum - 1.0) > 1e-12)
    throw std::domain_error("Multinomial: probabilities must sum to 1");
}

Multinomial Multinomial::sorted_desc() const {
  Multinomial out = *this;
  std::sort(out.probs.begin(), out.probs.end(), std::greater<double>());
  return out;
}

double divergence(DivergenceKind kind, const Multinomial& q, const Multinomial& p) {
  if (q.probs.size() != p.probs.size())
    throw std::domain_error("divergence: size mismatch");
  const std::size_t k = p.probs.size();
  switch (kind.family) {
    case DivergenceFamily::KL: {
      double s = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        double qi = q.probs[i], pi = p.probs[i];
        if (qi == 0.0) continue;
        if (pi == 0.0) return kInf;
        s += qi * std::log(qi / pi);
      }
      return s;
    }
    case DivergenceFamily::Renyi: {
      double a = kind.alpha;
      double lsum = -kInf;
      for (std::size_t i = 0; i < k; ++i) {
        double qi = q.probs[i], pi = p.probs[i];
        if (qi == 0.0) continue;
        if (pi == 0.0) return kInf;
        lsum = log_add_exp(lsum, a * std::log(qi) + (1.0 - a) * std::log(pi));
      }
      return lsum / (a - 1.0);
    }
    case DivergenceFamily::Hellinger2: {
      double s = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        double d = std::sqrt(q.probs[i]) - std::sqrt(p.probs[i]);
        s += d * d;
      }
      return 0.5 * s;
    }
    case DivergenceFamily::Chi2: {
      double s = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        double qi = q.probs[i], pi = p.probs[i];
        double d = qi - pi;
        if (pi == 0.0) {
          if (qi == 0.0) continue;
          return kInf;
        }
        s += d * d / pi;
      }
      return s;
    }
    case DivergenceFamily::Bhattacharyya: {
      double s = 0.0;
      for (std::size_t i = 0; i < k; ++i) s += std::sqrt(q.probs[i] * p.probs[i]);
      return -std::log(s);
    }
    case DivergenceFamily::TV: {
      double s = 0.0;
      for (std::size_t i = 0; i < k; ++i) s += std::fabs(q.probs[i] - p.probs[i]);
      return 0.5 * s;
    }
  }
  throw std::logic_error("divergence: unknown kind");
}

double lower_bound(DivergenceKind kind, const TopTwoProbs& tt) {
  tt.validate();
  const double p1 = tt.p1, p2 = tt.p2;
  switch (kind.family) {
    case DivergenceFamily::KL:
      return -std::log(2.0 * std::sqrt(p1 * p2) + 1.0 - p1 - p2);
    case DivergenceFamily::Renyi: {
      double m = renyi_power_mean(p1, p2, kind.alpha);
      return -std::log(1.0 - p1 - p2 + 2.0 * m);
    }
    case DivergenceFamily::Hellinger2: {
      double d = std::sqrt(p1) - std::sqrt(p2);
      return 1.0 - std::sqrt(1.0 - 0.5 * d * d);
    }
    case DivergenceFamily::Chi2: {
      double diff = p1 - p2;
      double denom = (p1 + p2) - diff * diff;
      if (denom <= 0.0) return kInf;
      return diff * diff / denom;
    }
    case DivergenceFamily::Bhattacharyya: {
      // Table form ((sqrt(p1)+sqrt(p2))^2 + 2(1-p1-p2)) / sqrt(2 eta) reduces
      // to sqrt(eta/2) with eta = 2 sqrt(p1 p2) + 2 - p1 - p2.
      double eta = 2.0 * std::sqrt(p1 * p2) + 2.0 - p1 - p2;
      return -0.5 * std::log(0.5 * eta);
    }
    case DivergenceFamily::TV:
      return 0.5 * std::fabs(p1 - p2);
  }
  throw std::logic_error("lower_bound: unknown kind");
}

Multinomial minimizing_distribution(DivergenceKind kind, const Multinomial& p_in) {
  p_in.validate();
  Multinomial p = p_in.sorted_desc();
  const std::size_t k = p.probs.size();
  const double p1 = p.probs[0], p2 = p.probs[1];
  Multinomial q;
  q.probs.assign(k, 0.0);
  double q0 = 0.0, tail_scale = 1.0;
  switch (kind.family) {
    case DivergenceFamily::KL: {
      double eta = 2.0 * std::sqrt(p1 * p2) + 1.0 - p1 - p2;
      q0 = std::sqrt(p1 * p2) / eta;
      tail_scale = 1.0 / eta;
      break;
    }
    case DivergenceFamily::Renyi: {
      double m = renyi_power_mean(p1, p2, kind.alpha);
      double denom = 2.0 * m + 1.0 - p1 - p2;
      q0 = m / denom;
      tail_scale = 1.0 / denom;
      break;
    }
    case DivergenceFamily::Hellinger2:
    case DivergenceFamily::Bhattacharyya: {
      double r = std::sqrt(p1) + std::sqrt(p2);
      double eta = 2.0 * std::sqrt(p1 * p2) + 2.0 - p1 - p2;
      q0 = r * r / (2.0 * eta);
      tail_scale = 2.0 / eta;
      break;
    }
    case DivergenceFamily::Chi2: {
      double diff = p1 - p2;
      double eta = (p1 + p2) - diff * diff;
      q0 = 2.0 * p1 * p2 / eta;
      tail_scale = (p1 + p2) / eta;
      break;
    }
    case DivergenceFamily::TV: {
      q0 = 0.5 * (p1 + p2);
      tail_scale = 1.0;
      break;
    }
  }
  q.probs[0] = q.probs[1] = q0;
  for (std::size_t i = 2; i < k; ++i) q.probs[i] = tail_scale * p.probs[i];
  q.validate();
  return q;
}

namespace {

// Shared scan body: the candidate Q has its coordinates given as grid counts
// over N cells. Feasibility: coordinate 0 must not be the strict unique argmax.
template <int K>
double scan_simplex(DivergenceKind kind, const Multinomial& p, long long n,
                    bool parallel);

template <>
double scan_simplex<2>(DivergenceKind kind, const Multinomial& p, long long n,
                       bool parallel) {
  const double inv = 1.0 / static_cast<double>(n);
  double best = kInf;
#pragma omp parallel for reduction(min : best) schedule(static) if (parallel)
  for (long long i = 0; i <= n; ++i) {
    long long j = n - i;
    if (i > j) continue;  // coordinate 0 may tie but not strictly dominate
    Multinomial q;
    q.probs = {i * inv, j * inv};
    double d = divergence(kind, q, p);
    if (d < best) best = d;
  }
  return best;
}

template <>
double scan_simplex<3>(DivergenceKind kind, const Multinomial& p, long long n,
                       bool parallel) {
  const double inv = 1.0 / static_cast<double>(n);
  double best = kInf;
#pragma omp parallel for reduction(min : best) schedule(dynamic, 16) if (parallel)
  for (long long i = 0; i <= n; ++i) {
    Multinomial q;
    q.probs.assign(3, 0.0);
    for (long long j = 0; i + j <= n; ++j) {
      long long l = n - i - j;
      if (i > j && i > l) continue;
      q.probs[0] = i * inv;
      q.probs[1] = j * inv;
      q.probs[2] = l * inv;
      double d = divergence(kind, q, p);
      if (d < best) best = d;
    }
  }
  return best;
}

template <>
double scan_simplex<4>(DivergenceKind kind, const Multinomial& p, long long n,
                       bool parallel) {
  const double inv = 1.0 / static_cast<double>(n);
  double best = kInf;
#pragma omp parallel for reduction(min : best) schedule(dynamic, 4) if (parallel)
  for (long long i = 0; i <= n; ++i) {
    Multinomial q;
    q.probs.assign(4, 0.0);
    for (long long j = 0; i + j <= n; ++j) {
      for (long long l = 0; i + j + l <= n; ++l) {
        long long m = n - i - j - l;
        if (i > j && i > l && i > m) continue;
        q.probs[0] = i * inv;
        q.probs[1] = j * inv;
        q.probs[2] = l * inv;
        q.probs[3] = m * inv;
        double d = divergence(kind, q, p);
        if (d < best) best = d;
      }
    }
  }
  return best;
}

double brute_force_impl(DivergenceKind kind, const Multinomial& p_in,
                        double grid_resolution, bool parallel) {
  if (!(grid_resolution >= 1e-4 && grid_resolution <= 1e-2))
    throw std::domain_error("brute_force_lower_bound: grid_resolution in [1e-4, 1e-2]");
  Multinomial p = p_in.sorted_desc();
  const long long n = std::llround(1.0 / grid_resolution);
  switch (p.probs.size()) {
    case 2: return scan_simplex<2>(kind, p, n, parallel);
    case 3: return scan_simplex<3>(kind, p, n, parallel);
    case 4: return scan_simplex<4>(kind, p, n, parallel);
    default:
      throw std::length_error("brute_force_lower_bound: oracle handles k in {2, 3, 4}");
  }
}

}  // namespace

double brute_force_lower_bound(DivergenceKind kind, const Multinomial& p,
                               double grid_resolution) {
  return brute_force_impl(kind, p, grid_resolution, true);
}

double brute_force_lower_bound_serial(DivergenceKind kind, const Multinomial& p,
                                      double grid_resolution) {
  return brute_force_impl(kind, p, grid_resolution, false);
}

}  // namespace smoothcert
