#include "smoothcert/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "smoothcert/numerics.hpp"

namespace smoothcert {

namespace {

// 16-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr int kGLOrder = 16;
constexpr double kGLNode[kGLOrder] = {
    -0.9894009349916499, -0.9445750230732326, -0.8656312023878318,
    -0.7554044083550030, -0.6178762444026438, -0.4580167776572274,
    -0.2816035507792589, -0.0950125098376374, 0.0950125098376374,
    0.2816035507792589,  0.4580167776572274,  0.6178762444026438,
    0.7554044083550030,  0.8656312023878318,  0.9445750230732326,
    0.9894009349916499};
constexpr double kGLWeight[kGLOrder] = {
    0.0271524594117541, 0.0622535239386479, 0.0951585116824928,
    0.1246289712555339, 0.1495959888165767, 0.1691565193950025,
    0.1826034150449236, 0.1894506104550685, 0.1894506104550685,
    0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479,
    0.0271524594117541};

// Composite Gauss-Legendre over [lo, hi] split at the given interior break
// points (integrand kinks), with at least min_points total evaluations.
template <typename F>
double integrate(F&& f, double lo, double hi, std::vector<double> breaks,
                 int min_points) {
  breaks.push_back(lo);
  breaks.push_back(hi);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  std::vector<double> edges;
  for (double b : breaks)
    if (b >= lo && b <= hi) edges.push_back(b);
  int pieces = static_cast<int>(edges.size()) - 1;
  int panels_per_piece = std::max(1, (min_points / kGLOrder + pieces) / pieces);
  double total = 0.0;
  for (int p = 0; p < pieces; ++p) {
    double a = edges[p], b = edges[p + 1];
    double h = (b - a) / panels_per_piece;
    for (int j = 0; j < panels_per_piece; ++j) {
      double c = a + j * h;
      double mid = c + 0.5 * h;
      double half = 0.5 * h;
      double acc = 0.0;
      for (int i = 0; i < kGLOrder; ++i)
        acc += kGLWeight[i] * f(mid + half * kGLNode[i]);
      total += acc * half;
    }
  }
  return total;
}

}  // namespace

void GenGaussian::validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw std::domain_error("GenGaussian: sigma must be positive and finite");
  if (!(shape >= 1.0) || !std::isfinite(shape))
    throw std::domain_error("GenGaussian: shape must be >= 1");
}

bool GenGaussian::integer_shape() const {
  return shape == std::floor(shape);
}

int GenGaussian::shape_int() const {
  if (!integer_shape())
    throw std::domain_error("GenGaussian: integer shape required for closed forms");
  return static_cast<int>(shape);
}

ShiftPair::ShiftPair(std::vector<double> delta_, int max_order)
    : delta(std::move(delta_)) {
  if (max_order < 1) throw std::domain_error("ShiftPair: max_order >= 1");
  norm_pows.assign(max_order, 0.0);
  for (double d : delta) {
    double a = std::fabs(d);
    double pw = 1.0;
    for (int k = 1; k <= max_order; ++k) {
      pw *= a;
      norm_pows[k - 1] += pw;
    }
  }
}

double ShiftPair::norm_pow(int k) const {
  if (k < 1 || k > static_cast<int>(norm_pows.size()))
    throw std::domain_error("ShiftPair: norm order out of cached range");
  return norm_pows[k - 1];
}

double gn_log_density(const GenGaussian& g, double mu, double x) {
  g.validate();
  double z = std::fabs(x - mu) / g.sigma;
  return std::log(g.shape) - std::log(2.0 * g.sigma) - ln_gamma(1.0 / g.shape) -
         std::pow(z, g.shape);
}

void gn_sample_into(const GenGaussian& g, std::span<const double> mu,
                    RngStream& rng, std::span<double> out) {
  const double inv_shape = 1.0 / g.shape;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    double magnitude = g.sigma * std::pow(rng.gamma(inv_shape), inv_shape);
    out[i] = mu[i] + (rng.coin() ? magnitude : -magnitude);
  }
}

std::vector<double> gn_sample(const GenGaussian& g, std::span<const double> mu,
                              RngStream& rng) {
  std::vector<double> out(mu.size());
  gn_sample_into(g, mu, rng, out);
  return out;
}

double gn_abs_moment(const GenGaussian& g, int k) {
  if (k < 1) throw std::domain_error("gn_abs_moment: k >= 1 required");
  return std::exp(k * std::log(g.sigma) + ln_gamma((k + 1.0) / g.shape) -
                  ln_gamma(1.0 / g.shape));
}

double gn_kl_coefficient(int s, int k) {
  if (s < 1) throw std::domain_error("gn_kl_coefficient: s >= 1 required");
  if (k < 1 || k > s) throw std::domain_error("gn_kl_coefficient: 1 <= k <= s required");
  if ((s - k) % 2 != 0) return 0.0;  // the (1 + (-1)^(s-k)) selector
  double log_binom = ln_gamma(s + 1.0) - ln_gamma(k + 1.0) - ln_gamma(s - k + 1.0);
  return std::exp(log_binom + ln_gamma((s - k + 1.0) / s) - ln_gamma(1.0 / s));
}

double gn_kl_closed(const GenGaussian& g, const ShiftPair& shift) {
  const int s = g.shape_int();
  if (static_cast<int>(shift.norm_pows.size()) < s)
    throw std::domain_error("gn_kl_closed: shift must cache norms up to order s");
  double total = 0.0;
  double inv_sigma_k = 1.0;
  for (int k = 1; k <= s; ++k) {
    inv_sigma_k /= g.sigma;
    double c = gn_kl_coefficient(s, k);
    if (c == 0.0) continue;
    total += c * shift.norm_pow(k) * inv_sigma_k;
  }
  return total;
}

double gn_kl_numeric(const GenGaussian& g, double delta_1d, int quad_points) {
  g.validate();
  if (quad_points < 10000)
    throw std::domain_error("gn_kl_numeric: at least 1e4 quadrature points");
  const double mu1 = 0.0;
  const double mu2 = delta_1d;
  const double lo = mu1 - 40.0 * g.sigma;
  const double hi = mu1 + 40.0 * g.sigma;
  auto integrand = [&](double x) {
    double lp1 = gn_log_density(g, mu1, x);
    double z1 = std::fabs(x - mu1) / g.sigma;
    double z2 = std::fabs(x - mu2) / g.sigma;
    // log(p1/p2) = z2^s - z1^s
    return std::exp(lp1) * (std::pow(z2, g.shape) - std::pow(z1, g.shape));
  };
  return integrate(integrand, lo, hi, {mu1, mu2}, quad_points);
}

double gaussian_divergence(DivergenceKind kind, double delta_l2, double std_dev) {
  if (!(delta_l2 >= 0.0)) throw std::domain_error("gaussian_divergence: delta >= 0");
  if (!(std_dev > 0.0)) throw std::domain_error("gaussian_divergence: std > 0");
  const double r2 = delta_l2 * delta_l2 / (std_dev * std_dev);
  switch (kind.family) {
    case DivergenceFamily::KL: return 0.5 * r2;
    case DivergenceFamily::Renyi: return 0.5 * kind.alpha * r2;
    case DivergenceFamily::Hellinger2: return 1.0 - std::exp(-r2 / 8.0);
    case DivergenceFamily::Chi2: return std::expm1(r2);
    case DivergenceFamily::Bhattacharyya: return r2 / 8.0;
    case DivergenceFamily::TV: return 2.0 * std_normal_cdf(0.5 * delta_l2 / std_dev) - 1.0;
  }
  throw std::logic_error("gaussian_divergence: unknown kind");
}

double gaussian_divergence_numeric(DivergenceKind kind, double delta_l2,
                                   double std_dev, int quad_points) {
  if (!(delta_l2 >= 0.0) || !(std_dev > 0.0))
    throw std::domain_error("gaussian_divergence_numeric: bad arguments");
  const double mu1 = 0.0, mu2 = delta_l2;
  const double lo = std::min(mu1, mu2) - 40.0 * std_dev;
  const double hi = std::max(mu1, mu2) + 40.0 * std_dev;
  const double inv2v = 1.0 / (2.0 * std_dev * std_dev);
  const double lognorm = -0.5 * std::log(2.0 * M_PI) - std::log(std_dev);
  auto logp = [&](double x, double mu) {
    return lognorm - (x - mu) * (x - mu) * inv2v;
  };
  // |p1 - p2| kinks where the densities cross (the midpoint).
  std::vector<double> breaks = {0.5 * (mu1 + mu2)};
  switch (kind.family) {
    case DivergenceFamily::KL:
      return integrate(
          [&](double x) {
            double l1 = logp(x, mu1);
            return std::exp(l1) * (l1 - logp(x, mu2));
          },
          lo, hi, {}, quad_points);
    case DivergenceFamily::Renyi: {
      double a = kind.alpha;
      double s = integrate(
          [&](double x) { return std::exp(a * logp(x, mu1) + (1.0 - a) * logp(x, mu2)); },
          lo, hi, {}, quad_points);
      return std::log(s) / (a - 1.0);
    }
    case DivergenceFamily::Hellinger2:
      return 0.5 * integrate(
                       [&](double x) {
                         double d = std::exp(0.5 * logp(x, mu1)) -
                                    std::exp(0.5 * logp(x, mu2));
                         return d * d;
                       },
                       lo, hi, {}, quad_points);
    case DivergenceFamily::Chi2:
      // (p1 - p2)^2 / p2 expanded in log space; the naive ratio is 0/0 in
      // the far tails.
      return integrate(
          [&](double x) {
            double l1 = logp(x, mu1), l2 = logp(x, mu2);
            return std::exp(2.0 * l1 - l2) - 2.0 * std::exp(l1) + std::exp(l2);
          },
          lo, hi, {}, quad_points);
    case DivergenceFamily::Bhattacharyya:
      return -std::log(integrate(
          [&](double x) { return std::exp(0.5 * (logp(x, mu1) + logp(x, mu2))); },
          lo, hi, {}, quad_points));
    case DivergenceFamily::TV:
      return 0.5 * integrate(
                       [&](double x) {
                         return std::fabs(std::exp(logp(x, mu1)) - std::exp(logp(x, mu2)));
                       },
                       lo, hi, breaks, quad_points);
  }
  throw std::logic_error("gaussian_divergence_numeric: unknown kind");
}

}  // namespace smoothcert
