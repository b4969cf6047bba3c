#include "smoothcert/toy_models.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "smoothcert/rng.hpp"

namespace smoothcert {

namespace {

void softmax_inplace(std::vector<double>& z) {
  double m = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double& v : z) {
    v = std::exp(v - m);
    sum += v;
  }
  for (double& v : z) v /= sum;
}

std::vector<double> cluster_centers(int dim, int classes, double separation) {
  std::vector<double> centers(static_cast<std::size_t>(classes) * dim, 0.0);
  if (classes <= dim) {
    // Vertices separation/sqrt(2) * e_i are pairwise exactly `separation` apart.
    for (int c = 0; c < classes; ++c)
      centers[static_cast<std::size_t>(c) * dim + c] = separation / std::sqrt(2.0);
  } else if (dim >= 2) {
    // Ring in the first two coordinates with chord length = separation.
    double r = separation / (2.0 * std::sin(M_PI / classes));
    for (int c = 0; c < classes; ++c) {
      double a = 2.0 * M_PI * c / classes;
      centers[static_cast<std::size_t>(c) * dim + 0] = r * std::cos(a);
      centers[static_cast<std::size_t>(c) * dim + 1] = r * std::sin(a);
    }
  } else if (classes == 2) {
    centers[0] = -0.5 * separation;
    centers[1] = 0.5 * separation;
  } else {
    throw std::domain_error("make_blobs: more than 2 classes need dim >= 2");
  }
  return centers;
}

}  // namespace

Dataset make_blobs(int dim, int classes, int n_per_class, double separation,
                   std::uint64_t seed) {
  if (dim < 1 || classes < 2 || n_per_class < 1)
    throw std::domain_error("make_blobs: dim >= 1, classes >= 2, n_per_class >= 1");
  auto centers = cluster_centers(dim, classes, separation);
  Dataset data;
  data.dim = dim;
  data.classes = classes;
  data.x.reserve(static_cast<std::size_t>(classes) * n_per_class);
  data.y.reserve(data.x.capacity());
  for (int c = 0; c < classes; ++c) {
    for (int i = 0; i < n_per_class; ++i) {
      RngStream rng = make_stream(seed, 0xb10b5ULL, static_cast<std::uint64_t>(c),
                                  static_cast<std::uint64_t>(i));
      std::vector<double> p(dim);
      for (int j = 0; j < dim; ++j)
        p[j] = centers[static_cast<std::size_t>(c) * dim + j] + rng.normal();
      data.x.push_back(std::move(p));
      data.y.push_back(c);
    }
  }
  return data;
}

void Dataset::save_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("Dataset::save_csv: cannot open " + path);
  for (std::size_t i = 0; i < x.size(); ++i) {
    char buf[48];
    for (int j = 0; j < dim; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g,", x[i][j]);
      out << buf;
    }
    out << y[i] << '\n';
  }
}

Dataset Dataset::load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("Dataset::load_csv: cannot open " + path);
  Dataset data;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> fields;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) fields.push_back(std::stod(cell));
    if (fields.size() < 2) throw std::runtime_error("Dataset::load_csv: bad row");
    int label = static_cast<int>(fields.back());
    fields.pop_back();
    data.dim = static_cast<int>(fields.size());
    data.classes = std::max(data.classes, label + 1);
    data.x.push_back(std::move(fields));
    data.y.push_back(label);
  }
  return data;
}

ToyModel ToyModel::linear(int dim, int classes, std::uint64_t seed) {
  ToyModel m;
  m.dim = dim;
  m.classes = classes;
  m.hidden = 0;
  m.w1.resize(static_cast<std::size_t>(classes) * dim);
  m.b1.assign(classes, 0.0);
  RngStream rng = make_stream(seed, 0x70eULL);
  for (double& w : m.w1) w = 0.01 * rng.normal();
  return m;
}

ToyModel ToyModel::mlp(int dim, int hidden, int classes, std::uint64_t seed) {
  if (hidden < 1) throw std::domain_error("ToyModel::mlp: hidden >= 1");
  ToyModel m;
  m.dim = dim;
  m.classes = classes;
  m.hidden = hidden;
  m.w1.resize(static_cast<std::size_t>(hidden) * dim);
  m.b1.assign(hidden, 0.0);
  m.w2.resize(static_cast<std::size_t>(classes) * hidden);
  m.b2.assign(classes, 0.0);
  RngStream rng = make_stream(seed, 0x70eULL);
  double s1 = std::sqrt(2.0 / dim), s2 = std::sqrt(2.0 / hidden);
  for (double& w : m.w1) w = s1 * rng.normal();
  for (double& w : m.w2) w = s2 * rng.normal();
  return m;
}

std::vector<double> ToyModel::logits(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim)
    throw std::invalid_argument("ToyModel::logits: dimension mismatch");
  if (hidden == 0) {
    std::vector<double> z(classes);
    for (int c = 0; c < classes; ++c) {
      double acc = b1[c];
      const double* w = &w1[static_cast<std::size_t>(c) * dim];
      for (int j = 0; j < dim; ++j) acc += w[j] * x[j];
      z[c] = acc;
    }
    return z;
  }
  std::vector<double> h(hidden);
  for (int u = 0; u < hidden; ++u) {
    double acc = b1[u];
    const double* w = &w1[static_cast<std::size_t>(u) * dim];
    for (int j = 0; j < dim; ++j) acc += w[j] * x[j];
    h[u] = acc > 0.0 ? acc : 0.0;
  }
  std::vector<double> z(classes);
  for (int c = 0; c < classes; ++c) {
    double acc = b2[c];
    const double* w = &w2[static_cast<std::size_t>(c) * hidden];
    for (int u = 0; u < hidden; ++u) acc += w[u] * h[u];
    z[c] = acc;
  }
  return z;
}

int ToyModel::predict(std::span<const double> x) const {
  auto z = logits(x);
  return static_cast<int>(std::max_element(z.begin(), z.end()) - z.begin());
}

BaseClassifier ToyModel::classifier() const {
  ToyModel copy = *this;
  return [copy](std::span<const double> x) { return copy.predict(x); };
}

std::vector<double> ToyModel::params() const {
  std::vector<double> theta;
  theta.reserve(w1.size() + b1.size() + w2.size() + b2.size());
  theta.insert(theta.end(), w1.begin(), w1.end());
  theta.insert(theta.end(), b1.begin(), b1.end());
  theta.insert(theta.end(), w2.begin(), w2.end());
  theta.insert(theta.end(), b2.begin(), b2.end());
  return theta;
}

void ToyModel::set_params(std::span<const double> theta) {
  std::size_t need = w1.size() + b1.size() + w2.size() + b2.size();
  if (theta.size() != need) throw std::invalid_argument("ToyModel::set_params: size");
  std::size_t o = 0;
  for (double& v : w1) v = theta[o++];
  for (double& v : b1) v = theta[o++];
  for (double& v : w2) v = theta[o++];
  for (double& v : b2) v = theta[o++];
}

double ce_loss_and_grad(const ToyModel& model,
                        const std::vector<std::vector<double>>& xs,
                        const std::vector<int>& ys, std::vector<double>* grad) {
  if (xs.size() != ys.size() || xs.empty())
    throw std::invalid_argument("ce_loss_and_grad: bad batch");
  const int d = model.dim, k = model.classes, h = model.hidden;
  const double inv_n = 1.0 / static_cast<double>(xs.size());
  if (grad) grad->assign(model.params().size(), 0.0);
  double loss = 0.0;
  std::vector<double> hid(h > 0 ? h : 0), act(h > 0 ? h : 0);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const auto& x = xs[i];
    const int y = ys[i];
    std::vector<double> p;
    if (h == 0) {
      p = model.logits(x);
    } else {
      for (int u = 0; u < h; ++u) {
        double acc = model.b1[u];
        const double* w = &model.w1[static_cast<std::size_t>(u) * d];
        for (int j = 0; j < d; ++j) acc += w[j] * x[j];
        hid[u] = acc;
        act[u] = acc > 0.0 ? acc : 0.0;
      }
      p.assign(k, 0.0);
      for (int c = 0; c < k; ++c) {
        double acc = model.b2[c];
        const double* w = &model.w2[static_cast<std::size_t>(c) * h];
        for (int u = 0; u < h; ++u) acc += w[u] * act[u];
        p[c] = acc;
      }
    }
    softmax_inplace(p);
    loss -= std::log(std::max(p[y], 1e-300)) * inv_n;
    if (!grad) continue;
    // dL/dz_c = (p_c - [c == y]) / n
    if (h == 0) {
      double* gw = grad->data();
      double* gb = grad->data() + static_cast<std::size_t>(k) * d;
      for (int c = 0; c < k; ++c) {
        double delta = (p[c] - (c == y ? 1.0 : 0.0)) * inv_n;
        gb[c] += delta;
        double* row = gw + static_cast<std::size_t>(c) * d;
        for (int j = 0; j < d; ++j) row[j] += delta * x[j];
      }
    } else {
      double* gw1 = grad->data();
      double* gb1 = gw1 + static_cast<std::size_t>(h) * d;
      double* gw2 = gb1 + h;
      double* gb2 = gw2 + static_cast<std::size_t>(k) * h;
      std::vector<double> dh(h, 0.0);
      for (int c = 0; c < k; ++c) {
        double delta = (p[c] - (c == y ? 1.0 : 0.0)) * inv_n;
        gb2[c] += delta;
        double* row = gw2 + static_cast<std::size_t>(c) * h;
        const double* w = &model.w2[static_cast<std::size_t>(c) * h];
        for (int u = 0; u < h; ++u) {
          row[u] += delta * act[u];
          dh[u] += delta * w[u];
        }
      }
      for (int u = 0; u < h; ++u) {
        if (hid[u] <= 0.0) continue;
        gb1[u] += dh[u];
        double* row = gw1 + static_cast<std::size_t>(u) * d;
        for (int j = 0; j < d; ++j) row[j] += dh[u] * x[j];
      }
    }
  }
  return loss;
}

std::vector<double> ce_input_grad(const ToyModel& model, std::span<const double> x,
                                  int y) {
  const int d = model.dim, k = model.classes, h = model.hidden;
  std::vector<double> g(d, 0.0);
  if (h == 0) {
    auto p = model.logits(x);
    softmax_inplace(p);
    for (int c = 0; c < k; ++c) {
      double delta = p[c] - (c == y ? 1.0 : 0.0);
      const double* w = &model.w1[static_cast<std::size_t>(c) * d];
      for (int j = 0; j < d; ++j) g[j] += delta * w[j];
    }
    return g;
  }
  std::vector<double> hid(h), act(h);
  for (int u = 0; u < h; ++u) {
    double acc = model.b1[u];
    const double* w = &model.w1[static_cast<std::size_t>(u) * d];
    for (int j = 0; j < d; ++j) acc += w[j] * x[j];
    hid[u] = acc;
    act[u] = acc > 0.0 ? acc : 0.0;
  }
  std::vector<double> p(k);
  for (int c = 0; c < k; ++c) {
    double acc = model.b2[c];
    const double* w = &model.w2[static_cast<std::size_t>(c) * h];
    for (int u = 0; u < h; ++u) acc += w[u] * act[u];
    p[c] = acc;
  }
  softmax_inplace(p);
  std::vector<double> dh(h, 0.0);
  for (int c = 0; c < k; ++c) {
    double delta = p[c] - (c == y ? 1.0 : 0.0);
    const double* w = &model.w2[static_cast<std::size_t>(c) * h];
    for (int u = 0; u < h; ++u) dh[u] += delta * w[u];
  }
  for (int u = 0; u < h; ++u) {
    if (hid[u] <= 0.0) continue;
    const double* w = &model.w1[static_cast<std::size_t>(u) * d];
    for (int j = 0; j < d; ++j) g[j] += dh[u] * w[j];
  }
  return g;
}

ToyModel train_noise_augmented(ToyModel model, const Dataset& data,
                               const GenGaussian& noise, int epochs,
                               double step_size, std::uint64_t seed) {
  if (epochs < 0 || !(step_size > 0.0))
    throw std::domain_error("train_noise_augmented: epochs >= 0, step_size > 0");
  std::vector<double> theta = model.params();
  std::vector<double> grad;
  std::vector<std::vector<double>> noised(data.x.size());
  for (int e = 0; e < epochs; ++e) {
    for (std::size_t i = 0; i < data.x.size(); ++i) {
      RngStream rng = make_stream(seed, 0x7a41ULL, static_cast<std::uint64_t>(e),
                                  static_cast<std::uint64_t>(i));
      noised[i] = gn_sample(noise, data.x[i], rng);
    }
    double loss = ce_loss_and_grad(model, noised, data.y, &grad);
    if (!std::isfinite(loss))
      throw std::runtime_error("train_noise_augmented: loss diverged");
    for (std::size_t j = 0; j < theta.size(); ++j) theta[j] -= step_size * grad[j];
    model.set_params(theta);
  }
  return model;
}

int smoothed_vote(const ToyModel& model, std::span<const double> x,
                  const GenGaussian& noise, int n_mc, std::uint64_t seed,
                  std::uint64_t round) {
  std::vector<long long> counts(model.classes, 0);
  std::vector<double> buf(x.size());
  for (int j = 0; j < n_mc; ++j) {
    RngStream rng = make_stream(seed, 0x607eULL + round, static_cast<std::uint64_t>(j));
    gn_sample_into(noise, x, rng, buf);
    ++counts[model.predict(buf)];
  }
  return static_cast<int>(std::max_element(counts.begin(), counts.end()) -
                          counts.begin());
}

AttackResult eot_pgd_l2(const ToyModel& model, std::span<const double> x, int y,
                        const GenGaussian& noise, int n_mc, int steps,
                        double step_size, std::uint64_t seed) {
  if (n_mc < 1 || steps < 0 || !(step_size > 0.0))
    throw std::domain_error("eot_pgd_l2: n_mc >= 1, steps >= 0, step_size > 0");
  const int d = model.dim;
  AttackResult result;
  result.delta.assign(d, 0.0);
  std::uint64_t round = 0;
  auto vote_at = [&](const std::vector<double>& delta) {
    std::vector<double> pt(x.begin(), x.end());
    for (int j = 0; j < d; ++j) pt[j] += delta[j];
    return smoothed_vote(model, pt, noise, n_mc, seed, round++);
  };
  if (vote_at(result.delta) != y) {
    result.success = true;  // already misclassified: the zero perturbation flips
    return result;
  }
  std::vector<double> delta(d, 0.0), best;
  double best_norm = 0.0;
  bool found = false;
  std::vector<double> noisy(d), gsum(d);
  for (int t = 0; t < steps; ++t) {
    std::fill(gsum.begin(), gsum.end(), 0.0);
    for (int j = 0; j < n_mc; ++j) {
      RngStream rng = make_stream(seed, 0xa77acULL + static_cast<std::uint64_t>(t),
                                  static_cast<std::uint64_t>(j));
      for (int i = 0; i < d; ++i) noisy[i] = x[i] + delta[i];
      gn_sample_into(noise, noisy, rng, noisy);
      auto g = ce_input_grad(model, noisy, y);
      for (int i = 0; i < d; ++i) gsum[i] += g[i];
    }
    double gn = 0.0;
    for (double v : gsum) gn += v * v;
    gn = std::sqrt(gn);
    if (gn == 0.0) break;
    for (int i = 0; i < d; ++i) delta[i] += step_size * gsum[i] / gn;
    if (vote_at(delta) != y) {
      // Minimal flipping scale on the ray through delta.
      double lo = 0.0, hi = 1.0;
      for (int it = 0; it < 30; ++it) {
        double mid = 0.5 * (lo + hi);
        std::vector<double> scaled(d);
        for (int i = 0; i < d; ++i) scaled[i] = mid * delta[i];
        if (vote_at(scaled) != y)
          hi = mid;
        else
          lo = mid;
      }
      for (int i = 0; i < d; ++i) delta[i] *= hi;
      double norm = 0.0;
      for (double v : delta) norm += v * v;
      norm = std::sqrt(norm);
      if (!found || norm < best_norm) {
        best = delta;
        best_norm = norm;
        found = true;
      }
    }
  }
  if (found) {
    result.delta = best;
    result.norm = best_norm;
    result.success = true;
  } else {
    result.delta = delta;
    result.success = false;
  }
  return result;
}

}  // namespace smoothcert
