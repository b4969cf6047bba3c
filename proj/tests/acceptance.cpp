// Acceptance suite: runs every criterion end to end and prints one
// PASS/FAIL line each. Exits non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "smoothcert/divergence_bounds.hpp"
#include "smoothcert/l2_certifier.hpp"
#include "smoothcert/lp_certifier.hpp"
#include "smoothcert/mc_pipeline.hpp"
#include "smoothcert/numerics.hpp"
#include "smoothcert/rng.hpp"
#include "smoothcert/smoothing.hpp"
#include "smoothcert/toy_models.hpp"

using namespace smoothcert;

namespace {

int g_failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail,
            double seconds) {
  if (!pass) ++g_failures;
  std::printf("[%s] %2d. %s -- %s (%.1fs)\n", pass ? "PASS" : "FAIL", id, name.c_str(),
              detail.c_str(), seconds);
  std::fflush(stdout);
}

void run(int id, const std::string& name,
         const std::function<std::pair<bool, std::string>()>& body,
         double time_limit_s = 0.0) {
  auto t0 = std::chrono::steady_clock::now();
  bool pass = false;
  std::string detail;
  try {
    auto [p, d] = body();
    pass = p;
    detail = d;
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (time_limit_s > 0.0 && secs >= time_limit_s) {
    pass = false;
    detail += " [over the time limit]";
  }
  report(id, name, pass, detail, secs);
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), pattern, a, b, c);
  return buf;
}

std::vector<DivergenceKind> all_kinds() {
  return {DivergenceKind::kl(),   DivergenceKind::renyi(2.5),
          DivergenceKind::hellinger2(), DivergenceKind::chi2(),
          DivergenceKind::bhattacharyya(), DivergenceKind::tv()};
}

std::vector<Multinomial> acceptance_grid() {
  std::vector<Multinomial> ps;
  for (double p1 = 0.55; p1 < 0.951; p1 += 0.05) {
    ps.emplace_back(std::vector<double>{p1, 1.0 - p1});
    ps.emplace_back(std::vector<double>{p1, 2.0 * (1.0 - p1) / 3.0, (1.0 - p1) / 3.0});
  }
  return ps;
}

struct EndToEndRun {
  ToyModel model;
  Dataset test;
  std::vector<Certificate> certs;
  double accuracy_at_zero = 0.0;
  double max_radius = 0.0;
  bool curve_monotone = true;
};

EndToEndRun end_to_end(int shape, double sigma, long long n1, std::uint64_t seed) {
  const int dim = 16, classes = 2, per_class = 200;
  Dataset train = make_blobs(dim, classes, per_class, 10.0, seed);
  Dataset test = make_blobs(dim, classes, per_class, 10.0, seed + 1);
  GenGaussian noise(sigma, shape);
  ToyModel model = ToyModel::linear(dim, classes, seed);
  model = train_noise_augmented(model, train, noise, 150, 0.5, seed);
  SmoothingConfig cfg;
  cfg.sigma = sigma;
  cfg.shape = shape;
  cfg.n0 = 100;
  cfg.n1 = n1;
  cfg.gamma0 = 0.001;
  cfg.gamma1 = 0.001;
  cfg.seed = seed;
  EndToEndRun out;
  out.certs = certify_dataset(model.classifier(), test.x, cfg, {shape});
  out.model = std::move(model);
  for (const auto& c : out.certs)
    if (!c.abstained) out.max_radius = std::max(out.max_radius, c.radii.at(shape));
  std::vector<double> grid;
  for (int i = 0; i <= 40; ++i) grid.push_back(out.max_radius * i / 40.0);
  auto curve = certified_accuracy_curve(out.certs, test.y, shape, grid);
  out.accuracy_at_zero = curve.front().second;
  for (std::size_t i = 1; i < curve.size(); ++i)
    if (curve[i].second > curve[i - 1].second + 1e-12) out.curve_monotone = false;
  out.test = std::move(test);
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main() {
  // 1. Brute-force oracle vs closed-form lower bounds.
  run(1, "divergence lower bounds match the brute-force oracle", [] {
    double worst = 0.0;
    for (const auto& kind : all_kinds()) {
      for (const auto& p : acceptance_grid()) {
        auto sorted = p.sorted_desc();
        double closed = lower_bound(kind, {sorted.probs[0], sorted.probs[1]});
        double brute = brute_force_lower_bound(kind, p, 1e-3);
        worst = std::max(worst, std::fabs(brute - closed));
      }
    }
    return std::make_pair(worst <= 2e-3, fmt("max |brute-closed| = %.2e (tol 2e-3)", worst));
  }, 120.0);

  // 2. Explicit minimizers attain the bounds.
  run(2, "minimizing distributions attain every lower bound", [] {
    double worst = 0.0;
    for (const auto& kind : all_kinds()) {
      for (const auto& p : acceptance_grid()) {
        auto sorted = p.sorted_desc();
        auto q = minimizing_distribution(kind, p);
        double bound = lower_bound(kind, {sorted.probs[0], sorted.probs[1]});
        worst = std::max(worst, std::fabs(divergence(kind, q, sorted) - bound));
      }
    }
    return std::make_pair(worst <= 1e-10, fmt("max gap = %.2e (tol 1e-10)", worst));
  });

  // 3. GN KL closed form vs quadrature.
  run(3, "GN KL closed form: exact for even s, conservative for odd s", [] {
    double worst_even = 0.0;
    bool odd_ok = true;
    for (int s : {2, 4}) {
      GenGaussian g(1.0, s);
      for (double d : {0.1, 0.5, 1.0, 2.0, 3.0}) {
        double closed = gn_kl_closed(g, ShiftPair({d}, s));
        double numeric = gn_kl_numeric(g, d, 20000);
        worst_even = std::max(worst_even, std::fabs(closed - numeric) / closed);
      }
    }
    for (int s : {1, 3, 5}) {
      GenGaussian g(1.0, s);
      for (double d : {0.1, 0.5, 1.0, 2.0, 3.0}) {
        if (gn_kl_closed(g, ShiftPair({d}, s)) < gn_kl_numeric(g, d, 20000) - 1e-12)
          odd_ok = false;
      }
    }
    GenGaussian laplace(1.0, 1.0);
    double lap_numeric = gn_kl_numeric(laplace, 1.0, 20000);
    double lap_closed = gn_kl_closed(laplace, ShiftPair({1.0}, 1));
    bool laplace_ok =
        std::fabs(lap_numeric - 1.0 / M_E) < 1e-8 && std::fabs(lap_closed - 1.0) < 1e-12;
    return std::make_pair(worst_even <= 1e-8 && odd_ok && laplace_ok,
                          fmt("even rel err = %.2e; s=1 delta=sigma: true %.5f vs closed 1.0",
                              worst_even, lap_numeric));
  });

  // 4. Divergence hierarchy grid.
  run(4, "divergence hierarchy holds on the grid and flips at 0.999", [] {
    std::vector<double> grid;
    for (double p1 = 0.51; p1 < 0.9951; p1 += 0.01) grid.push_back(p1);
    auto rows = hierarchy_report(grid, 1.0);
    bool ok = true;
    double worst_eq = 0.0;
    for (const auto& r : rows) {
      ok = ok && r.renyi_gt_chi2 && r.chi2_gt_kl && r.chi2_gt_hellinger &&
           r.hellinger_gt_kl && r.kl_gt_lecuyer;
      worst_eq = std::max(worst_eq, std::fabs(r.bhattacharyya - r.hellinger));
    }
    ok = ok && worst_eq <= 1e-9;
    auto edge = hierarchy_report({0.999}, 1.0);
    bool flips = !edge[0].hellinger_gt_kl;
    return std::make_pair(ok && flips,
                          fmt("max |B - H2| = %.2e; H2>KL at 0.999: ", worst_eq) +
                              (flips ? "fails as predicted" : "unexpectedly holds"));
  });

  // 5. Published frontier numbers.
  run(5, "trade-off frontier endpoints reproduce the published values", [] {
    TopTwoProbs tt{0.99, 0.01};
    double eq = radius_equal_eps(3, tt, 1.0);
    auto frontier = tradeoff_frontier(3, tt, 1.0, 3072, 200);
    double max_low = 0.0;
    for (const auto& pt : frontier) max_low = std::max(max_low, pt.eps_low);
    bool ok = std::fabs(eq - 0.86) <= 0.01 && std::fabs(max_low - 1.44) <= 0.01;
    return std::make_pair(ok, fmt("equal point = %.4f (0.86+-0.01); l1 endpoint = %.4f "
                                  "(1.44+-0.01)", eq, max_low));
  }, 1.0);

  // 6. l1/l2 closed forms vs the polynomial solver.
  run(6, "radius_lp_naive matches the small-p closed forms", [] {
    double worst = 0.0;
    for (double p1 = 0.55; p1 < 0.9951; p1 += 0.02) {
      TopTwoProbs tt{p1, 1.0 - p1};
      for (double sigma : {0.25, 0.5, 1.0, 2.0}) {
        for (int p : {1, 2}) {
          double closed = radius_lp_closed_small(p, tt, sigma);
          double solved = radius_lp_naive(p, tt, sigma, 3072);
          worst = std::max(worst, std::fabs(closed - solved) / std::max(closed, 1e-30));
        }
      }
    }
    return std::make_pair(worst <= 1e-9, fmt("max rel err = %.2e (tol 1e-9)", worst));
  });

  // 7. Curse of dimensionality.
  run(7, "equal-eps radii vanish as p grows; volume ratio behaves", [] {
    TopTwoProbs tt{0.99, 0.01};
    std::vector<int> ps;
    for (int p = 2; p <= 20; p += 2) ps.push_back(p);
    auto diag = vanishing_diagnostic(ps, tt, 1.0);
    bool monotone_volume = true;
    double prev = 0.0;
    for (long long p : {1LL, 2LL, 8LL, 64LL, 1024LL, 65536LL}) {
      double v = linf_volume_ratio(p, 64);
      if (v <= prev) monotone_volume = false;
      prev = v;
    }
    // At full ImageNet dimensionality the small-p ratios underflow a double,
    // so the monotonicity probe runs on the log ratio.
    double prev_log = -1e308;
    for (long long p : {1LL, 2LL, 8LL, 64LL, 1024LL, 65536LL}) {
      double lr = 150528.0 * ln_gamma(1.0 + 1.0 / p) - ln_gamma(1.0 + 150528.0 / p);
      if (lr <= prev_log) monotone_volume = false;
      prev_log = lr;
    }
    double ratio = linf_volume_ratio(9LL * 150528LL, 150528LL);
    bool ok = diag.strictly_decreasing_beyond_2 && monotone_volume && ratio >= 0.985 &&
              ratio <= 0.995;
    return std::make_pair(
        ok, fmt("radii %.4f..%.4f strictly decreasing; measured volume ratio %.6f",
                diag.radii.front().second, diag.radii.back().second, ratio));
  });

  // 8. Clopper-Pearson exactness and coverage.
  run(8, "Clopper-Pearson closed forms and coverage", [] {
    bool closed_ok =
        clopper_pearson_lower(0, 100, 0.001) == 0.0 &&
        std::fabs(clopper_pearson_lower(100, 100, 0.001) - std::pow(0.001, 0.01)) <
            1e-12;
    const double gamma = 0.05;
    const int runs = 10000;
    int violations = 0;
    for (int r = 0; r < runs; ++r) {
      RngStream rng = make_stream(0xacce97, r);
      long long hits = 0;
      for (int i = 0; i < 100; ++i)
        if (rng.uniform01() < 0.8) ++hits;
      if (clopper_pearson_lower(hits, 100, gamma) > 0.8) ++violations;
    }
    double rate = violations / static_cast<double>(runs);
    double limit = gamma + 3.0 * std::sqrt(gamma / runs);
    return std::make_pair(closed_ok && rate <= limit,
                          fmt("violation rate %.4f (limit %.4f)", rate, limit));
  }, 60.0);

  // 9. Sampler moments at one million draws.
  run(9, "GN sampler moments match the closed form within 1%", [] {
    double worst = 0.0;
    const long long n = 1000000;
    for (int s : {1, 2, 3}) {
      GenGaussian g(1.0, s);
      for (int k : {1, 2}) {
        double acc = 0.0;
        const double mu = 0.0;
        std::vector<double> buf(1);
        for (long long j = 0; j < n; ++j) {
          RngStream rng = make_stream(0x5a3b1e, s, k, j);
          gn_sample_into(g, {&mu, 1}, rng, buf);
          acc += std::pow(std::fabs(buf[0]), k);
        }
        double closed = gn_abs_moment(g, k);
        worst = std::max(worst, std::fabs(acc / n - closed) / closed);
      }
    }
    return std::make_pair(worst <= 0.01, fmt("max rel err = %.4f (tol 0.01)", worst));
  }, 60.0);

  // 10. End-to-end pipeline at desk scale.
  EndToEndRun sweep_baseline;  // s = 2, sigma = 0.25 run, reused by 11 and the sweep
  run(10, "end-to-end certification: curves, accuracy, sigma sweep", [&] {
    bool ok = true;
    std::string detail;
    double acc_s2 = 0.0;
    for (int shape : {1, 2, 3}) {
      auto r = end_to_end(shape, 0.25, 10000, 2024);
      ok = ok && r.curve_monotone && r.accuracy_at_zero >= 0.9;
      detail += fmt("s=%.0f acc0=%.3f; ", shape, r.accuracy_at_zero);
      if (shape == 2) {
        acc_s2 = r.accuracy_at_zero;
        sweep_baseline = std::move(r);
      }
    }
    double prev_acc = acc_s2;
    double prev_max = sweep_baseline.max_radius;
    for (double sigma : {0.5, 1.0}) {
      auto r = end_to_end(2, sigma, 10000, 2024);
      ok = ok && r.accuracy_at_zero <= prev_acc + 1e-12 && r.max_radius >= prev_max - 1e-12;
      detail += fmt("sigma=%.2f acc0=%.3f maxr=%.3f; ", sigma, r.accuracy_at_zero,
                    r.max_radius);
      prev_acc = r.accuracy_at_zero;
      prev_max = r.max_radius;
    }
    return std::make_pair(ok, detail);
  }, 300.0);

  // 11. Attack soundness on the certified model.
  run(11, "EOT-PGD finds no perturbation inside a certified radius", [&] {
    if (sweep_baseline.certs.empty())
      return std::make_pair(false, std::string("end-to-end run unavailable"));
    GenGaussian noise(0.25, 2.0);
    int attacked = 0, successes = 0, violations = 0;
    std::vector<double> ratios;
    for (std::size_t i = 0; i < sweep_baseline.certs.size() && attacked < 100; ++i) {
      const auto& c = sweep_baseline.certs[i];
      if (c.abstained || c.predicted != sweep_baseline.test.y[i]) continue;
      ++attacked;
      auto res = eot_pgd_l2(sweep_baseline.model, sweep_baseline.test.x[i],
                            sweep_baseline.test.y[i], noise, 1000, 30, 0.6, 99);
      if (!res.success) continue;
      ++successes;
      double radius = c.radii.at(2);
      if (res.norm < radius) ++violations;
      if (radius > 0.0) ratios.push_back(res.norm / radius);
    }
    std::sort(ratios.begin(), ratios.end());
    double min_ratio = ratios.empty() ? 0.0 : ratios.front();
    double median = ratios.empty() ? 0.0 : ratios[ratios.size() / 2];
    return std::make_pair(
        attacked == 100 && violations == 0,
        fmt("attacked %.0f, flipped %.0f", attacked, successes) +
            fmt(", violations %.0f; tightness ratio min %.2f", violations, min_ratio) +
            fmt(", median %.2f", median));
  });

  // 12. CSV determinism across thread counts, through the CLI.
  run(12, "certify CSV is byte-identical across thread counts", [] {
    const char* cli = std::getenv("SMOOTHCERT_CLI");
    std::string a_path = "acceptance_threads1.csv";
    std::string b_path = "acceptance_threads2.csv";
    if (cli) {
      std::string base = std::string(cli) +
                         " certify --d 8 --classes 2 --n 60 --sigma 0.25 --shape 2"
                         " --n0 100 --n1 2000 --norms 2 --seed 7 --epochs 60";
      std::string cmd1 =
          "SMOOTHCERT_THREADS=1 " + base + " --out " + a_path + " > /dev/null";
      std::string cmd2 =
          "SMOOTHCERT_THREADS=2 " + base + " --out " + b_path + " > /dev/null";
      if (std::system(cmd1.c_str()) != 0 || std::system(cmd2.c_str()) != 0)
        return std::make_pair(false, std::string("CLI invocation failed"));
    } else {
      // Fallback: drive the same pipeline in process.
      for (int threads : {1, 2}) {
        setenv("SMOOTHCERT_THREADS", threads == 1 ? "1" : "2", 1);
        Dataset test = make_blobs(8, 2, 30, 10.0, 8);
        ToyModel model = ToyModel::linear(8, 2, 7);
        SmoothingConfig cfg;
        cfg.sigma = 0.25;
        cfg.n1 = 2000;
        cfg.seed = 7;
        auto certs = certify_dataset(model.classifier(), test.x, cfg, {2});
        std::ofstream out(threads == 1 ? a_path : b_path, std::ios::binary);
        out << certificates_to_csv(certs, test.y, {2});
      }
      unsetenv("SMOOTHCERT_THREADS");
    }
    std::string a = read_file(a_path);
    std::string b = read_file(b_path);
    std::remove(a_path.c_str());
    std::remove(b_path.c_str());
    bool ok = !a.empty() && a == b;
    return std::make_pair(ok, fmt("%.0f bytes, ", static_cast<double>(a.size())) +
                                  (ok ? "identical" : "MISMATCH"));
  });

  if (g_failures == 0) {
    std::printf("acceptance: all criteria satisfied\n");
    return 0;
  }
  std::printf("acceptance: %d criterion(s) failed\n", g_failures);
  return 1;
}
