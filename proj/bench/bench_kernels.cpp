// Times the OpenMP kernels against their serial reference implementations
// and prints one CSV row per measurement.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <vector>

#include "smoothcert/divergence_bounds.hpp"
#include "smoothcert/mc_pipeline.hpp"
#include "smoothcert/toy_models.hpp"

using namespace smoothcert;

namespace {

template <typename F>
double time_best_of(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    auto t0 = std::chrono::steady_clock::now();
    f();
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (s < best) best = s;
  }
  return best;
}

}  // namespace

int main() {
  std::printf("kernel,threads,work,seconds,speedup\n");
  const int threads = max_threads();

  {
    // Vote counting over Monte Carlo noise draws.
    Dataset data = make_blobs(32, 2, 10, 10.0, 1);
    ToyModel model = ToyModel::linear(32, 2, 1);
    GenGaussian noise(0.25, 2.0);
    BaseClassifier f = model.classifier();
    const long long n = 200000;
    volatile long long sink = 0;
    double serial = time_best_of(3, [&] {
      auto c = count_votes_serial(f, data.x[0], noise, n, 5, 0, 1);
      sink += c[0];
    });
    double parallel = time_best_of(3, [&] {
      auto c = count_votes(f, data.x[0], noise, n, 5, 0, 1);
      sink += c[0];
    });
    std::printf("count_votes,1,%lld,%.4f,1.00\n", n, serial);
    std::printf("count_votes,%d,%lld,%.4f,%.2f\n", threads, n, parallel,
                serial / parallel);
  }

  {
    // Simplex grid scan of the brute-force divergence oracle.
    Multinomial p({0.7, 0.2, 0.1});
    auto kind = DivergenceKind::kl();
    volatile double sink = 0.0;
    double serial = time_best_of(3, [&] {
      sink += brute_force_lower_bound_serial(kind, p, 1e-3);
    });
    double parallel = time_best_of(3, [&] {
      sink += brute_force_lower_bound(kind, p, 1e-3);
    });
    std::printf("brute_force_scan,1,%d,%.4f,1.00\n", 1000 * 1001 / 2, serial);
    std::printf("brute_force_scan,%d,%d,%.4f,%.2f\n", threads, 1000 * 1001 / 2, parallel,
                serial / parallel);
  }

  return 0;
}
