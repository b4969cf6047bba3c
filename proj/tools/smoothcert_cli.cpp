#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "smoothcert/divergence_bounds.hpp"
#include "smoothcert/l2_certifier.hpp"
#include "smoothcert/lp_certifier.hpp"
#include "smoothcert/mc_pipeline.hpp"
#include "smoothcert/numerics.hpp"
#include "smoothcert/smoothing.hpp"
#include "smoothcert/toy_models.hpp"
#include "smoothcert/verify.hpp"

namespace sc = smoothcert;

namespace {

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << content;
}

std::vector<int> parse_norms(const std::string& csv) {
  std::vector<int> norms;
  std::stringstream ss(csv);
  std::string cell;
  while (std::getline(ss, cell, ',')) norms.push_back(std::stoi(cell));
  if (norms.empty()) throw std::runtime_error("empty --norms list");
  return norms;
}

struct PipelineFlags {
  int dim = 16;
  int classes = 2;
  int n = 400;        // test inputs in total
  double sigma = 0.25;
  int shape = 2;
  long long n0 = 100;
  long long n1 = 10000;
  double gamma0 = 0.001;
  double gamma1 = 0.001;
  std::uint64_t seed = 1;
  double separation = 10.0;
  int epochs = 150;
  double step = 0.5;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--d", dim, "input dimensionality");
    cmd->add_option("--classes", classes, "number of classes");
    cmd->add_option("--n", n, "number of test inputs");
    cmd->add_option("--sigma", sigma, "GN noise scale");
    cmd->add_option("--shape", shape, "GN noise shape s");
    cmd->add_option("--n0", n0, "class-identification samples");
    cmd->add_option("--n1", n1, "estimation samples");
    cmd->add_option("--gamma0", gamma0, "step-1 error budget");
    cmd->add_option("--gamma1", gamma1, "step-2 error budget");
    cmd->add_option("--seed", seed, "RNG seed");
    cmd->add_option("--separation", separation, "blob center separation");
    cmd->add_option("--epochs", epochs, "training epochs");
    cmd->add_option("--step", step, "training step size");
  }

  sc::SmoothingConfig config() const {
    sc::SmoothingConfig cfg;
    cfg.sigma = sigma;
    cfg.shape = shape;
    cfg.n0 = n0;
    cfg.n1 = n1;
    cfg.gamma0 = gamma0;
    cfg.gamma1 = gamma1;
    cfg.seed = seed;
    return cfg;
  }
};

// Train/test blob split plus a noise-trained linear model.
struct PipelineRun {
  sc::Dataset test;
  sc::ToyModel model;
};

PipelineRun prepare_pipeline(const PipelineFlags& f) {
  int per_class = std::max(1, f.n / f.classes);
  sc::Dataset train = sc::make_blobs(f.dim, f.classes, per_class, f.separation, f.seed);
  sc::Dataset test =
      sc::make_blobs(f.dim, f.classes, per_class, f.separation, f.seed + 1);
  sc::GenGaussian noise(f.sigma, f.shape);
  sc::ToyModel model = sc::ToyModel::linear(f.dim, f.classes, f.seed);
  model = sc::train_noise_augmented(model, train, noise, f.epochs, f.step, f.seed);
  return {std::move(test), std::move(model)};
}

int cmd_radius(const std::string& divergence, double p1, double p2, double sigma,
               double alpha) {
  sc::TopTwoProbs tt{p1, p2};
  double r = 0.0;
  if (divergence == "kl")
    r = sc::radius_closed(sc::DivergenceKind::kl(), tt, sigma);
  else if (divergence == "hellinger")
    r = sc::radius_closed(sc::DivergenceKind::hellinger2(), tt, sigma);
  else if (divergence == "chi2")
    r = sc::radius_closed(sc::DivergenceKind::chi2(), tt, sigma);
  else if (divergence == "bhattacharyya")
    r = sc::radius_closed(sc::DivergenceKind::bhattacharyya(), tt, sigma);
  else if (divergence == "tv")
    r = sc::radius_closed(sc::DivergenceKind::tv(), tt, sigma);
  else if (divergence == "renyi")
    r = sc::radius_closed(sc::DivergenceKind::renyi(alpha), tt, sigma);
  else if (divergence == "renyi-sup")
    r = sc::radius_renyi_sup(tt, sigma);
  else if (divergence == "cohen")
    r = sc::radius_cohen(tt, sigma);
  else if (divergence == "lecuyer-l2")
    r = sc::radius_lecuyer_l2(tt, sigma);
  else if (divergence == "lecuyer-l1")
    r = sc::radius_baselines_l1(tt, sigma).lecuyer;
  else if (divergence == "li-l1")
    r = sc::radius_baselines_l1(tt, sigma).li;
  else
    throw std::domain_error("unknown divergence: " + divergence);
  std::cout << num(r) << "\n";
  return 0;
}

int cmd_curve(double sigma, double p1_min, double p1_max, int steps,
              const std::string& out_path) {
  if (steps < 2) throw std::domain_error("curve: --steps >= 2");
  if (!(p1_min > 0.5 && p1_max < 1.0 && p1_min <= p1_max))
    throw std::domain_error("curve: range must lie inside (0.5, 1)");
  std::vector<double> grid;
  for (int i = 0; i < steps; ++i)
    grid.push_back(p1_min + (p1_max - p1_min) * i / (steps - 1));
  auto rows = sc::hierarchy_report(grid, sigma);
  std::string csv = "p1,kl,hellinger,chi2,bhattacharyya,tv,renyi_sup,lecuyer,cohen\n";
  for (const auto& r : rows) {
    csv += num(r.p1) + "," + num(r.kl) + "," + num(r.hellinger) + "," + num(r.chi2) +
           "," + num(r.bhattacharyya) + "," + num(r.tv) + "," + num(r.renyi_sup) + "," +
           num(r.lecuyer) + "," + num(r.cohen) + "\n";
  }
  write_file(out_path, csv);
  return 0;
}

int cmd_lp_radius(int p, double p1, double p2, double sigma, long long dim,
                  bool naive) {
  sc::TopTwoProbs tt{p1, p2};
  double r = naive ? sc::radius_lp_naive(p, tt, sigma, dim)
                   : sc::radius_equal_eps(p, tt, sigma);
  std::cout << num(r) << "\n";
  return 0;
}

int cmd_tradeoff(int p, double sigma, long long dim, double p1, int points,
                 const std::string& out_path) {
  sc::TopTwoProbs tt{p1, 1.0 - p1};
  auto frontier = sc::tradeoff_frontier(p, tt, sigma, dim, points);
  std::string csv = "eps_high,eps_low\n";
  for (const auto& pt : frontier) csv += num(pt.eps_high) + "," + num(pt.eps_low) + "\n";
  write_file(out_path, csv);
  return 0;
}

int cmd_certify(const PipelineFlags& flags, const std::string& norms_csv,
                const std::string& out_path, const std::string& json_path) {
  auto norms = parse_norms(norms_csv);
  auto run = prepare_pipeline(flags);
  auto cfg = flags.config();
  auto certs = sc::certify_dataset(run.model.classifier(), run.test.x, cfg, norms);
  write_file(out_path, sc::certificates_to_csv(certs, run.test.y, norms));
  if (!json_path.empty())
    write_file(json_path, sc::certificates_to_json(certs, run.test.y));
  // Summary block: certified accuracy as a function of the radius.
  double max_r = 0.0;
  for (const auto& c : certs)
    for (const auto& [p, r] : c.radii) max_r = std::max(max_r, r);
  std::vector<double> grid;
  const int kGridPoints = 21;
  for (int i = 0; i < kGridPoints; ++i) grid.push_back(max_r * i / (kGridPoints - 1));
  auto curve = sc::certified_accuracy_curve(certs, run.test.y, norms.front(), grid);
  std::cout << "radius,certified_accuracy\n";
  for (const auto& [r, acc] : curve) std::cout << num(r) << "," << num(acc) << "\n";
  return 0;
}

int cmd_attack(const PipelineFlags& flags, int n_mc, int steps, double step_size,
               int max_inputs, const std::string& out_path) {
  auto run = prepare_pipeline(flags);
  auto cfg = flags.config();
  auto certs = sc::certify_dataset(run.model.classifier(), run.test.x, cfg, {cfg.shape});
  sc::GenGaussian noise(flags.sigma, flags.shape);
  std::string csv = "input_id,certified_radius,attack_norm,ratio,success\n";
  int attacked = 0;
  long long violations = 0;
  for (std::size_t i = 0; i < certs.size() && attacked < max_inputs; ++i) {
    const auto& c = certs[i];
    if (c.abstained || c.predicted != run.test.y[i]) continue;
    ++attacked;
    double radius = c.radii.at(cfg.shape);
    auto res = sc::eot_pgd_l2(run.model, run.test.x[i], run.test.y[i], noise, n_mc,
                              steps, step_size, cfg.seed + 77);
    double ratio = res.success && radius > 0.0 ? res.norm / radius : 0.0;
    if (res.success && res.norm < radius) ++violations;
    csv += num(static_cast<double>(c.input_id)) + "," + num(radius) + "," +
           (res.success ? num(res.norm) : std::string("")) + "," +
           (res.success ? num(ratio) : std::string("")) + "," +
           (res.success ? "1" : "0") + "\n";
  }
  write_file(out_path, csv);
  std::cout << "attacked," << attacked << "\n";
  std::cout << "violations," << violations << "\n";
  return violations == 0 ? 0 : 1;
}

int cmd_sample_stats(double sigma, int shape, long long samples, std::uint64_t seed) {
  sc::GenGaussian g(sigma, shape);
  std::cout << "shape,k,empirical,closed,rel_err\n";
  for (int k = 1; k <= 2; ++k) {
    double acc = 0.0;
    std::vector<double> buf(1);
    const double mu = 0.0;
    for (long long j = 0; j < samples; ++j) {
      sc::RngStream rng = sc::make_stream(seed, 0x57a7ULL, static_cast<std::uint64_t>(j));
      sc::gn_sample_into(g, {&mu, 1}, rng, buf);
      acc += std::pow(std::fabs(buf[0]), k);
    }
    double emp = acc / static_cast<double>(samples);
    double closed = sc::gn_abs_moment(g, k);
    std::cout << shape << "," << k << "," << num(emp) << "," << num(closed) << ","
              << num(std::fabs(emp - closed) / closed) << "\n";
  }
  return 0;
}

int cmd_verify(double resolution) {
  auto results = sc::run_verification(resolution);
  return sc::print_verification(std::cout, results) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"divergence-based randomized smoothing certification toolkit"};
  app.require_subcommand(1);

  // radius
  std::string divergence = "kl";
  double p1 = 0.9, p2 = 0.1, sigma = 1.0, alpha = 2.0;
  auto* radius = app.add_subcommand("radius", "certified l2 radius for one divergence");
  radius->add_option("--divergence", divergence,
                     "kl|hellinger|chi2|bhattacharyya|tv|renyi|renyi-sup|cohen|"
                     "lecuyer-l2|lecuyer-l1|li-l1");
  radius->add_option("--p1", p1, "top class probability")->required();
  radius->add_option("--p2", p2, "runner-up probability")->required();
  radius->add_option("--sigma", sigma, "noise scale");
  radius->add_option("--alpha", alpha, "Renyi order (for --divergence renyi)");

  // curve
  double p1_min = 0.51, p1_max = 0.99;
  int steps = 49;
  std::string out_path = "out.csv";
  auto* curve = app.add_subcommand("curve", "radius-vs-p1 table for all divergences");
  curve->add_option("--sigma", sigma, "noise scale");
  curve->add_option("--p1-min", p1_min, "grid start (exclusive of 0.5)");
  curve->add_option("--p1-max", p1_max, "grid end (< 1)");
  curve->add_option("--steps", steps, "number of grid rows");
  curve->add_option("--out", out_path, "output CSV path")->required();

  // lp-radius
  int p = 3;
  long long dim = 1;
  bool naive = false;
  auto* lp = app.add_subcommand("lp-radius", "lp radius from the GN KL budget");
  lp->add_option("--p", p, "norm order / noise shape")->required();
  lp->add_option("--p1", p1, "top class probability")->required();
  lp->add_option("--p2", p2, "runner-up probability")->required();
  lp->add_option("--sigma", sigma, "GN scale");
  lp->add_option("--dim", dim, "data dimensionality (with --naive)");
  lp->add_flag("--naive", naive, "use the dimension-inflated single-norm bound");

  // tradeoff
  int points = 100;
  auto* tradeoff = app.add_subcommand("tradeoff", "two-norm robustness frontier");
  tradeoff->add_option("--p", p, "high norm order (3 or 4)")->required();
  tradeoff->add_option("--sigma", sigma, "GN scale");
  tradeoff->add_option("--d", dim, "data dimensionality")->required();
  tradeoff->add_option("--p1", p1, "top class probability")->required();
  tradeoff->add_option("--points", points, "frontier sweep points");
  tradeoff->add_option("--out", out_path, "output CSV path")->required();

  // certify
  PipelineFlags pipe;
  std::string dataset = "blobs", norms_csv = "2", json_path;
  auto* certify = app.add_subcommand("certify", "end-to-end Monte Carlo certification");
  certify->add_option("--dataset", dataset, "dataset family (blobs)");
  certify->add_option("--norms", norms_csv, "comma-separated norm orders");
  certify->add_option("--out", out_path, "certificate CSV path")->required();
  certify->add_option("--json-out", json_path, "optional JSON certificate path");
  pipe.add_to(certify);

  // attack
  int n_mc = 1000, attack_steps = 40, max_inputs = 100;
  double attack_step_size = 0.25;
  auto* attack = app.add_subcommand("attack", "EOT-PGD probe of certificate tightness");
  attack->add_option("--n-mc", n_mc, "Monte Carlo samples per gradient");
  attack->add_option("--steps", attack_steps, "PGD steps");
  attack->add_option("--step-size", attack_step_size, "PGD step size");
  attack->add_option("--max-inputs", max_inputs, "number of certified inputs to attack");
  attack->add_option("--out", out_path, "attack CSV path")->required();
  pipe.add_to(attack);

  // sample-stats
  long long samples = 1000000;
  std::uint64_t stats_seed = 7;
  int stats_shape = 2;
  double stats_sigma = 1.0;
  auto* stats = app.add_subcommand("sample-stats", "GN sampler moments vs closed form");
  stats->add_option("--sigma", stats_sigma, "GN scale");
  stats->add_option("--shape", stats_shape, "GN shape");
  stats->add_option("--samples", samples, "number of draws");
  stats->add_option("--seed", stats_seed, "RNG seed");

  // verify
  double resolution = 1e-3;
  auto* verify = app.add_subcommand("verify", "run every oracle suite");
  verify->add_option("--resolution", resolution, "brute-force grid resolution");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    if (radius->parsed()) return cmd_radius(divergence, p1, p2, sigma, alpha);
    if (curve->parsed()) return cmd_curve(sigma, p1_min, p1_max, steps, out_path);
    if (lp->parsed()) return cmd_lp_radius(p, p1, p2, sigma, dim, naive);
    if (tradeoff->parsed()) return cmd_tradeoff(p, sigma, dim, p1, points, out_path);
    if (certify->parsed()) {
      if (dataset != "blobs") throw std::domain_error("unknown dataset: " + dataset);
      return cmd_certify(pipe, norms_csv, out_path, json_path);
    }
    if (attack->parsed())
      return cmd_attack(pipe, n_mc, attack_steps, attack_step_size, max_inputs, out_path);
    if (stats->parsed())
      return cmd_sample_stats(stats_sigma, stats_shape, samples, stats_seed);
    if (verify->parsed()) return cmd_verify(resolution);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
