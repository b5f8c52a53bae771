// ttcov: generate data, run estimators, benchmarks and diagnostics.

#include "ttcov/bench.hpp"
#include "ttcov/diagnostics.hpp"
#include "ttcov/errors.hpp"
#include "ttcov/estimators.hpp"
#include "ttcov/matrix_io.hpp"
#include "ttcov/synthgen.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace ttcov;

enum Exit { kOk = 0, kFailure = 1, kUsage = 2, kData = 3, kIo = 4 };

struct ShapeArgs {
  Index p = 0;
  Index q = 0;
  Index r = 0;

  void add(CLI::App* app) {
    app->add_option("--p", p, "first factor size")->required()->check(CLI::PositiveNumber);
    app->add_option("--q", q, "second factor size")->required()->check(CLI::PositiveNumber);
    app->add_option("--r", r, "third factor size")->required()->check(CLI::PositiveNumber);
  }
  [[nodiscard]] FactorShape shape() const { return {p, q, r}; }
};

struct GenerateArgs {
  std::string config;
  ShapeArgs shape{10, 10, 10};
  Index j = 7;
  Index k = 9;
  Index n = 2000;
  std::string decay = "gaussian";
  double decay_rate = 0.5;
  std::uint64_t seed = 42;
  std::string truth_out = "truth.json";
  std::string samples_out;
  std::string sigma_out;
};

struct EstimateArgs {
  std::string samples;
  ShapeArgs shape;
  std::string method = "hardtth";
  Index j = 1;
  Index k = 1;
  int iterations = 10;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  std::string svd = "exact";
  std::string init = "sequential";
  std::uint64_t seed = 0;
  bool psd = false;
  bool center = false;
  std::string truth;
  std::string out = "estimate.txt";
};

struct BenchArgs {
  std::string config;
  std::string out;
  std::string json;
  int threads = 0;
  bool quiet = false;
};

struct DiagnoseArgs {
  std::string truth;
  std::string sigma;
  ShapeArgs shape;
  Index n = 0;
  Index j = 0;
  Index k = 0;
  double omega = 1.0;
  double delta = 0.05;
  int iterations = 10;
  std::string spectrum;
};

struct RanksArgs {
  std::string samples;
  ShapeArgs shape;
  double omega = 1.0;
  double delta = 0.05;
  double c_prime = 1.0;
  bool center = false;
};

std::string fmt(double v) { return format_double(v); }

int cmd_generate(const GenerateArgs& a) {
  FactorShape shape = a.shape.shape();
  Index j = a.j;
  Index k = a.k;
  Index n = a.n;
  SpectrumDecay decay{parse_decay(a.decay), a.decay_rate};
  std::uint64_t seed = a.seed;
  if (!a.config.empty()) {
    const BenchConfig c = load_config(a.config);
    shape = c.shape;
    j = c.rank_j;
    k = c.rank_k;
    n = c.sample_sizes.front();
    decay = c.decay;
    seed = c.seed;
  }
  const GroundTruth gt = gen_ground_truth(shape, j, k, decay, derive_seed(seed, 1, 0));
  write_ground_truth(a.truth_out, gt);
  std::cout << "wrote ground truth to " << a.truth_out << "\n";
  if (!a.sigma_out.empty()) {
    write_matrix(a.sigma_out, true_covariance(gt));
    std::cout << "wrote covariance to " << a.sigma_out << "\n";
  }
  if (!a.samples_out.empty()) {
    write_matrix(a.samples_out, sample_observations(gt, n, derive_seed(seed, 2, 0)));
    std::cout << "wrote " << n << " samples to " << a.samples_out << "\n";
  }
  return kOk;
}

int cmd_estimate(const EstimateArgs& a) {
  const FactorShape shape = a.shape.shape();
  EstimatorSpec spec;
  spec.method = parse_method(a.method);
  spec.rank_j = a.j;
  spec.rank_k = a.k;
  spec.iterations = a.iterations;
  spec.lambda1 = a.lambda1;
  spec.lambda2 = a.lambda2;
  spec.svd.method = a.svd == "randomized" ? SvdMethod::randomized : SvdMethod::exact;
  spec.svd.seed = a.seed;
  spec.init = parse_init(a.init);
  spec.psd_projection = a.psd;
  spec.center = a.center;
  spec.validate();

  const Matrix x = read_matrix(a.samples);
  if (x.cols() != shape.side()) {
    throw std::invalid_argument("samples have " + std::to_string(x.cols()) +
                                " columns but p*q*r = " + std::to_string(shape.side()));
  }
  const auto t0 = std::chrono::steady_clock::now();
  const Matrix est = estimate_covariance(x, shape, spec);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_matrix(a.out, est);
  std::cout << "method " << method_name(spec.method) << " n " << x.rows() << " time_seconds "
            << fmt(secs) << "\n";
  if (!a.truth.empty()) {
    const Matrix sigma = true_covariance(read_ground_truth(a.truth));
    if (sigma.rows() != est.rows()) throw std::invalid_argument("ground truth shape differs from samples");
    std::cout << "rel_error " << fmt((est - sigma).norm() / sigma.norm()) << "\n";
  }
  std::cout << "wrote estimate to " << a.out << "\n";
  return kOk;
}

int cmd_bench(const BenchArgs& a) {
  BenchConfig c = load_config(a.config);
  if (!a.out.empty()) c.output = a.out;
  if (!a.json.empty()) c.json_output = a.json;
  if (a.threads > 0) c.threads = a.threads;
  c.validate();
  ProgressFn progress;
  if (!a.quiet) progress = [](const std::string& msg) { std::cerr << msg << "\n"; };
  const BenchResult result = run_benchmark(c, progress);
  write_results(c, result);
  for (const Aggregate& g : result.aggregates) {
    std::cout << g.method;
    if (g.n) std::cout << " n=" << *g.n;
    if (g.sigma) std::cout << " sigma=" << *g.sigma;
    std::printf(" mean=%.4f std=%.4f count=%d mean_time=%.3fs\n", g.mean, g.std, g.count, g.mean_time);
  }
  std::cout << "wrote " << c.output.string() << " and " << c.json_path().string() << "\n";
  return kOk;
}

void write_spectrum(const std::string& path, const Matrix& sigma, const FactorShape& shape) {
  const Tensor3 y = rearrange(sigma, shape);
  std::string csv = "matricization,index,value\n";
  for (int mode : {1, 3}) {
    const Vector s = singular_values(unfold(y, mode));
    for (Index i = 0; i < s.size(); ++i) {
      csv += "m" + std::to_string(mode) + "," + std::to_string(i + 1) + "," + fmt(s(i)) + "\n";
    }
  }
  atomic_write(path, csv);
}

int cmd_diagnose(const DiagnoseArgs& a) {
  if (a.truth.empty() == a.sigma.empty()) {
    throw std::invalid_argument("diagnose needs exactly one of --truth or --sigma");
  }
  Matrix sigma;
  FactorShape shape;
  if (!a.truth.empty()) {
    const GroundTruth gt = read_ground_truth(a.truth);
    sigma = true_covariance(gt);
    shape = gt.shape;
  } else {
    if (a.shape.p < 1 || a.shape.q < 1 || a.shape.r < 1) {
      throw std::invalid_argument("--sigma requires --p, --q and --r");
    }
    sigma = read_matrix(a.sigma);
    shape = a.shape.shape();
  }
  const EffectiveDims ed = effective_dims(sigma, shape);
  std::cout << "effective_dims r1=" << fmt(ed.r1) << " r2=" << fmt(ed.r2) << " r3=" << fmt(ed.r3) << "\n";
  if (a.n > 0 && a.j > 0 && a.k > 0) {
    const ConditionReport rep =
        check_conditions(sigma, shape, a.n, a.j, a.k, a.omega, a.delta, {}, a.iterations);
    auto line = [](const char* name, const Inequality& q) {
      std::cout << name << " lhs=" << fmt(q.lhs) << " rhs=" << fmt(q.rhs) << " margin=" << fmt(q.margin())
                << (q.holds() ? " holds" : " fails") << "\n";
    };
    line("first_condition", rep.first);
    line("second_condition", rep.second);
    std::cout << "variance_term " << fmt(rep.variance) << "\n"
              << "sample_size_gate " << fmt(rep.r_delta) << (rep.sample_size_ok ? " met" : " not met") << "\n"
              << "remainders diamond2=" << fmt(rep.diamond2) << " r_t=" << fmt(rep.r_t) << "\n"
              << "bound " << fmt(rep.bound) << "\n";
    for (const auto& note : rep.notes) std::cout << "note: " << note << "\n";
  }
  if (!a.spectrum.empty()) {
    write_spectrum(a.spectrum, sigma, shape);
    std::cout << "wrote spectrum to " << a.spectrum << "\n";
  }
  return kOk;
}

int cmd_ranks(const RanksArgs& a) {
  const FactorShape shape = a.shape.shape();
  Matrix x = read_matrix(a.samples);
  if (x.cols() != shape.side()) throw std::invalid_argument("samples do not match p*q*r");
  if (a.center) x = x.rowwise() - x.colwise().mean();
  const SelectedRanks sel = select_ranks(sample_covariance(x), shape, x.rows(), a.omega, a.delta, a.c_prime);
  std::cout << "J=" << sel.rank_j << " K=" << sel.rank_k << " threshold_j=" << fmt(sel.threshold_j)
            << " threshold_k=" << fmt(sel.threshold_k) << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tensor-train structured covariance estimation toolkit"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "write a ground truth and samples");
  g->add_option("--config", gen.config, "benchmark config supplying shape, ranks, n, decay and seed");
  g->add_option("--p", gen.shape.p)->check(CLI::PositiveNumber);
  g->add_option("--q", gen.shape.q)->check(CLI::PositiveNumber);
  g->add_option("--r", gen.shape.r)->check(CLI::PositiveNumber);
  g->add_option("--J", gen.j)->check(CLI::PositiveNumber);
  g->add_option("--K", gen.k)->check(CLI::PositiveNumber);
  g->add_option("--n", gen.n, "number of samples")->check(CLI::PositiveNumber);
  g->add_option("--decay", gen.decay, "gaussian | inverse_quadratic | exponential | linear");
  g->add_option("--decay-rate", gen.decay_rate);
  g->add_option("--seed", gen.seed);
  g->add_option("--truth-out", gen.truth_out, "ground-truth JSON path");
  g->add_option("--samples-out", gen.samples_out, "sample matrix path");
  g->add_option("--sigma-out", gen.sigma_out, "true covariance matrix path");

  EstimateArgs est;
  auto* e = app.add_subcommand("estimate", "estimate a covariance from a sample file");
  e->add_option("--samples", est.samples, "n x pqr sample matrix")->required();
  est.shape.add(e);
  e->add_option("--method", est.method, "sample | hardtth | tt_hosvd | tucker | tucker_hooi | prls");
  e->add_option("--J", est.j);
  e->add_option("--K", est.k);
  e->add_option("--iterations", est.iterations);
  e->add_option("--lambda1", est.lambda1);
  e->add_option("--lambda2", est.lambda2);
  e->add_option("--svd", est.svd)->check(CLI::IsMember({"exact", "randomized"}));
  e->add_option("--init", est.init)->check(CLI::IsMember({"sequential", "independent"}));
  e->add_option("--seed", est.seed);
  e->add_flag("--psd", est.psd, "clip negative eigenvalues");
  e->add_flag("--center", est.center, "subtract the sample mean first");
  e->add_option("--truth", est.truth, "ground-truth JSON for the relative error");
  e->add_option("--out", est.out, "output matrix path");

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "run a benchmark config");
  b->add_option("--config", bench.config)->required();
  b->add_option("--out", bench.out, "per-trial CSV (overrides the config)");
  b->add_option("--json", bench.json, "aggregate JSON (overrides the config)");
  b->add_option("--threads", bench.threads, "worker threads (overrides TTCOV_THREADS)")->check(CLI::NonNegativeNumber);
  b->add_flag("--quiet", bench.quiet, "no per-trial progress");

  DiagnoseArgs diag;
  auto* d = app.add_subcommand("diagnose", "effective dimensions and condition report");
  d->add_option("--truth", diag.truth, "ground-truth JSON");
  d->add_option("--sigma", diag.sigma, "covariance matrix file");
  d->add_option("--p", diag.shape.p);
  d->add_option("--q", diag.shape.q);
  d->add_option("--r", diag.shape.r);
  d->add_option("--n", diag.n);
  d->add_option("--J", diag.j);
  d->add_option("--K", diag.k);
  d->add_option("--omega", diag.omega);
  d->add_option("--delta", diag.delta);
  d->add_option("--iterations", diag.iterations);
  d->add_option("--spectrum", diag.spectrum, "CSV of m1/m3 singular values");

  RanksArgs ranks;
  auto* rk = app.add_subcommand("ranks", "select TT ranks from a sample file");
  rk->add_option("--samples", ranks.samples)->required();
  ranks.shape.add(rk);
  rk->add_option("--omega", ranks.omega);
  rk->add_option("--delta", ranks.delta);
  rk->add_option("--c-prime", ranks.c_prime);
  rk->add_flag("--center", ranks.center);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    return app.exit(err);
  }

  try {
    if (g->parsed()) return cmd_generate(gen);
    if (e->parsed()) return cmd_estimate(est);
    if (b->parsed()) return cmd_bench(bench);
    if (d->parsed()) return cmd_diagnose(diag);
    if (rk->parsed()) return cmd_ranks(ranks);
  } catch (const ConfigError& err) {
    std::cerr << "ttcov: config error: " << err.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& err) {
    std::cerr << "ttcov: invalid argument: " << err.what() << "\n";
    return kUsage;
  } catch (const DataError& err) {
    std::cerr << "ttcov: data error: " << err.what() << "\n";
    return kData;
  } catch (const IoError& err) {
    std::cerr << "ttcov: I/O error: " << err.what() << "\n";
    return kIo;
  } catch (const std::exception& err) {
    std::cerr << "ttcov: " << err.what() << "\n";
    return kFailure;
  }
  return kFailure;
}
