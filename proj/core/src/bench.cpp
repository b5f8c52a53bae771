#include "ttcov/bench.hpp"

#include "ttcov/diagnostics.hpp"
#include "ttcov/errors.hpp"
#include "ttcov/matrix_io.hpp"
#include "ttcov/random.hpp"

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace ttcov {
namespace {

using Clock = std::chrono::steady_clock;

enum Stream : std::uint64_t {
  kGroundTruthStream = 1,
  kSampleStream = 2,
  kSvdStream = 3,
  kInstanceStream = 4,
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Estimate {
  Tensor3 tensor;
  std::optional<HardTThResult> tt;
  double seconds = 0.0;
};

// Denoises y with the configured method; PRLS penalties are tuned against
// `target` beforehand and only the final run is timed.
Estimate denoise(const Tensor3& y, const Tensor3& target, Method method, const BenchConfig& c,
                 const SvdOptions& svd) {
  Estimate out;
  if (method == Method::prls) {
    const PrlsTuning tuned = tune_prls(y, target, c.prls_grid);
    const auto t0 = Clock::now();
    out.tensor = prls(y, tuned.lambda1, tuned.lambda2);
    out.seconds = seconds_since(t0);
    return out;
  }
  const auto t0 = Clock::now();
  switch (method) {
    case Method::sample:
      out.tensor = y;
      break;
    case Method::hardtth:
    case Method::tt_hosvd: {
      const int iters = method == Method::tt_hosvd ? 0 : c.iterations;
      HardTThResult r = hardtth(y, c.rank_j, c.rank_k, iters, svd, c.init);
      out.tensor = r.factors.reconstruct();
      out.tt = std::move(r);
      break;
    }
    case Method::tucker:
    case Method::tucker_hooi: {
      const std::array<Index, 3> ranks{c.rank_j, c.rank_j * c.rank_k, c.rank_k};
      const int iters = method == Method::tucker ? 0 : c.iterations;
      out.tensor = tucker_hooi(y, ranks, iters, svd).reconstruct();
      break;
    }
    case Method::prls:
      break;
  }
  out.seconds = seconds_since(t0);
  return out;
}

void fill_sin_theta(TrialRecord& rec, const Estimate& est, const Matrix& u_star, const Matrix& v_star) {
  if (!est.tt) return;
  rec.sin_theta_u0 = sin_theta(u_star, est.tt->u_init);
  rec.sin_theta_ut = sin_theta(u_star, est.tt->factors.u);
  rec.sin_theta_v0 = sin_theta(v_star, est.tt->v_init);
  rec.sin_theta_vt = sin_theta(v_star, est.tt->factors.v);
}

std::vector<TrialRecord> run_covariance_unit(const BenchConfig& c, std::size_t cell, int trial,
                                             std::uint64_t unit) {
  const Index n = c.sample_sizes[cell];
  const GroundTruth gt = gen_ground_truth(c.shape, c.rank_j, c.rank_k, c.decay,
                                          derive_seed(c.seed, kGroundTruthStream, static_cast<std::uint64_t>(trial)));
  const Matrix sigma = true_covariance(gt);
  const std::uint64_t sample_seed = derive_seed(c.seed, kSampleStream, unit);
  const Matrix x = sample_observations(gt, n, sample_seed);

  const auto t0 = Clock::now();
  const Matrix s_hat = sample_covariance(x);
  const double sample_seconds = seconds_since(t0);
  const std::uint64_t hash = data_hash(s_hat);

  const Tensor3 y = rearrange(s_hat, c.shape);
  const Tensor3 target = rearrange(sigma, c.shape);
  const double sigma_norm = sigma.norm();
  Matrix u_star;
  Matrix v_star;
  if (c.sin_theta) {
    u_star = leading_left_singular_vectors(unfold(target, 1), c.rank_j);
    v_star = leading_left_singular_vectors(unfold(target, 3), c.rank_k);
  }
  SvdOptions svd = c.svd;
  svd.seed = derive_seed(c.seed, kSvdStream, unit);

  std::vector<TrialRecord> out;
  for (Method m : c.methods) {
    TrialRecord rec;
    rec.method = std::string(method_name(m));
    rec.n = n;
    rec.trial = trial;
    rec.seed = sample_seed;
    rec.data_hash = hash;
    Matrix estimate;
    if (m == Method::sample) {
      estimate = s_hat;
      rec.time_seconds = sample_seconds;
    } else {
      const Estimate est = denoise(y, target, m, c, svd);
      const auto t1 = Clock::now();
      estimate = rearrange_inv(est.tensor, c.shape);
      estimate = 0.5 * (estimate + estimate.transpose());
      rec.time_seconds = est.seconds + seconds_since(t1);
      if (c.sin_theta) fill_sin_theta(rec, est, u_star, v_star);
    }
    if (c.psd_projection) estimate = psd_project(estimate);
    rec.rel_error = (estimate - sigma).norm() / sigma_norm;
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<TrialRecord> run_tensor_unit(const BenchConfig& c, std::size_t cell, int trial,
                                         std::uint64_t unit) {
  const double noise = c.noise_sigmas[cell];
  const std::uint64_t inst_seed = derive_seed(c.seed, kInstanceStream, static_cast<std::uint64_t>(trial));
  const TensorInstance inst = gen_tensor_instance(c.shape, c.rank_j, c.rank_k, c.decay, noise, inst_seed);
  const std::uint64_t hash = data_hash(inst.y);
  const double target_norm = frobenius_norm(inst.t_star);
  SvdOptions svd = c.svd;
  svd.seed = derive_seed(c.seed, kSvdStream, unit);

  std::vector<TrialRecord> out;
  for (Method m : c.methods) {
    TrialRecord rec;
    rec.method = std::string(method_name(m));
    rec.sigma = noise;
    rec.trial = trial;
    rec.seed = inst_seed;
    rec.data_hash = hash;
    const Estimate est = denoise(inst.y, inst.t_star, m, c, svd);
    rec.time_seconds = est.seconds;
    rec.rel_error = frobenius_norm(est.tensor - inst.t_star) / target_norm;
    if (c.sin_theta && inst.u_star.cols() == c.rank_j && inst.v_star.cols() == c.rank_k) {
      fill_sin_theta(rec, est, inst.u_star, inst.v_star);
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::string opt_double(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::optional<double> parse_opt_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return std::stod(s);
}

}  // namespace

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("TTCOV_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

BenchResult run_benchmark(const BenchConfig& config, const ProgressFn& progress) {
  config.validate();
  const std::size_t cells =
      config.mode == BenchMode::covariance ? config.sample_sizes.size() : config.noise_sigmas.size();
  const std::size_t units = cells * static_cast<std::size_t>(config.trials);
  std::vector<std::vector<TrialRecord>> slots(units);

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex mu;
  auto worker = [&] {
    for (;;) {
      const std::size_t u = next.fetch_add(1);
      if (u >= units || failed.load()) return;
      const std::size_t cell = u / static_cast<std::size_t>(config.trials);
      const int trial = static_cast<int>(u % static_cast<std::size_t>(config.trials));
      try {
        auto recs = config.mode == BenchMode::covariance
                        ? run_covariance_unit(config, cell, trial, u)
                        : run_tensor_unit(config, cell, trial, u);
        std::lock_guard lock(mu);
        slots[u] = std::move(recs);
        if (progress) {
          std::string msg = "cell " + std::to_string(cell + 1) + "/" + std::to_string(cells) +
                            " trial " + std::to_string(trial + 1) + "/" + std::to_string(config.trials);
          for (const auto& r : slots[u]) msg += " " + r.method + "=" + format_double(r.rel_error).substr(0, 8);
          progress(msg);
        }
      } catch (...) {
        std::lock_guard lock(mu);
        if (!error) error = std::current_exception();
        failed = true;
        return;
      }
    }
  };

  const int threads = std::min<int>(resolve_threads(config.threads), static_cast<int>(units));
  std::vector<std::thread> pool;
  for (int i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);

  BenchResult result;
  for (auto& s : slots) {
    for (auto& r : s) result.records.push_back(std::move(r));
  }
  result.aggregates = aggregate(result.records);

  if (config.diagnostics && config.mode == BenchMode::covariance) {
    const GroundTruth gt = gen_ground_truth(config.shape, config.rank_j, config.rank_k, config.decay,
                                            derive_seed(config.seed, kGroundTruthStream, 0));
    const Matrix sigma = true_covariance(gt);
    for (Index n : config.sample_sizes) {
      const ConditionReport rep = check_conditions(sigma, config.shape, n, config.rank_j,
                                                   config.rank_k, config.omega, config.delta,
                                                   {}, config.iterations);
      result.diagnostics.push_back({n, rep.dims.r1, rep.dims.r2, rep.dims.r3, rep.first.margin(),
                                    rep.second.margin(), rep.variance});
    }
  }
  return result;
}

std::vector<Aggregate> aggregate(const std::vector<TrialRecord>& records) {
  std::vector<Aggregate> out;
  std::vector<std::vector<const TrialRecord*>> groups;
  for (const TrialRecord& r : records) {
    std::size_t g = 0;
    while (g < out.size() &&
           !(out[g].method == r.method && out[g].n == r.n && out[g].sigma == r.sigma)) {
      ++g;
    }
    if (g == out.size()) {
      out.push_back({r.method, r.n, r.sigma, 0.0, 0.0, 0, 0.0});
      groups.emplace_back();
    }
    groups[g].push_back(&r);
  }
  for (std::size_t g = 0; g < out.size(); ++g) {
    const auto& rs = groups[g];
    const double count = static_cast<double>(rs.size());
    double sum = 0.0;
    double time = 0.0;
    for (const TrialRecord* r : rs) {
      sum += r->rel_error;
      time += r->time_seconds;
    }
    const double mean = sum / count;
    double ss = 0.0;
    for (const TrialRecord* r : rs) ss += (r->rel_error - mean) * (r->rel_error - mean);
    out[g].mean = mean;
    out[g].std = rs.size() > 1 ? std::sqrt(ss / (count - 1.0)) : 0.0;
    out[g].count = static_cast<int>(rs.size());
    out[g].mean_time = time / count;
  }
  return out;
}

std::string format_csv(const std::vector<TrialRecord>& records) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const TrialRecord& r : records) {
    char hash[17];
    std::snprintf(hash, sizeof hash, "%016" PRIx64, r.data_hash);
    out += r.method + ',' + (r.n ? std::to_string(*r.n) : std::string()) + ',' + opt_double(r.sigma) +
           ',' + std::to_string(r.trial) + ',' + format_double(r.rel_error) + ',' +
           format_double(r.time_seconds) + ',' + opt_double(r.sin_theta_u0) + ',' +
           opt_double(r.sin_theta_ut) + ',' + opt_double(r.sin_theta_v0) + ',' +
           opt_double(r.sin_theta_vt) + ',' + std::to_string(r.seed) + ',' + hash + '\n';
  }
  return out;
}

std::vector<TrialRecord> parse_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw DataError("results CSV: unexpected header");
  std::vector<TrialRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 12) throw DataError("results CSV: expected 12 fields in '" + line + "'");
    try {
      TrialRecord r;
      r.method = f[0];
      if (!f[1].empty()) r.n = std::stoll(f[1]);
      r.sigma = parse_opt_double(f[2]);
      r.trial = std::stoi(f[3]);
      r.rel_error = std::stod(f[4]);
      r.time_seconds = std::stod(f[5]);
      r.sin_theta_u0 = parse_opt_double(f[6]);
      r.sin_theta_ut = parse_opt_double(f[7]);
      r.sin_theta_v0 = parse_opt_double(f[8]);
      r.sin_theta_vt = parse_opt_double(f[9]);
      r.seed = std::stoull(f[10]);
      r.data_hash = std::stoull(f[11], nullptr, 16);
      out.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw DataError("results CSV: malformed field in '" + line + "'");
    }
  }
  return out;
}

std::string format_json(const BenchResult& result) {
  using nlohmann::json;
  json aggs = json::array();
  for (const Aggregate& a : result.aggregates) {
    json j;
    j["method"] = a.method;
    j["n"] = a.n ? json(*a.n) : json(nullptr);
    j["sigma"] = a.sigma ? json(*a.sigma) : json(nullptr);
    j["mean"] = a.mean;
    j["std"] = a.std;
    j["count"] = a.count;
    j["mean_time"] = a.mean_time;
    aggs.push_back(std::move(j));
  }
  json doc;
  doc["schema_version"] = 1;
  doc["aggregates"] = std::move(aggs);
  if (!result.diagnostics.empty()) {
    json diags = json::array();
    for (const CellDiagnostics& d : result.diagnostics) {
      diags.push_back({{"n", d.n}, {"r1", d.r1}, {"r2", d.r2}, {"r3", d.r3},
                       {"first_margin", d.first_margin}, {"second_margin", d.second_margin},
                       {"variance", d.variance}});
    }
    doc["diagnostics"] = std::move(diags);
  }
  return doc.dump(2) + "\n";
}

void write_results(const BenchConfig& config, const BenchResult& result) {
  atomic_write(config.output, format_csv(result.records));
  atomic_write(config.json_path(), format_json(result));
}

}  // namespace ttcov
