#pragma once

#include "ttcov/estimators.hpp"
#include "ttcov/rearrange.hpp"
#include "ttcov/synthgen.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ttcov {

enum class BenchMode {
  covariance,  // sample from the sampling model, estimate Sigma
  tensor,      // Y = T* + sigma * noise, estimate T*
};

inline constexpr int kConfigSchema = 1;

struct BenchConfig {
  BenchMode mode = BenchMode::covariance;
  FactorShape shape{10, 10, 10};
  Index rank_j = 7;
  Index rank_k = 9;
  std::vector<Index> sample_sizes{2000};
  std::vector<double> noise_sigmas{0.3};
  std::vector<Method> methods{Method::sample, Method::tt_hosvd, Method::hardtth, Method::prls};
  int iterations = 10;
  int trials = 16;
  std::uint64_t seed = 42;
  SpectrumDecay decay;
  SvdOptions svd;
  TtInit init = TtInit::sequential;
  int prls_grid = 20;
  bool enable_tucker = false;
  bool psd_projection = false;
  bool sin_theta = true;
  bool diagnostics = false;
  double omega = 1.0;
  double delta = 0.05;
  int threads = 0;  // 0: TTCOV_THREADS, else hardware concurrency
  std::filesystem::path output = "results.csv";
  std::filesystem::path json_output;  // empty: output with a .json extension

  /// Throws ConfigError.
  void validate() const;
  [[nodiscard]] std::filesystem::path json_path() const;
};

/// key = value lines, '#' comments. `schema_version` is required and unknown
/// keys are rejected. Throws ConfigError.
[[nodiscard]] BenchConfig parse_config(std::string_view text);
[[nodiscard]] BenchConfig load_config(const std::filesystem::path& path);
/// Canonical text form; parse_config(format_config(c)) reproduces c.
[[nodiscard]] std::string format_config(const BenchConfig& c);

struct TrialRecord {
  std::string method;
  std::optional<Index> n;
  std::optional<double> sigma;
  int trial = 0;
  double rel_error = 0.0;
  double time_seconds = 0.0;
  std::optional<double> sin_theta_u0;
  std::optional<double> sin_theta_ut;
  std::optional<double> sin_theta_v0;
  std::optional<double> sin_theta_vt;
  std::uint64_t seed = 0;
  std::uint64_t data_hash = 0;
};

struct Aggregate {
  std::string method;
  std::optional<Index> n;
  std::optional<double> sigma;
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation; 0 for a single trial
  int count = 0;
  double mean_time = 0.0;
};

/// Condition margins of the true covariance per sample size (covariance mode
/// with diagnostics enabled).
struct CellDiagnostics {
  Index n = 0;
  double r1 = 0.0;
  double r2 = 0.0;
  double r3 = 0.0;
  double first_margin = 0.0;
  double second_margin = 0.0;
  double variance = 0.0;
};

struct BenchResult {
  std::vector<TrialRecord> records;
  std::vector<Aggregate> aggregates;
  std::vector<CellDiagnostics> diagnostics;
};

using ProgressFn = std::function<void(const std::string&)>;

/// Runs every (cell, trial) unit on a worker pool; within a unit all methods
/// see the same generated data. Records are ordered by cell, trial, then
/// method as listed in the config.
[[nodiscard]] BenchResult run_benchmark(const BenchConfig& config, const ProgressFn& progress = {});

/// Groups by (method, n, sigma) in first-appearance order.
[[nodiscard]] std::vector<Aggregate> aggregate(const std::vector<TrialRecord>& records);

inline constexpr std::string_view kCsvHeader =
    "method,n,sigma,trial,rel_error,time_seconds,sin_theta_u0,sin_theta_uT,sin_theta_v0,"
    "sin_theta_vT,seed,data_hash";

[[nodiscard]] std::string format_csv(const std::vector<TrialRecord>& records);
[[nodiscard]] std::vector<TrialRecord> parse_csv(std::string_view text);
[[nodiscard]] std::string format_json(const BenchResult& result);

/// Writes the CSV and JSON outputs atomically.
void write_results(const BenchConfig& config, const BenchResult& result);

/// Worker count: explicit value if positive, else TTCOV_THREADS, else
/// hardware concurrency (at least 1).
[[nodiscard]] int resolve_threads(int requested);

}  // namespace ttcov
