// Reproduction checks for the published benchmark numbers plus the property,
// bound-sanity and rank-selection criteria. Prints one PASS/FAIL line per
// criterion and exits nonzero if any fails.

#include "ttcov/bench.hpp"
#include "ttcov/diagnostics.hpp"
#include "ttcov/estimators.hpp"
#include "ttcov/linalg.hpp"
#include "ttcov/matrix_io.hpp"
#include "ttcov/random.hpp"
#include "ttcov/rearrange.hpp"
#include "ttcov/synthgen.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#ifndef TTCOV_UNIT_TESTS_PATH
#error "TTCOV_UNIT_TESTS_PATH must point at the unit test executable"
#endif

namespace {

using namespace ttcov;
using Clock = std::chrono::steady_clock;

constexpr std::uint64_t kMasterSeed = 42;

// Rank-selection constant C' * omega (omega = 1), from a sweep on master seed
// 1000, trials 0..19, disjoint from the seeds checked here. No single value
// gave (7, 9) on any calibration trial; 0.642 is the midpoint of the window
// [0.641, 0.6435] that maximizes J = 7 hits (7/20). The K = 9 windows sit
// near 1.02..1.24.
constexpr double kRankCalibration = 0.642;

int failures = 0;

void report(bool ok, const std::string& name, const std::string& detail) {
  std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

void info(const std::string& name, const std::string& detail) {
  std::printf("INFO %s: %s\n", name.c_str(), detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c, d);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

BenchConfig benchmark_model(Index n, int trials, std::vector<Method> methods, const std::string& name) {
  BenchConfig c;
  c.shape = {10, 10, 10};
  c.rank_j = 7;
  c.rank_k = 9;
  c.sample_sizes = {n};
  c.methods = std::move(methods);
  c.iterations = 10;
  c.trials = trials;
  c.seed = kMasterSeed;
  c.init = TtInit::independent;
  c.output = name + ".csv";
  return c;
}

struct Cell {
  Aggregate agg;
  std::vector<const TrialRecord*> records;
};

std::map<std::string, Cell> by_method(const BenchResult& r) {
  std::map<std::string, Cell> out;
  for (const Aggregate& a : r.aggregates) out[a.method].agg = a;
  for (const TrialRecord& rec : r.records) out[rec.method].records.push_back(&rec);
  return out;
}

double mean_of(const std::vector<const TrialRecord*>& rs, std::optional<double> TrialRecord::*field) {
  double s = 0.0;
  for (const TrialRecord* r : rs) s += (r->*field).value_or(std::nan(""));
  return s / static_cast<double>(rs.size());
}

// Accept if |mean - reference| <= max(3 * ref_std, 0.02).
void check_mean(const std::string& cell, const std::string& label, const Aggregate& a,
                double ref_mean, double ref_std) {
  const double tol = std::max(3.0 * ref_std, 0.02);
  const double diff = std::abs(a.mean - ref_mean);
  report(diff <= tol, cell + " " + label,
         fmt("mean %.4f (std %.4f) vs reference %.3f, ", a.mean, a.std, ref_mean) +
             fmt("|diff| %.4f <= %.3f, %.0f trials", diff, tol, a.count));
}

BenchResult run_cell(const BenchConfig& c, const std::string& name) {
  const auto t0 = Clock::now();
  BenchResult r = run_benchmark(c);
  write_results(c, r);
  info(name, fmt("%.0f trials in %.1f s, records in ", c.trials, seconds_since(t0)) + c.output.string());
  return r;
}

void property_suites() {
  const std::string cmd = std::string(TTCOV_UNIT_TESTS_PATH) +
                          " --gtest_filter='*Property*' --gtest_brief=1 > property_suites.log 2>&1";
  const auto t0 = Clock::now();
  const int status = std::system(cmd.c_str());
  report(status == 0, "property suites",
         (status == 0 ? std::string("all *Property* gtest suites passed") : "see property_suites.log") +
             fmt(" (%.1f s)", seconds_since(t0)));
}

// Instances y = T* + E with E scaled so that both singular-value conditions
// hold with factor 2 using the rigorous upper brackets; the measured HardTTh
// error must stay below the assembled bound with upper-bracket terms.
void bound_sanity() {
  constexpr int kInstances = 50;
  int holds = 0;
  double worst = 0.0;
  for (int i = 0; i < kInstances; ++i) {
    const FactorShape shape = i % 2 == 0 ? FactorShape{3, 3, 3} : FactorShape{3, 2, 3};
    const Index j = 3;
    const Index k = i % 2 == 0 ? 3 : 2;
    const std::uint64_t seed = derive_seed(kMasterSeed, 0x7b, static_cast<std::uint64_t>(i));
    const TensorInstance clean = gen_tensor_instance(shape, j, k, {}, 0.0, seed);
    const Tensor3 noise = gen_tensor_instance(shape, j, k, {}, 1.0, seed).y - clean.t_star;
    const double sj = sigma_k(unfold(clean.t_star, 1), j);
    const double sk = sigma_k(unfold(clean.t_star, 3), k);
    double scale = std::min(sj / singular_values(unfold(noise, 1))(0),
                            sk / singular_values(unfold(noise, 3))(0)) / 48.0;
    SensitivityOptions opts;
    opts.seed = seed;
    for (;;) {
      const Tensor3 e = scale * noise;
      const SensitivityReport rep = sensitivity_report(clean.t_star, e, clean.u_star, clean.v_star, 10, opts);
      if (rep.first.margin() < 2.0 || rep.second_rigorous.margin() < 2.0) {
        scale *= 0.5;
        continue;
      }
      const Tensor3 y = clean.t_star + e;
      const Tensor3 est = hardtth(y, j, k, 10).factors.reconstruct();
      const double err = frobenius_norm(est - clean.t_star);
      if (err <= rep.bound.upper) ++holds;
      worst = std::max(worst, err / rep.bound.upper);
      break;
    }
  }
  report(holds == kInstances, "error bound sanity",
         fmt("%.0f/%.0f instances within the upper-bracket bound, worst error/bound %.3g", holds, kInstances, worst));
}

// Rank selection on fresh draws of the benchmark model; also reports both
// TT-HOSVD initializations on the same draws.
void rank_selection() {
  constexpr int kTrials = 20;
  constexpr Index kN = 2000;
  const FactorShape shape{10, 10, 10};
  int exact = 0;
  double seq = 0.0;
  double ind = 0.0;
  std::string picks;
  const auto t0 = Clock::now();
  for (int t = 0; t < kTrials; ++t) {
    const GroundTruth gt = gen_ground_truth(shape, 7, 9, {}, derive_seed(kMasterSeed, 0x5e1, static_cast<std::uint64_t>(t)));
    const Matrix sigma = true_covariance(gt);
    const Matrix s_hat = sample_covariance(sample_observations(gt, kN, derive_seed(kMasterSeed, 0x5e2, static_cast<std::uint64_t>(t))));
    const SelectedRanks sel = select_ranks(s_hat, shape, kN, 1.0, 0.05, kRankCalibration);
    if (sel.rank_j == 7 && sel.rank_k == 9) ++exact;
    picks += (t ? " " : "") + std::to_string(sel.rank_j) + "," + std::to_string(sel.rank_k);

    const Tensor3 y = rearrange(s_hat, shape);
    for (TtInit init : {TtInit::sequential, TtInit::independent}) {
      const Matrix est = rearrange_inv(tt_hosvd(y, 7, 9, {}, init).factors.reconstruct(), shape);
      const double err = (0.5 * (est + est.transpose()) - sigma).norm() / sigma.norm();
      (init == TtInit::sequential ? seq : ind) += err / kTrials;
    }
  }
  report(exact >= 18, "rank selection",
         fmt("(J,K) = (7,9) in %.0f/20 trials (need >= 18), C'*omega = %.4g, delta 0.05; picks ", exact, kRankCalibration) + picks);
  info("TT-HOSVD initializations", fmt("n=2000, 20 draws: sequential V0 mean %.4f, independent V0 mean %.4f (%.0f s)",
                                       seq, ind, seconds_since(t0)));
}

}  // namespace

int main() {
  const auto start = Clock::now();

  // n = 2000, 16 trials.
  const BenchResult r2000 = run_cell(
      benchmark_model(2000, 16, {Method::sample, Method::tt_hosvd, Method::hardtth, Method::prls}, "n2000"), "n2000");
  auto c2 = by_method(r2000);
  check_mean("n2000", "sample", c2["sample"].agg, 0.611, 0.009);
  check_mean("n2000", "tt_hosvd", c2["tt_hosvd"].agg, 0.154, 0.006);
  check_mean("n2000", "hardtth", c2["hardtth"].agg, 0.082, 0.005);
  check_mean("n2000", "prls (oracle-tuned)", c2["prls"].agg, 0.216, 0.012);

  // n = 500, 32 trials.
  const BenchResult r500 =
      run_cell(benchmark_model(500, 32, {Method::sample, Method::tt_hosvd, Method::hardtth}, "n500"), "n500");
  auto c1 = by_method(r500);
  check_mean("n500", "sample", c1["sample"].agg, 1.22, 0.02);
  check_mean("n500", "tt_hosvd", c1["tt_hosvd"].agg, 0.269, 0.008);
  check_mean("n500", "hardtth", c1["hardtth"].agg, 0.238, 0.013);

  const double gap500 = c1["tt_hosvd"].agg.mean - c1["hardtth"].agg.mean;
  const double gap2000 = c2["tt_hosvd"].agg.mean - c2["hardtth"].agg.mean;
  report(gap500 >= 0.0 && gap500 < 0.05 && gap2000 >= 0.05, "iteration gain regime shift",
         fmt("tt_hosvd - hardtth = %.4f at n=500 (need in [0, 0.05)), %.4f at n=2000 (need >= 0.05)", gap500, gap2000));

  // n = 4000, 16 trials.
  const BenchResult r4000 = run_cell(benchmark_model(4000, 16, {Method::tt_hosvd, Method::hardtth}, "n4000"), "n4000");
  auto c3 = by_method(r4000);
  check_mean("n4000", "hardtth", c3["hardtth"].agg, 0.054, 0.002);
  info("n4000 tt_hosvd", fmt("mean %.4f (reference 0.105, not a criterion)", c3["tt_hosvd"].agg.mean));

  // Subspace distances of the HardTTh iterates.
  {
    const auto& h2 = c2["hardtth"].records;
    const auto& h1 = c1["hardtth"].records;
    const double u0 = mean_of(h2, &TrialRecord::sin_theta_u0);
    const double ut = mean_of(h2, &TrialRecord::sin_theta_ut);
    report(u0 >= 0.9 && ut >= 0.33 - 0.24 && ut <= 0.33 + 0.24, "sin theta n=2000",
           fmt("U0 %.3f (need >= 0.9), UT %.3f (need in [0.09, 0.57]), V0 %.3f, VT %.3f", u0, ut,
               mean_of(h2, &TrialRecord::sin_theta_v0), mean_of(h2, &TrialRecord::sin_theta_vt)));
    const double a = mean_of(h1, &TrialRecord::sin_theta_u0);
    const double b = mean_of(h1, &TrialRecord::sin_theta_ut);
    const double c = mean_of(h1, &TrialRecord::sin_theta_v0);
    const double d = mean_of(h1, &TrialRecord::sin_theta_vt);
    report(std::min({a, b, c, d}) >= 0.9, "sin theta n=500",
           fmt("U0 %.3f, UT %.3f, V0 %.3f, VT %.3f (need all >= 0.9)", a, b, c, d));
    int refined = 0;
    for (const TrialRecord* r : h2) refined += *r->sin_theta_ut <= *r->sin_theta_u0 ? 1 : 0;
    report(refined * 10 >= static_cast<int>(h2.size()) * 9, "refinement reduces sin theta at n=2000",
           fmt("UT <= U0 in %.0f/%.0f trials (need >= 90%%)", refined, static_cast<double>(h2.size())));
  }

  property_suites();
  bound_sanity();
  rank_selection();

  {
    double total = 0.0;
    for (const TrialRecord* r : c2["hardtth"].records) total += r->time_seconds;
    report(total <= 41.0, "hardtth time guard",
           fmt("n=2000 cell total %.2f s over 16 trials (limit 10 x 4.1 s)", total));
  }

  info("wall time", fmt("%.1f s", seconds_since(start)));
  std::printf("%s: %d criteria failed\n", failures ? "FAILED" : "OK", failures);
  return failures ? 1 : 0;
}
