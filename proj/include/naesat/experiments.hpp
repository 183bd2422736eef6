#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "naesat/real.hpp"

namespace naesat {

inline constexpr const char* kSweepSchema = "naesat.sweep/1";
inline constexpr const char* kDensitySchema = "naesat.free_density/1";
inline constexpr const char* kSurvivalSchema = "naesat.survival/1";
inline constexpr const char* kSampleZSchema = "naesat.sample_ez/1";

// Small k and n are far from the asymptotic regime of the theory.
inline constexpr const char* kRegimeLabel = "qualitative";

struct ExperimentOptions {
  int threads = 1;
  std::uint64_t node_budget = 10'000'000;
  int count_limit_n = 20;  // exhaustive counting only up to this n
};

// Trial t under master seed s uses derive_seed(s, t); the graph and literals
// of that trial use derive_seed(trial_seed, 0) and derive_seed(trial_seed, 1).
// Grid point i of a sweep uses master derive_seed(s, i) for its trials.
std::uint64_t trial_seed(std::uint64_t master, std::uint64_t trial);

struct SweepRow {
  int k = 0, d = 0, n = 0, trials = 0;
  int sat = 0;
  int budget_exhausted = 0;  // undecided trials, excluded from sat_fraction
  double sat_fraction = 0;
  std::optional<double> mean_Z;             // when n <= count_limit_n
  std::optional<double> mean_free_density;  // over coarsened witnesses of sat trials
  double wall_time = 0;                     // seconds
};

struct SweepResult {
  std::vector<SweepRow> rows;
};

SweepResult sat_sweep(int k, const std::vector<int>& d_list, int n, int trials, std::uint64_t seed,
                      const ExperimentOptions& opt = {});

struct FreeDensityHistogram {
  int k = 0, d = 0, n = 0, trials = 0;
  std::vector<int> counts;  // counts[j]: trials whose coarsened sample has j free variables
  int sampled = 0;          // trials with at least one solution
  bool empty = true;
  std::optional<double> mean_beta;
  double reference = 0;  // 2^{-(k+1)}
  std::optional<double> reference_ratio;  // mean_beta * 2^{k+1}
};

// Per trial: count all solutions exhaustively, pick one uniformly, coarsen it.
FreeDensityHistogram free_density_histogram(int k, int d, int n, int trials, std::uint64_t seed,
                                            const ExperimentOptions& opt = {});

struct SurvivalEstimate {
  int k = 0, d = 0, n = 0, trials = 0;
  double t_target = 0;
  int iterations_target = 0;  // ceil(n t_target)
  int survived = 0;
  double survival = 0;
  double theta = 0;            // 2k/(2^k - 2)
  double log_bound = 0;        // n[H(t) + d(1/k - t) log(1 - theta t)]
  std::vector<int> lengths;    // iterations survived, per trial
};

// Half-edge deletion process: m = nd/k of the nd variable half-edges are
// chosen in random order as potentially forcing, each initially forcing with
// probability theta. Each step frees the first unfreed variable with no
// remaining initially forcing half-edge, deletes its d_v remaining potentially
// forcing half-edges, then deletes the first d - d_v remaining ones overall.
SurvivalEstimate simulate_coarsening_survival(int k, int d, int n, double t_target, int trials, std::uint64_t seed,
                                              const ExperimentOptions& opt = {});

// Number of steps the process survives for one realization.
int coarsening_process_length(int k, int d, int n, std::uint64_t seed, int stop_after = -1);

struct SampleEZ {
  int k = 0, d = 0, n = 0, m = 0, trials = 0;
  double mean = 0;
  double stddev = 0;  // sample standard deviation
  double ci_low = 0, ci_high = 0;
  double z = 1.959963984540054;
  Real expected;  // 2^n (1 - 2/2^k)^m
  bool covers = false;
};

SampleEZ sample_EZ(int k, int d, int n, int trials, std::uint64_t seed, const ExperimentOptions& opt = {});

}  // namespace naesat
