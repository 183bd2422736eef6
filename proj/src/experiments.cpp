#include "naesat/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <thread>

#include "naesat/errors.hpp"
#include "naesat/frozen.hpp"
#include "naesat/graphs.hpp"
#include "naesat/naesat_core.hpp"
#include "naesat/rng.hpp"

namespace naesat {

namespace {

void check_common(int k, int n, int trials, const char* who) {
  if (k < 2) throw InputError(std::string(who) + ": need k >= 2");
  if (n <= 0) throw InputError(std::string(who) + ": need n > 0");
  if (trials <= 0) throw InputError(std::string(who) + ": trials must be positive");
}

// Runs body(i) for i in [0, count); results are written by index so the
// outcome does not depend on the thread count.
void for_each_trial(int count, int threads, const std::function<void(int)>& body) {
  threads = std::clamp(threads, 1, std::max(1, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w)
    pool.emplace_back([&, w] {
      try {
        for (int i = w; i < count; i += threads) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

Instance random_instance(int n, int d, int k, std::uint64_t seed) {
  Instance inst;
  inst.graph = generate_graph(n, d, k, derive_seed(seed, 0));
  inst.literals = generate_literals(inst.graph, derive_seed(seed, 1));
  return inst;
}

double binary_entropy(double t) {
  if (t <= 0 || t >= 1) return 0;
  return -t * std::log(t) - (1 - t) * std::log1p(-t);
}

}  // namespace

std::uint64_t trial_seed(std::uint64_t master, std::uint64_t trial) { return derive_seed(master, trial); }

SweepResult sat_sweep(int k, const std::vector<int>& d_list, int n, int trials, std::uint64_t seed,
                      const ExperimentOptions& opt) {
  check_common(k, n, trials, "sat_sweep");
  if (d_list.empty()) throw InputError("sat_sweep: empty d list");
  for (int d : d_list)
    if (d <= 0 || static_cast<long long>(n) * d % k != 0)
      throw InputError("sat_sweep: need d > 0 with n*d divisible by k (d=" + std::to_string(d) + ")");
  SweepResult out;
  for (std::size_t i = 0; i < d_list.size(); ++i) {
    const int d = d_list[i];
    const std::uint64_t master = trial_seed(seed, i);
    const bool count = n <= opt.count_limit_n;
    struct Trial {
      int status = 0;  // 1 sat, 0 unsat, -1 budget
      double Z = 0;
      double beta = 0;
    };
    std::vector<Trial> res(trials);
    auto t0 = std::chrono::steady_clock::now();
    for_each_trial(trials, opt.threads, [&](int t) {
      Instance inst = random_instance(n, d, k, trial_seed(master, t));
      if (count) res[t].Z = static_cast<double>(count_solutions(inst.graph, inst.literals, opt.count_limit_n).Z);
      try {
        DecideResult r = decide(inst.graph, inst.literals, {opt.node_budget});
        res[t].status = r.sat ? 1 : 0;
        if (r.sat) res[t].beta = static_cast<double>(coarsen(inst.graph, inst.literals, r.witness).free_count) / n;
      } catch (const BudgetExhausted&) {
        res[t].status = -1;
      }
    });
    SweepRow row;
    row.k = k;
    row.d = d;
    row.n = n;
    row.trials = trials;
    double zsum = 0, bsum = 0;
    for (const auto& r : res) {
      if (r.status == 1) {
        ++row.sat;
        bsum += r.beta;
      }
      if (r.status < 0) ++row.budget_exhausted;
      zsum += r.Z;
    }
    const int decided = trials - row.budget_exhausted;
    row.sat_fraction = decided > 0 ? static_cast<double>(row.sat) / decided : 0.0;
    if (count) row.mean_Z = zsum / trials;
    if (row.sat > 0) row.mean_free_density = bsum / row.sat;
    row.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.rows.push_back(row);
  }
  return out;
}

FreeDensityHistogram free_density_histogram(int k, int d, int n, int trials, std::uint64_t seed,
                                            const ExperimentOptions& opt) {
  check_common(k, n, trials, "free_density_histogram");
  if (n > opt.count_limit_n) throw SizeGuardError("free_density_histogram: n exceeds exhaustive budget");
  std::vector<int> frees(trials, -1);
  for_each_trial(trials, opt.threads, [&](int t) {
    const std::uint64_t s = trial_seed(seed, t);
    Instance inst = random_instance(n, d, k, s);
    SolutionCount c = count_solutions(inst.graph, inst.literals, opt.count_limit_n, true);
    if (c.solutions.empty()) return;
    SplitMix64 rng(derive_seed(s, 2));
    const auto& x = c.solutions[rng.below(c.solutions.size())];
    frees[t] = coarsen(inst.graph, inst.literals, x).free_count;
  });
  FreeDensityHistogram h;
  h.k = k;
  h.d = d;
  h.n = n;
  h.trials = trials;
  h.counts.assign(n + 1, 0);
  h.reference = std::ldexp(1.0, -(k + 1));
  double sum = 0;
  for (int f : frees) {
    if (f < 0) continue;
    ++h.counts[f];
    ++h.sampled;
    sum += static_cast<double>(f) / n;
  }
  h.empty = h.sampled == 0;
  if (!h.empty) {
    h.mean_beta = sum / h.sampled;
    h.reference_ratio = *h.mean_beta / h.reference;
  }
  return h;
}

int coarsening_process_length(int k, int d, int n, std::uint64_t seed, int stop_after) {
  if (static_cast<long long>(n) * d % k != 0) throw InputError("coarsening process: n*d is not divisible by k");
  const int E = n * d;
  const int m = E / k;
  const double theta = 2.0 * k / (std::ldexp(1.0, k) - 2.0);
  SplitMix64 rng(seed);
  // Random ordered m-subset of the half-edges by a partial Fisher-Yates shuffle.
  std::vector<int> half(E);
  for (int i = 0; i < E; ++i) half[i] = i;
  for (int i = 0; i < m; ++i) std::swap(half[i], half[i + rng.below(E - i)]);
  std::vector<std::uint8_t> forcing(m);
  for (int a = 0; a < m; ++a) forcing[a] = rng.uniform() < theta;

  std::vector<std::vector<int>> at(n);  // potentially forcing edges by variable
  std::vector<int> initially(n, 0);     // remaining initially forcing edges
  for (int a = 0; a < m; ++a) {
    const int v = half[a] / d;
    at[v].push_back(a);
    if (forcing[a]) ++initially[v];
  }
  std::vector<std::uint8_t> alive(m, 1);
  std::vector<std::uint8_t> freed(n, 0);
  int first_alive = 0;
  auto remove = [&](int a) {
    alive[a] = 0;
    if (forcing[a]) --initially[half[a] / d];
  };
  int steps = 0;
  while (stop_after < 0 || steps < stop_after) {
    int v = -1;
    for (int u = 0; u < n; ++u)
      if (!freed[u] && initially[u] == 0) {
        v = u;
        break;
      }
    if (v < 0) break;
    freed[v] = 1;
    int dv = 0;
    for (int a : at[v])
      if (alive[a]) {
        remove(a);
        ++dv;
      }
    for (int left = d - dv; left > 0 && first_alive < m;) {
      if (alive[first_alive]) {
        remove(first_alive);
        --left;
      }
      ++first_alive;
    }
    ++steps;
  }
  return steps;
}

SurvivalEstimate simulate_coarsening_survival(int k, int d, int n, double t_target, int trials, std::uint64_t seed,
                                              const ExperimentOptions& opt) {
  check_common(k, n, trials, "simulate_coarsening_survival");
  if (d <= 0) throw InputError("simulate_coarsening_survival: need d > 0");
  if (!(t_target >= 0) || t_target > 1) throw InputError("simulate_coarsening_survival: t_target outside [0,1]");
  SurvivalEstimate s;
  s.k = k;
  s.d = d;
  s.n = n;
  s.trials = trials;
  s.t_target = t_target;
  s.iterations_target = static_cast<int>(std::ceil(n * t_target - 1e-12));
  s.theta = 2.0 * k / (std::ldexp(1.0, k) - 2.0);
  s.lengths.assign(trials, 0);
  for_each_trial(trials, opt.threads, [&](int t) {
    s.lengths[t] = coarsening_process_length(k, d, n, trial_seed(seed, t), s.iterations_target);
  });
  for (int len : s.lengths) s.survived += len >= s.iterations_target;
  s.survival = static_cast<double>(s.survived) / trials;
  const double t = t_target;
  s.log_bound = n * (binary_entropy(t) + d * (1.0 / k - t) * std::log1p(-s.theta * t));
  return s;
}

SampleEZ sample_EZ(int k, int d, int n, int trials, std::uint64_t seed, const ExperimentOptions& opt) {
  check_common(k, n, trials, "sample_EZ");
  if (d < 0 || static_cast<long long>(n) * d % k != 0) throw InputError("sample_EZ: need n*d divisible by k");
  if (n > opt.count_limit_n) throw SizeGuardError("sample_EZ: n exceeds exhaustive budget");
  const int m = n * d / k;
  std::vector<double> z(trials);
  for_each_trial(trials, opt.threads, [&](int t) {
    if (m == 0) {
      FactorGraph g = FactorGraph::from_clause_vars(n, 0, k, {});
      z[t] = static_cast<double>(count_solutions(g, LiteralAssignment{}, opt.count_limit_n).Z);
      return;
    }
    Instance inst = random_instance(n, d, k, trial_seed(seed, t));
    z[t] = static_cast<double>(count_solutions(inst.graph, inst.literals, opt.count_limit_n).Z);
  });
  SampleEZ r;
  r.k = k;
  r.d = d;
  r.n = n;
  r.m = m;
  r.trials = trials;
  double sum = 0;
  for (double x : z) sum += x;
  r.mean = sum / trials;
  double ss = 0;
  for (double x : z) ss += (x - r.mean) * (x - r.mean);
  r.stddev = trials > 1 ? std::sqrt(ss / (trials - 1)) : 0.0;
  const double half = r.z * r.stddev / std::sqrt(static_cast<double>(trials));
  r.ci_low = r.mean - half;
  r.ci_high = r.mean + half;
  ExpectedZ e = expected_Z(n, m, k);
  const double ez = e.exact.get_d();
  r.expected = e.exact.get_d() > 0 ? exp(e.log_value) : Real(0);
  if (m == 0) r.expected = Real(ez);
  r.covers = r.ci_low <= ez && ez <= r.ci_high;
  return r;
}

}  // namespace naesat
