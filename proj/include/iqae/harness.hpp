// Monte Carlo harness over the estimation engine: amplitude sweeps with
// bias statistics, the empirical bias decomposition over the final Grover
// number, conditional-bias estimation with (k_fin, f_fin) pinned, and
// resonant-angle detection via continued fractions.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "iqae/engine.hpp"
#include "iqae/parallel.hpp"

namespace iqae {

inline double f_fin(double a, std::int64_t k) { return f_fin_of(a, k); }

// Per-run record kept by campaigns; everything the sweep, scatter, and
// decomposition outputs need, without retaining full traces.
struct RunSummary {
  std::int64_t run_id = 0;
  double a_hat = 0.0;
  double error = 0.0;
  bool success = false;
  std::int64_t k_fin = 0;
  std::int64_t n_fin = 0;
  std::int64_t r_fin = 0;
  double f_fin = 0.0;
  std::uint64_t total_grover_calls = 0;
  std::uint64_t final_round_grover_calls = 0;
  std::uint64_t state_preparations = 0;
  std::int64_t rounds = 0;
  bool mitigated = false;
  bool failed = false;
};

inline RunSummary summarize(const RunResult& result, std::int64_t run_id = 0) {
  RunSummary s;
  s.run_id = run_id;
  s.a_hat = result.a_hat;
  s.error = result.error;
  s.success = result.success;
  s.k_fin = result.k_fin;
  s.n_fin = result.n_fin;
  s.r_fin = result.r_fin;
  s.f_fin = result.f_fin;
  s.total_grover_calls = result.total_grover_calls;
  s.final_round_grover_calls = result.final_round_grover_calls;
  s.state_preparations = result.ledger.state_preparations;
  s.rounds = static_cast<std::int64_t>(result.rounds.size());
  s.mitigated = result.mitigated;
  return s;
}

// n_run independent engine executions at a fixed amplitude. Task i uses the
// stream derived from (master_seed, task_offset + i), so results are
// identical for any thread count; a run that trips the round cap is marked
// failed instead of aborting the campaign.
inline std::vector<RunSummary> run_campaign(double a, const IqaeConfig& config,
                                            std::int64_t n_run, bool mitigated,
                                            std::uint64_t master_seed,
                                            std::uint64_t task_offset = 0,
                                            int threads = 1) {
  if (n_run < 1) throw std::domain_error("n_run must be >= 1");
  config.validate();
  const BernoulliOracle oracle(a);
  std::vector<RunSummary> out(static_cast<std::size_t>(n_run));
  parallel_for(n_run, threads, [&](std::int64_t i) {
    Xoshiro256pp rng = derive_stream(master_seed, task_offset + std::uint64_t(i));
    RunSummary& slot = out[static_cast<std::size_t>(i)];
    try {
      RunResult result = mitigated ? run_mitigated(config, oracle, rng)
                                   : run_iqae(config, oracle, rng);
      annotate(result, a, config.epsilon);
      slot = summarize(result, i);
    } catch (const RoundLimitExceeded&) {
      slot.run_id = i;
      slot.failed = true;
      slot.mitigated = mitigated;
    }
  });
  return out;
}

inline std::vector<RunSummary> scatter_kfin_ffin(double a,
                                                 const IqaeConfig& config,
                                                 std::int64_t n_run,
                                                 std::uint64_t master_seed,
                                                 int threads = 1) {
  return run_campaign(a, config, n_run, /*mitigated=*/false, master_seed, 0,
                      threads);
}

// Aggregated statistics of one amplitude: mean error (the empirical bias),
// its standard error sqrt(mean(e^2))/sqrt(N), success rate and query means.
struct BiasRow {
  double a = 0.0;
  std::int64_t n_run = 0;  // runs included (failed runs excluded)
  double mean_error = 0.0;
  double std_error = 0.0;
  double success_rate = 0.0;
  double mean_queries = 0.0;
  double mean_final_round_queries = 0.0;
  bool mitigated = false;
  bool biased = false;  // |mean_error| >= 2 std_error
  std::int64_t failed_runs = 0;
};

// Accumulation in extended precision keeps the decomposition identity tight
// even when per-run errors largely cancel.
inline BiasRow aggregate_bias(double a, const std::vector<RunSummary>& runs,
                              bool mitigated) {
  BiasRow row;
  row.a = a;
  row.mitigated = mitigated;
  long double sum_error = 0.0L;
  long double sum_error_sq = 0.0L;
  long double sum_queries = 0.0L;
  long double sum_final_queries = 0.0L;
  std::int64_t included = 0;
  std::int64_t successes = 0;
  for (const RunSummary& run : runs) {
    if (run.failed) {
      ++row.failed_runs;
      continue;
    }
    ++included;
    const long double e = run.error;
    sum_error += e;
    sum_error_sq += e * e;
    sum_queries += static_cast<long double>(run.total_grover_calls);
    sum_final_queries += static_cast<long double>(run.final_round_grover_calls);
    successes += run.success ? 1 : 0;
  }
  row.n_run = included;
  if (included > 0) {
    const long double n = static_cast<long double>(included);
    row.mean_error = static_cast<double>(sum_error / n);
    row.std_error = static_cast<double>(
        std::sqrt(static_cast<double>(sum_error_sq / n)) /
        std::sqrt(static_cast<double>(n)));
    row.success_rate = double(successes) / double(included);
    row.mean_queries = static_cast<double>(sum_queries / n);
    row.mean_final_round_queries = static_cast<double>(sum_final_queries / n);
    row.biased = std::abs(row.mean_error) >= 2.0 * row.std_error;
  }
  return row;
}

// One campaign per grid point; task indices are flattened as
// point_index * n_run + run_index so streams never overlap across points.
inline std::vector<BiasRow> sweep_bias(const std::vector<double>& a_grid,
                                       const IqaeConfig& config,
                                       std::int64_t n_run, bool mitigated,
                                       std::uint64_t master_seed,
                                       int threads = 1) {
  std::vector<BiasRow> rows;
  rows.reserve(a_grid.size());
  for (std::size_t g = 0; g < a_grid.size(); ++g) {
    const std::vector<RunSummary> runs =
        run_campaign(a_grid[g], config, n_run, mitigated, master_seed,
                     std::uint64_t(g) * std::uint64_t(n_run), threads);
    rows.push_back(aggregate_bias(a_grid[g], runs, mitigated));
  }
  return rows;
}

// Empirical decomposition of the bias over the final Grover number.
struct KfinGroup {
  std::int64_t k_fin = 0;
  double probability = 0.0;            // empirical P(k_fin)
  double conditional_mean_error = 0.0; // mean error given k_fin
  std::int64_t count = 0;
};

// Groups runs by k_fin, ascending. The probability-weighted sum of the group
// means reproduces the overall mean error up to summation roundoff.
inline std::vector<KfinGroup> decompose_bias(const std::vector<RunSummary>& runs,
                                             double a) {
  std::vector<std::int64_t> order;
  order.reserve(runs.size());
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (!runs[i].failed) order.push_back(static_cast<std::int64_t>(i));
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::int64_t lhs, std::int64_t rhs) {
                     return runs[std::size_t(lhs)].k_fin <
                            runs[std::size_t(rhs)].k_fin;
                   });
  std::vector<KfinGroup> groups;
  const double total = double(order.size());
  std::size_t pos = 0;
  while (pos < order.size()) {
    const std::int64_t k = runs[std::size_t(order[pos])].k_fin;
    long double sum = 0.0L;
    std::int64_t count = 0;
    while (pos < order.size() && runs[std::size_t(order[pos])].k_fin == k) {
      sum += static_cast<long double>(runs[std::size_t(order[pos])].a_hat) -
             static_cast<long double>(a);
      ++count;
      ++pos;
    }
    KfinGroup group;
    group.k_fin = k;
    group.count = count;
    group.probability = double(count) / total;
    group.conditional_mean_error =
        static_cast<double>(sum / static_cast<long double>(count));
    groups.push_back(group);
  }
  return groups;
}

// Weighted sum of the decomposition, accumulated in extended precision.
inline double weighted_bias(const std::vector<KfinGroup>& groups) {
  long double sum = 0.0L;
  for (const KfinGroup& g : groups) {
    sum += static_cast<long double>(g.probability) *
           static_cast<long double>(g.conditional_mean_error);
  }
  return static_cast<double>(sum);
}

enum class CellStatus { kOk, kInsufficient, kOutOfDomain };

inline const char* to_string(CellStatus s) {
  switch (s) {
    case CellStatus::kOk: return "ok";
    case CellStatus::kInsufficient: return "insufficient";
    case CellStatus::kOutOfDomain: return "out_of_domain";
  }
  return "unknown";
}

// One cell of the conditional-bias landscape: the amplitude adjusted so that
// (k_fin, f_fin) is realized, the number of terminating runs, and the mean
// terminating error (NaN below the termination-count threshold).
struct CondBiasCell {
  std::int64_t k_fin = 0;
  double f_fin = 0.0;
  double a_tilde = std::numeric_limits<double>::quiet_NaN();
  std::int64_t n_run = 0;
  std::int64_t n_end = 0;
  double b_tilde = std::numeric_limits<double>::quiet_NaN();
  CellStatus status = CellStatus::kOk;
};

// Estimates the bias of a single round with the Grover number and f_fin
// pinned. The true amplitude is adjusted to a_tilde so the requested f_fin is
// realized at k_fin; each run is one round, counted only if it terminates.
// If the constructed angle leaves [0, pi/2] the requested f_fin cannot be
// realized by a principal-branch amplitude and the cell is flagged
// out-of-domain rather than silently flipping f.
inline CondBiasCell conditional_bias(std::int64_t k_fin, double f_target,
                                     double a, std::int64_t n_run,
                                     const IqaeConfig& config,
                                     std::uint64_t master_seed,
                                     int threads = 1,
                                     std::uint64_t task_offset = 0,
                                     double nan_threshold = 0.1) {
  if (k_fin < 0) throw std::domain_error("k_fin must be >= 0");
  if (!(f_target >= 0.0 && f_target <= 1.0)) {
    throw std::domain_error("f_fin target must lie in [0, 1]");
  }
  if (!(a > 0.0 && a < 1.0)) {
    throw std::domain_error("amplitude must lie in (0, 1)");
  }
  if (n_run < 1) throw std::domain_error("n_run must be >= 1");
  config.validate();

  CondBiasCell cell;
  cell.k_fin = k_fin;
  cell.f_fin = f_target;
  cell.n_run = n_run;

  const double big_k = double(2 * k_fin + 1);
  const double r_tilde = std::floor(big_k * theta_of_amplitude(a) / kPi);
  if (r_tilde + f_target > double(k_fin) + 0.5) {
    cell.status = CellStatus::kOutOfDomain;
    return cell;
  }
  const double a_tilde =
      detail::square(std::sin((r_tilde + f_target) * kPi / big_k));
  cell.a_tilde = a_tilde;

  const std::int64_t quadrant = static_cast<std::int64_t>(
      std::floor(big_k * theta_of_amplitude(a_tilde) / kHalfPi));
  const double alpha_i = round_alpha(big_k, k_max(config.epsilon), config.alpha);
  const BernoulliOracle oracle(a_tilde);

  std::vector<char> terminated(static_cast<std::size_t>(n_run), 0);
  std::vector<double> errors(static_cast<std::size_t>(n_run), 0.0);
  parallel_for(n_run, threads, [&](std::int64_t i) {
    Xoshiro256pp rng = derive_stream(master_seed, task_offset + std::uint64_t(i));
    QueryLedger ledger;
    const RoundTrace trace = run_round(k_fin, quadrant, alpha_i, config, oracle,
                                       rng, ledger);
    if (trace.exit == RoundExit::kTerminated) {
      terminated[std::size_t(i)] = 1;
      errors[std::size_t(i)] = trace.a_hat - a_tilde;
    }
  });

  long double sum = 0.0L;
  std::int64_t n_end = 0;
  for (std::int64_t i = 0; i < n_run; ++i) {
    if (terminated[std::size_t(i)]) {
      sum += static_cast<long double>(errors[std::size_t(i)]);
      ++n_end;
    }
  }
  cell.n_end = n_end;
  if (double(n_end) >= nan_threshold * double(n_run) && n_end > 0) {
    cell.b_tilde = static_cast<double>(sum / static_cast<long double>(n_end));
  } else {
    cell.status = CellStatus::kInsufficient;
  }
  return cell;
}

// Cartesian product of k values and f targets, one conditional-bias cell
// each, with disjoint stream index ranges per cell.
inline std::vector<CondBiasCell> cond_bias_grid(
    const std::vector<std::int64_t>& k_values, const std::vector<double>& f_grid,
    double a, std::int64_t n_run, const IqaeConfig& config,
    std::uint64_t master_seed, int threads = 1, double nan_threshold = 0.1) {
  if (k_values.empty() || f_grid.empty()) {
    throw std::domain_error("grids must be nonempty");
  }
  std::vector<CondBiasCell> cells;
  cells.reserve(k_values.size() * f_grid.size());
  std::uint64_t cell_index = 0;
  for (std::int64_t k : k_values) {
    for (double f : f_grid) {
      cells.push_back(conditional_bias(k, f, a, n_run, config, master_seed,
                                       threads, cell_index * std::uint64_t(n_run),
                                       nan_threshold));
      ++cell_index;
    }
  }
  return cells;
}

// Best rational approximation theta_a = l pi / (2m) + delta with m <= m_max.
struct Resonance {
  std::int64_t l = 0;
  std::int64_t m = 0;
  double delta = 0.0;  // signed, radians
};

// Finds the coprime (l, m), m <= m_max, minimizing |theta_a - l pi/(2m)|,
// ties to the smaller m. Candidates are the convergents and semiconvergents
// of theta_a / (pi/2); every best one-sided rational approximation is among
// them.
inline Resonance detect_resonance(double a, std::int64_t m_max) {
  if (!(a > 0.0 && a < 1.0)) {
    throw std::domain_error("amplitude must lie in (0, 1)");
  }
  if (m_max < 2) throw std::domain_error("m_max must be >= 2");

  const double theta = theta_of_amplitude(a);
  const double x = theta / kHalfPi;  // in (0, 1)

  Resonance best;
  double best_abs = std::numeric_limits<double>::infinity();
  auto consider = [&](std::int64_t l, std::int64_t m) {
    const double delta = theta - double(l) * kHalfPi / double(m);
    const double mag = std::abs(delta);
    if (mag < best_abs || (mag == best_abs && m < best.m)) {
      best = {l, m, delta};
      best_abs = mag;
    }
  };

  // H_{-1} = 1/0 and H_0 = 0/1; x in (0,1) means the zeroth term is 0.
  std::int64_t p_prev = 1, q_prev = 0;
  std::int64_t p_cur = 0, q_cur = 1;
  double rem = x;
  for (int depth = 0; depth < 128; ++depth) {
    if (!(rem > 0.0)) break;  // exact rational reached
    const double inv = 1.0 / rem;
    double term_d = std::floor(inv);
    std::int64_t term = term_d < 9.0e18
                            ? static_cast<std::int64_t>(term_d)
                            : m_max + 1;  // effectively infinite tail
    bool exhausted = false;
    for (std::int64_t t = 1; t <= term; ++t) {
      const std::int64_t q = q_prev + t * q_cur;
      if (q > m_max) {
        exhausted = true;
        break;
      }
      consider(p_prev + t * p_cur, q);
    }
    if (exhausted) break;
    const std::int64_t p_next = term * p_cur + p_prev;
    const std::int64_t q_next = term * q_cur + q_prev;
    p_prev = p_cur;
    q_prev = q_cur;
    p_cur = p_next;
    q_cur = q_next;
    rem = inv - term_d;
  }
  return best;
}

}  // namespace iqae
