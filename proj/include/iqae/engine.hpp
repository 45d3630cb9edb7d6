// Iterative amplitude estimation engine: the adaptive Grover-number search,
// the shot-accumulating round runner, the full estimation loop, and the
// re-execution variant that repeats the final round to reduce estimator bias.
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "iqae/estimation.hpp"
#include "iqae/sampler.hpp"

namespace iqae {

struct IqaeConfig {
  double epsilon = 1e-3;        // target accuracy on a
  double alpha = 0.05;          // overall failure budget
  std::int64_t n_shot = 1;      // shots per batch before re-checking exits
  double r_min = 2.0;           // minimum growth ratio of K between rounds
  std::int64_t max_rounds = 10000;

  void validate() const {
    if (!(epsilon > 0.0 && epsilon < 1.0))
      throw std::domain_error("epsilon must lie in (0, 1)");
    if (!(alpha > 0.0 && alpha < 1.0))
      throw std::domain_error("alpha must lie in (0, 1)");
    if (n_shot < 1) throw std::domain_error("n_shot must be >= 1");
    if (!(r_min > 1.0)) throw std::domain_error("r_min must be > 1");
    if (max_rounds < 1) throw std::domain_error("max_rounds must be >= 1");
  }
};

// Thrown when the engine hits its round cap without terminating. This is a
// diagnostic, not part of the algorithm: with the default cap it indicates a
// misconfiguration rather than bad luck.
struct RoundLimitExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class RoundExit { kTerminated, kNextK, kBudgetExhausted };

inline const char* to_string(RoundExit e) {
  switch (e) {
    case RoundExit::kTerminated: return "terminated";
    case RoundExit::kNextK: return "next_k";
    case RoundExit::kBudgetExhausted: return "budget_exhausted";
  }
  return "unknown";
}

// Snapshot of one round at its exit.
struct RoundTrace {
  std::int64_t index = 0;     // 1-based round number
  std::int64_t k = 0;         // Grover number k_i
  std::int64_t quadrant = 0;  // R_i
  double alpha_i = 0.0;
  std::int64_t shots = 0;     // N at round end
  std::int64_t hits = 0;      // N^1 at round end
  double a_hat_k = 0.0;
  double a_hat = 0.0;
  ConfidenceInterval ci_a;
  ConfidenceInterval ci_theta;
  double delta_a = 0.0;
  std::uint64_t grover_calls = 0;
  RoundExit exit = RoundExit::kTerminated;
  std::int64_t next_k = 0;  // meaningful when exit == kNextK
};

struct RunResult {
  double a_hat = 0.0;
  std::vector<RoundTrace> rounds;
  std::int64_t k_fin = 0;  // Grover number of the terminating round
  std::int64_t n_fin = 0;  // total shots in the terminating round
  std::int64_t r_fin = 0;  // quadrant index of the terminating round
  std::uint64_t total_grover_calls = 0;
  std::uint64_t final_round_grover_calls = 0;
  QueryLedger ledger;
  bool mitigated = false;
  std::int64_t reexec_shots = 0;  // mitigation round, when mitigated
  std::int64_t reexec_hits = 0;

  // Filled by annotate() once the true amplitude is known.
  double error = std::numeric_limits<double>::quiet_NaN();
  double f_fin = std::numeric_limits<double>::quiet_NaN();
  bool success = false;
};

// Largest odd K worth trying for a given target accuracy; used to cap the
// FindNextK descent when the interval width underflows.
inline std::int64_t next_k_start_cap(double epsilon) {
  return 2 * static_cast<std::int64_t>(std::ceil(k_max(epsilon))) + 1;
}

// Greedy search for the next Grover number: the largest odd K, descending
// from floor((pi/2)/(theta_hi-theta_lo)), for which [K theta_lo, K theta_hi]
// fits in a single quadrant and K >= r_min (2 k_i + 1). Returns k_i when no
// such K exists.
inline std::int64_t find_next_k(
    std::int64_t k_i, double theta_lo, double theta_hi, double r_min,
    std::int64_t k_start_cap = (std::int64_t(1) << 56) + 1) {
  if (k_i < 0) throw std::domain_error("grover number must be >= 0");
  if (!(theta_lo >= 0.0 && theta_lo <= theta_hi && theta_hi <= kHalfPi)) {
    throw std::domain_error("angle interval must satisfy 0 <= lo <= hi <= pi/2");
  }
  if (!(r_min > 1.0)) throw std::domain_error("r_min must be > 1");
  if (k_start_cap < 1) throw std::domain_error("k_start_cap must be >= 1");

  const double width = theta_hi - theta_lo;
  std::int64_t big_k = k_start_cap;
  if (width > 0.0 && kHalfPi / width < double(k_start_cap)) {
    big_k = static_cast<std::int64_t>(std::floor(kHalfPi / width));
  }
  if (big_k % 2 == 0) --big_k;

  const double big_k_min = r_min * double(2 * k_i + 1);
  while (double(big_k) >= big_k_min) {
    const double lo_quad = std::floor(double(big_k) * theta_lo / kHalfPi);
    const double hi_quad = std::ceil(double(big_k) * theta_hi / kHalfPi);
    if (lo_quad == hi_quad - 1.0) return (big_k - 1) / 2;
    big_k -= 2;
  }
  return k_i;
}

// One round at fixed Grover number k and quadrant index: accumulate shots in
// batches of n_shot, recomputing the interval after each batch, until the
// accuracy target is met, a larger Grover number becomes identifiable, or
// the round's shot budget runs out.
inline RoundTrace run_round(std::int64_t k, std::int64_t quadrant,
                            double alpha_i, const IqaeConfig& config,
                            const AmplitudeOracle& oracle, Xoshiro256pp& rng,
                            QueryLedger& ledger, std::int64_t round_index = 1) {
  const std::int64_t n_max = max_shots(alpha_i);
  const std::int64_t k_cap = next_k_start_cap(config.epsilon);
  const RoundParams params{k, alpha_i, n_max, quadrant};
  const std::uint64_t grover_before = ledger.grover_calls;

  RoundTrace trace;
  trace.index = round_index;
  trace.k = k;
  trace.quadrant = quadrant;
  trace.alpha_i = alpha_i;

  std::int64_t shots = 0;
  std::int64_t hits = 0;
  CountEstimate est;
  for (;;) {
    const std::int64_t batch = std::min(config.n_shot, n_max - shots);
    hits += sample_shots(oracle, k, batch, rng, ledger);
    shots += batch;
    est = ci_from_counts(hits, shots, params);
    if (est.delta_a <= config.epsilon) {
      trace.exit = RoundExit::kTerminated;
      break;
    }
    const std::int64_t next =
        find_next_k(k, est.ci_theta.lo, est.ci_theta.hi, config.r_min, k_cap);
    if (next > k) {
      trace.exit = RoundExit::kNextK;
      trace.next_k = next;
      break;
    }
    if (shots >= n_max) {
      trace.exit = RoundExit::kBudgetExhausted;
      break;
    }
  }

  trace.shots = shots;
  trace.hits = hits;
  trace.a_hat_k = est.a_hat_k;
  trace.a_hat = est.a_hat;
  trace.ci_a = est.ci_a;
  trace.ci_theta = est.ci_theta;
  trace.delta_a = est.delta_a;
  trace.grover_calls = ledger.grover_calls - grover_before;
  return trace;
}

namespace detail {

inline void fill_run_totals(RunResult& result) {
  const RoundTrace& last = result.rounds.back();
  result.a_hat = last.a_hat;
  result.k_fin = last.k;
  result.n_fin = last.shots;
  result.r_fin = last.quadrant;
  result.final_round_grover_calls = last.grover_calls;
  result.total_grover_calls = result.ledger.grover_calls;
}

}  // namespace detail

// Full estimation run: rounds chained with k_1 = 0, the quadrant index taken
// from the previous round's lower angle bound, and the per-round budget
// alpha_i proportional to K_i / K_max. A round that exhausts its budget with
// no exit restarts at the same k with a fresh budget; the round cap turns a
// pathological loop into a diagnostic error.
inline RunResult run_iqae(const IqaeConfig& config,
                          const AmplitudeOracle& oracle, Xoshiro256pp& rng) {
  config.validate();
  const double k_max_value = k_max(config.epsilon);

  RunResult result;
  std::int64_t k = 0;
  double theta_lo_last = 0.0;
  for (std::int64_t i = 1; i <= config.max_rounds; ++i) {
    const std::int64_t big_k = 2 * k + 1;
    const double alpha_i = round_alpha(double(big_k), k_max_value, config.alpha);
    const std::int64_t quadrant = static_cast<std::int64_t>(
        std::floor(double(big_k) * theta_lo_last / kHalfPi));
    RoundTrace trace = run_round(k, quadrant, alpha_i, config, oracle, rng,
                                 result.ledger, i);
    result.rounds.push_back(trace);
    switch (trace.exit) {
      case RoundExit::kTerminated:
        detail::fill_run_totals(result);
        return result;
      case RoundExit::kNextK:
        k = trace.next_k;
        theta_lo_last = trace.ci_theta.lo;
        break;
      case RoundExit::kBudgetExhausted:
        theta_lo_last = trace.ci_theta.lo;
        break;
    }
  }
  throw RoundLimitExceeded("round cap reached after " +
                           std::to_string(config.max_rounds) + " rounds");
}

// Re-execution variant: run the full estimation, then repeat the final round
// with the same Grover number and shot count but no stopping rule, and take
// the repeated round's MLE as the output.
inline RunResult run_mitigated(const IqaeConfig& config,
                               const AmplitudeOracle& oracle,
                               Xoshiro256pp& rng) {
  RunResult result = run_iqae(config, oracle, rng);
  const std::int64_t n1 =
      sample_shots(oracle, result.k_fin, result.n_fin, rng, result.ledger);
  const double frac = double(n1) / double(result.n_fin);
  const double gamma = gamma_branch(frac, result.r_fin);
  const double theta =
      (double(result.r_fin) * kHalfPi + gamma) / double(2 * result.k_fin + 1);
  result.a_hat = detail::square(std::sin(theta));
  result.mitigated = true;
  result.reexec_shots = result.n_fin;
  result.reexec_hits = n1;
  result.total_grover_calls = result.ledger.grover_calls;
  return result;
}

// frac((2k+1) theta_a / pi): locates the final-round success probability on
// its quarter-period lattice. Together with k it pins the conditional bias.
inline double f_fin_of(double a, std::int64_t k) {
  if (k < 0) throw std::domain_error("grover number must be >= 0");
  const double x = double(2 * k + 1) * theta_of_amplitude(a) / kPi;
  return x - std::floor(x);
}

// Fills the fields that require knowledge of the true amplitude.
inline void annotate(RunResult& result, double true_amplitude, double epsilon) {
  result.error = result.a_hat - true_amplitude;
  result.success = std::abs(result.error) <= epsilon;
  result.f_fin = f_fin_of(true_amplitude, result.k_fin);
}

}  // namespace iqae
