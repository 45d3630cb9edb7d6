// Measurement oracle that stands in for shots on G^k|Phi>, plus query
// accounting. The Bernoulli backend draws each shot from Be(a_k) with
// a_k = sin^2((2k+1) theta_a), which is distribution-identical to measuring
// the amplified state.
#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "iqae/estimation.hpp"
#include "iqae/rng.hpp"

namespace iqae {

// Tallies of oracle usage. One shot at Grover number k costs k applications
// of G and one state preparation A; k = 0 shots are free in G.
struct QueryLedger {
  std::uint64_t grover_calls = 0;
  std::uint64_t state_preparations = 0;

  void record(std::int64_t k, std::int64_t n) {
    grover_calls += std::uint64_t(k) * std::uint64_t(n);
    state_preparations += std::uint64_t(n);
  }

  void merge(const QueryLedger& other) {
    grover_calls += other.grover_calls;
    state_preparations += other.state_preparations;
  }
};

// Source of measurement outcomes for a given Grover number. Implementations
// must be immutable after construction; all run-to-run randomness comes from
// the caller-owned stream.
class AmplitudeOracle {
 public:
  virtual ~AmplitudeOracle() = default;

  // Number of |phi1> outcomes in n measurements of G^k|Phi>.
  virtual std::int64_t sample(std::int64_t k, std::int64_t n,
                              Xoshiro256pp& rng) const = 0;
};

// Classical simulation backend: n independent Bernoulli(a_k) draws.
class BernoulliOracle final : public AmplitudeOracle {
 public:
  explicit BernoulliOracle(double a)
      : amplitude_(detail::checked_unit(a, "amplitude")),
        theta_(theta_of_amplitude(amplitude_)) {}

  double amplitude() const { return amplitude_; }

  std::int64_t sample(std::int64_t k, std::int64_t n,
                      Xoshiro256pp& rng) const override {
    const double p = success_probability(k);
    std::int64_t hits = 0;
    for (std::int64_t i = 0; i < n; ++i) {
      hits += rng.next_double() < p ? 1 : 0;
    }
    return hits;
  }

  double success_probability(std::int64_t k) const {
    if (k == 0) return amplitude_;
    const double s = std::sin(double(2 * k + 1) * theta_);
    return s * s;
  }

 private:
  double amplitude_;
  double theta_;
};

// Draws one batch of shots and charges it to the ledger.
inline std::int64_t sample_shots(const AmplitudeOracle& oracle, std::int64_t k,
                                 std::int64_t n, Xoshiro256pp& rng,
                                 QueryLedger& ledger) {
  if (n < 1) throw std::domain_error("batch size must be >= 1");
  if (k < 0) throw std::domain_error("grover number must be >= 0");
  const std::int64_t n1 = oracle.sample(k, n, rng);
  ledger.record(k, n);
  return n1;
}

}  // namespace iqae
