// Deterministic math kernel for iterative amplitude estimation:
// amplitude/angle conversions, Grover-amplified success probabilities,
// quadrant-aware angle inversion, Chernoff-Hoeffding interval widths and
// per-round shot budgets.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

namespace iqae {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kHalfPi = kPi / 2.0;

namespace detail {

// Values that should lie in [0,1] are allowed to carry up to 1e-12 of
// floating-point dust before being rejected as genuine domain violations.
inline double checked_unit(double x, const char* what) {
  constexpr double kDust = 1e-12;
  if (!(x >= -kDust && x <= 1.0 + kDust)) {
    throw std::domain_error(std::string(what) + " outside [0,1]: " +
                            std::to_string(x));
  }
  return std::clamp(x, 0.0, 1.0);
}

inline double square(double x) { return x * x; }

}  // namespace detail

// theta_a = arcsin(sqrt(a)), in [0, pi/2].
inline double theta_of_amplitude(double a) {
  return std::asin(std::sqrt(detail::checked_unit(a, "amplitude")));
}

// Inverse of theta_of_amplitude: a = sin^2(theta).
inline double amplitude_of_theta(double theta) {
  if (!(theta >= -1e-12 && theta <= kHalfPi + 1e-12)) {
    throw std::domain_error("angle outside [0, pi/2]: " + std::to_string(theta));
  }
  return detail::square(std::sin(std::clamp(theta, 0.0, kHalfPi)));
}

// a_k = sin^2((2k+1) * theta_a): the success probability after k Grover
// iterations. k = 0 returns a itself, exactly.
inline double grover_amplitude(double a, std::int64_t k) {
  if (k < 0) throw std::domain_error("grover number must be >= 0");
  const double checked = detail::checked_unit(a, "amplitude");
  if (k == 0) return checked;
  const double s = std::sin(double(2 * k + 1) * theta_of_amplitude(checked));
  return s * s;
}

// Quadrant-dependent inversion of a measured probability back to an angle
// within one quarter-period: arcsin(sqrt(a')) for even r, and the mirrored
// pi/2 - arcsin(sqrt(a')) for odd r.
inline double gamma_branch(double a_prime, std::int64_t r) {
  if (r < 0) throw std::domain_error("quadrant index must be >= 0");
  const double base = std::asin(std::sqrt(detail::checked_unit(a_prime, "probability")));
  return (r % 2 == 0) ? base : kHalfPi - base;
}

// Two-sided Hoeffding half-width sqrt(ln(2/alpha_i) / (2n)).
inline double hoeffding_halfwidth(std::int64_t n, double alpha_i) {
  if (n < 1) throw std::domain_error("shot count must be >= 1");
  if (!(alpha_i > 0.0 && alpha_i < 2.0)) {
    throw std::domain_error("confidence budget must lie in (0, 2)");
  }
  return std::sqrt(std::log(2.0 / alpha_i) / (2.0 * double(n)));
}

// Coefficient of the per-round shot budget, 2 / (sin^2(pi/21) sin^2(8pi/21)).
inline double max_shots_coefficient() {
  static const double c =
      2.0 / (detail::square(std::sin(kPi / 21.0)) *
             detail::square(std::sin(8.0 * kPi / 21.0)));
  return c;
}

// Per-round shot budget, rounded up so the confidence analysis is never
// under-funded.
inline std::int64_t max_shots(double alpha_i) {
  if (!(alpha_i > 0.0 && alpha_i < 2.0)) {
    throw std::domain_error("confidence budget must lie in (0, 2)");
  }
  return static_cast<std::int64_t>(
      std::ceil(max_shots_coefficient() * std::log(2.0 / alpha_i)));
}

// K_max = pi / (4 epsilon), kept as a real value.
inline double k_max(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw std::domain_error("target accuracy must lie in (0, 1)");
  }
  return kPi / (4.0 * epsilon);
}

// Per-round failure budget alpha_i = (2 alpha / 3) * (K / K_max).
inline double round_alpha(double big_k, double k_max_value, double alpha) {
  if (!(big_k >= 1.0)) throw std::domain_error("K must be >= 1");
  if (!(k_max_value > 0.0)) throw std::domain_error("K_max must be > 0");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::domain_error("failure budget must lie in (0, 1)");
  }
  return (2.0 * alpha / 3.0) * (big_k / k_max_value);
}

enum class Domain { kAmplitude, kAngle };

struct ConfidenceInterval {
  double lo = 0.0;
  double hi = 0.0;
  Domain domain = Domain::kAmplitude;

  double width() const { return hi - lo; }
  bool contains(double x) const { return lo <= x && x <= hi; }
};

// Parameters of a single estimation round with Grover number k.
struct RoundParams {
  std::int64_t k = 0;        // Grover number k_i
  double alpha_i = 0.0;      // per-round confidence budget
  std::int64_t n_max = 1;    // shot budget for the round
  std::int64_t quadrant = 0; // quadrant index R_i

  std::int64_t big_k() const { return 2 * k + 1; }
};

// Everything derived from the counts of one round: MLEs of a_k and a, the
// clamped probability interval mapped through the quadrant inversion into
// angle and amplitude intervals, and the estimated accuracy of a_hat.
struct CountEstimate {
  double a_hat_k = 0.0;
  double a_hat = 0.0;
  double theta_hat = 0.0;
  ConfidenceInterval ci_a;
  ConfidenceInterval ci_theta;
  double delta_a = 0.0;
};

// MLE and confidence intervals from n1 successes out of n shots.
// The odd-quadrant branch reverses monotonicity, so both derived intervals
// are returned sorted (lo <= hi).
inline CountEstimate ci_from_counts(std::int64_t n1, std::int64_t n,
                                    const RoundParams& params) {
  if (n < 1) throw std::domain_error("shot count must be >= 1");
  if (n1 < 0 || n1 > n) throw std::domain_error("success count outside [0, n]");

  const double big_k = double(params.big_k());
  const double a_hat_k = double(n1) / double(n);
  const double half = hoeffding_halfwidth(n, params.alpha_i);
  const double ak_lo = std::max(0.0, a_hat_k - half);
  const double ak_hi = std::min(1.0, a_hat_k + half);

  const double base = double(params.quadrant) * kHalfPi;
  const double theta_hat = (base + gamma_branch(a_hat_k, params.quadrant)) / big_k;
  double theta_lo = (base + gamma_branch(ak_lo, params.quadrant)) / big_k;
  double theta_hi = (base + gamma_branch(ak_hi, params.quadrant)) / big_k;
  if (theta_lo > theta_hi) std::swap(theta_lo, theta_hi);

  const double a_hat = detail::square(std::sin(theta_hat));
  double a_lo = detail::square(std::sin(theta_lo));
  double a_hi = detail::square(std::sin(theta_hi));
  if (a_lo > a_hi) std::swap(a_lo, a_hi);

  CountEstimate est;
  est.a_hat_k = a_hat_k;
  est.a_hat = a_hat;
  est.theta_hat = theta_hat;
  est.ci_a = {a_lo, a_hi, Domain::kAmplitude};
  est.ci_theta = {theta_lo, theta_hi, Domain::kAngle};
  est.delta_a = std::max(a_hat - a_lo, a_hi - a_hat);
  return est;
}

}  // namespace iqae
