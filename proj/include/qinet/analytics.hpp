// Copyright 2026 The qinet Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Closed-form quantities of GCRM.
//
// With q = alpha (1 + alpha), an agent at any position i of a length-n path
// who splits into lambda + 1 consecutive identities collects
//
//   sum_{k=0..lambda} x(i+k, n+lambda) = f(alpha, lambda) * x(i, n),
//   f(alpha, lambda) = (1 - q^(lambda+1)) / ((1+alpha)^lambda (1 - q)),
//
// independent of i and n. The reference expression for the maximiser of f in lambda,
//
//   log(-log(1+alpha) / (q log(alpha))) / (log(alpha) * log(1+alpha)),
//
// is kept as lambda_prime(). Setting the lambda-derivative of f to zero gives
// the same numerator over log(alpha) + log(1+alpha) instead; that is
// lambda_prime_stationary(), and the integer maximiser is taken from it.

#ifndef QINET_ANALYTICS_HPP
#define QINET_ANALYTICS_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>

#include "qinet/error.hpp"
#include "qinet/mechanisms.hpp"

namespace qinet {

namespace detail {

inline void require_alpha(double alpha) {
  require(alpha > 0.0 && alpha < 1.0,
          "alpha must lie in (0, 1), got " + std::to_string(alpha));
}

}  // namespace detail

// f(alpha, lambda) as alpha^lambda * sum_{k=0..lambda} q^-k.
inline double sybil_factor_series(double alpha, int lambda) {
  detail::require_alpha(alpha);
  detail::require(lambda >= 1, "lambda must be at least 1");
  const double inv_q = 1.0 / (alpha * (1.0 + alpha));
  double sum = 0.0;
  double term = 1.0;
  for (int k = 0; k <= lambda; ++k) {
    sum += term;
    term *= inv_q;
  }
  return std::pow(alpha, lambda) * sum;
}

// Closed form, rearranged as ((1+alpha)^-lambda - alpha^(lambda+1) (1+alpha))
// / (1 - q) so large lambda cannot overflow. Sums inside the golden band.
inline double sybil_factor(double alpha, int lambda) {
  detail::require_alpha(alpha);
  detail::require(lambda >= 1, "lambda must be at least 1");
  if (near_golden(alpha)) return sybil_factor_series(alpha, lambda);
  const double q = alpha * (1.0 + alpha);
  return (std::pow(1.0 + alpha, -lambda) -
          std::pow(alpha, lambda + 1) * (1.0 + alpha)) /
         (1.0 - q);
}

// Nearest integer, halves away from zero, floored at 1 (a count of attacks
// or agents is at least one).
inline int nearest_count(double x) {
  if (!(x >= 1.0)) return 1;
  return static_cast<int>(std::lround(x));
}

// Reference expression for the reward-maximising Sybil count.
inline double lambda_prime(double alpha) {
  detail::require_alpha(alpha);
  const double la = std::log(alpha);
  const double l1a = std::log1p(alpha);
  return std::log(-l1a / (alpha * (1.0 + alpha) * la)) / (la * l1a);
}

// Root of d f / d lambda. At the golden point f = (lambda + 1) alpha^lambda,
// whose maximiser is -1 / log(alpha) - 1.
inline double lambda_prime_stationary(double alpha) {
  detail::require_alpha(alpha);
  const double la = std::log(alpha);
  const double l1a = std::log1p(alpha);
  if (near_golden(alpha)) return -1.0 / la - 1.0;
  return std::log(-l1a / (alpha * (1.0 + alpha) * la)) / (la + l1a);
}

// Integer lambda >= 1 maximising f. f is a difference of two exponentials in
// lambda, hence unimodal, so the answer is a neighbour of the stationary point.
inline int sybil_maximizer(double alpha) {
  const double s = lambda_prime_stationary(alpha);
  const int lo = std::max(1, static_cast<int>(std::floor(s)));
  const int hi = std::max(1, static_cast<int>(std::ceil(s)));
  return sybil_factor(alpha, hi) > sybil_factor(alpha, lo) ? hi : lo;
}

// Smallest lambda with f(alpha, lambda) <= 1, by linear scan.
inline int lambda_star(double alpha, int search_cap = 10000) {
  detail::require_alpha(alpha);
  detail::require(search_cap >= 1, "search cap must be positive");
  for (int lambda = 1; lambda <= search_cap; ++lambda) {
    if (sybil_factor(alpha, lambda) <= 1.0) return lambda;
  }
  const double at_cap = sybil_factor(alpha, search_cap);
  throw SearchExhausted("no lambda <= " + std::to_string(search_cap) +
                            " has f <= 1 (f at cap = " +
                            std::to_string(at_cap) + ")",
                        at_cap);
}

// Stationary point of the GCRM path total in n. Undefined on the golden band,
// where the total is n alpha^n budget.
inline std::optional<double> n_prime(double alpha) {
  detail::require_alpha(alpha);
  if (near_golden(alpha)) return std::nullopt;
  const double la = std::log(alpha);
  const double l1a = std::log1p(alpha);
  return std::log(-l1a / la) / (la + l1a);
}

// Integer n >= 1 maximising the GCRM path total. Same unimodality argument as
// sybil_maximizer; on the golden band the stationary point of n alpha^n is
// -1 / log(alpha).
inline int gcrm_total_maximizer(double alpha) {
  const auto np = n_prime(alpha);
  const double s = np ? *np : -1.0 / std::log(alpha);
  const MechanismSpec spec{Family::kGcrm, alpha, 1.0, SpSchedule{}};
  const int lo = std::max(1, static_cast<int>(std::floor(s)));
  const int hi = std::max(1, static_cast<int>(std::ceil(s)));
  return total_reward_closed_form(hi, spec) > total_reward_closed_form(lo, spec)
             ? hi
             : lo;
}

struct SybilProfile {
  double alpha = 0.0;
  std::map<int, double> f_values;  // lambda -> f(alpha, lambda)
  double lambda_prime = 0.0;       // reference expression
  int rounded_lambda_prime = 1;    // nearest_count(lambda_prime)
  double peak_ratio = 0.0;         // f(alpha, rounded_lambda_prime)
  double lambda_prime_stationary = 0.0;
  int maximizer = 1;               // true integer argmax
  double max_ratio = 0.0;          // f(alpha, maximizer)
  int lambda_star = 1;
};

inline SybilProfile make_sybil_profile(double alpha, int lambda_max,
                                       int search_cap = 10000) {
  detail::require(lambda_max >= 1, "lambda_max must be at least 1");
  SybilProfile p;
  p.alpha = alpha;
  for (int l = 1; l <= lambda_max; ++l) p.f_values[l] = sybil_factor(alpha, l);
  p.lambda_prime = lambda_prime(alpha);
  p.rounded_lambda_prime = nearest_count(p.lambda_prime);
  p.peak_ratio = sybil_factor(alpha, p.rounded_lambda_prime);
  p.lambda_prime_stationary = lambda_prime_stationary(alpha);
  p.maximizer = sybil_maximizer(alpha);
  p.max_ratio = sybil_factor(alpha, p.maximizer);
  p.lambda_star = lambda_star(alpha, search_cap);
  return p;
}

}  // namespace qinet

#endif  // QINET_ANALYTICS_HPP
