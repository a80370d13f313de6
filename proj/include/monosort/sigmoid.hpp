#pragma once

// Sigmoid family used to relax the conditional swaps of a sorting network.
// All functions here are evaluated at the natural scale; callers apply the
// inverse-temperature beta to the argument themselves (see swap.hpp).

#include <optional>
#include <string_view>

namespace monosort {

enum class SigmoidKind {
  Logistic,       // classic logistic CDF
  LogisticArt,    // logistic with activation-replacement-trick input warping
  Reciprocal,     // z / (1 + 2|z|) + 1/2
  Cauchy,         // arctan(z)/pi + 1/2
  Optimal,        // piecewise 1/(16z) tails, linear core; tight error bound
};

// Parameters of the family. lambda/epsilon_art only affect LogisticArt,
// whose input warping is phi(z) = z / (|z|^lambda + epsilon_art).
struct SigmoidSpec {
  SigmoidKind kind = SigmoidKind::Optimal;
  double lambda = 0.25;        // ART warp exponent, in [0, 1]
  double epsilon_art = 1e-10;  // ART warp guard against division by zero
};

const char* to_string(SigmoidKind kind);

// Accepts the canonical lower-case names ("logistic", "logistic_art",
// "reciprocal", "cauchy", "optimal"); returns nullopt otherwise.
std::optional<SigmoidKind> parse_sigmoid_kind(std::string_view name);

// f(z). Monotone non-decreasing, f(z) + f(-z) = 1, f(0) = 1/2.
// Throws std::domain_error for non-finite z, std::invalid_argument for a
// malformed spec (lambda outside [0,1] or epsilon <= 0).
double eval(const SigmoidSpec& spec, double z);

// f'(z), exact (no finite differences). At the Optimal kind's C^0 kink
// points z = +-1/4 the linear-branch value 1 is used. Same error behavior
// as eval().
double deriv(const SigmoidSpec& spec, double z);

// Supremum of f' at natural scale: 1/4 logistic, 1 reciprocal, 1/pi cauchy,
// 1 optimal. Throws std::invalid_argument for LogisticArt, whose derivative
// is unbounded near 0.
double lipschitz_constant(const SigmoidSpec& spec);

// True for the kinds whose relaxed swap is monotone in its inputs
// (Reciprocal, Cauchy, Optimal); false for Logistic and LogisticArt.
bool is_monotonic_kind(SigmoidKind kind);

}  // namespace monosort
