#pragma once

// Relaxed conditional swap: the differentiable surrogate for a single
// comparator wire pair. softmin/softmax are convex combinations steered by
// v = f(beta (b - a)), so outputs are always within [min(a,b), max(a,b)].

#include <array>

#include "monosort/sigmoid.hpp"

namespace monosort {

// Sigmoid choice plus inverse temperature. beta must be finite and > 0;
// every swap entry point throws std::invalid_argument otherwise.
struct SwapConfig {
  SigmoidSpec sigmoid;
  double beta = 1.0;
};

struct SwapOutcome {
  double lo;     // soft minimum of (a, b)
  double hi;     // soft maximum of (a, b)
  double blend;  // v = f(beta (b - a)), the mixing weight
};

// lo = a v + b (1 - v), hi = a (1 - v) + b v with v = f(beta (b - a)).
// Throws std::domain_error for non-finite a or b.
SwapOutcome soft_swap(const SwapConfig& cfg, double a, double b);

// The 2x2 doubly stochastic block [[v, 1-v], [1-v, v]] such that
// (lo, hi) = block * (a, b). Row-major.
std::array<std::array<double, 2>, 2> swap_block(const SwapConfig& cfg,
                                                double a, double b);

struct SwapGrad {
  double d_a;
  double d_b;
};

// Exact VJP of (lo, hi) with respect to (a, b): given cotangents
// (d_lo, d_hi), returns (d_a, d_b). Uses f' analytically, including the
// dependence of v on the inputs.
SwapGrad swap_grad(const SwapConfig& cfg, double a, double b,
                   double d_lo, double d_hi);

}  // namespace monosort
