#include "monosort/swap.hpp"

#include <cmath>
#include <stdexcept>

namespace monosort {

namespace {

void check_config(const SwapConfig& cfg) {
  if (!(cfg.beta > 0.0) || !std::isfinite(cfg.beta))
    throw std::invalid_argument("swap: beta must be finite and > 0");
}

void check_inputs(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b))
    throw std::domain_error("swap: non-finite input");
}

// Canonical weight pair for a comparator. The sigmoid is evaluated once, at
// the non-positive argument -beta|b - a|, so the result depends only on the
// unordered input pair: this makes soft_swap bit-exactly commutative. The
// pair (small, big) is constructed so that small + big == 1.0 exactly in
// floating point (big = fl(1 - small) lies in [1/2, 1], hence 1 - big is
// exact by Sterbenz and equals the re-rounded small).
struct WeightPair {
  double small;  // weight of the farther input, f(-beta|a-b|) in [0, 1/2]
  double big;    // weight of the nearer input, in [1/2, 1]
};

WeightPair weights(const SwapConfig& cfg, double a, double b) {
  const double u = eval(cfg.sigmoid, -cfg.beta * std::abs(b - a));
  const double big = 1.0 - u;
  return {1.0 - big, big};
}

}  // namespace

SwapOutcome soft_swap(const SwapConfig& cfg, double a, double b) {
  check_config(cfg);
  check_inputs(a, b);
  const WeightPair w = weights(cfg, a, b);
  const double p = std::min(a, b);
  const double q = std::max(a, b);
  SwapOutcome out;
  out.lo = q * w.small + p * w.big;
  out.hi = p * w.small + q * w.big;
  // blend is the weight of `a` in lo, i.e. f(beta (b - a)).
  out.blend = b >= a ? w.big : w.small;
  return out;
}

std::array<std::array<double, 2>, 2> swap_block(const SwapConfig& cfg,
                                                double a, double b) {
  const SwapOutcome out = soft_swap(cfg, a, b);
  const double v = out.blend;
  const double o = 1.0 - v;  // exact complement: v + o == 1.0
  return {{{v, o}, {o, v}}};
}

SwapGrad swap_grad(const SwapConfig& cfg, double a, double b,
                   double d_lo, double d_hi) {
  check_config(cfg);
  check_inputs(a, b);
  const double delta = b - a;
  const double v = soft_swap(cfg, a, b).blend;
  // f' is even (odd symmetry of f around 1/2), so the sign of the argument
  // does not matter.
  const double vp = cfg.beta * deriv(cfg.sigmoid, cfg.beta * delta);
  // d lo/d a = v + delta vp,  d lo/d b = (1-v) - delta vp,
  // d hi/d a = (1-v) - delta vp,  d hi/d b = v + delta vp.
  const double s = v + delta * vp;
  const double t = (1.0 - v) - delta * vp;
  return {d_lo * s + d_hi * t, d_lo * t + d_hi * s};
}

}  // namespace monosort
