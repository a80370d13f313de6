#pragma once

// Differentiable execution of a comparator plan: forward pass producing the
// relaxed sort and the relaxed permutation matrix, exact reverse-mode
// gradients, and the ordering losses/metrics built on top of them.

#include <cstdint>
#include <span>
#include <vector>

#include "monosort/swap.hpp"
#include "monosort/topology.hpp"

namespace monosort {

// One executed comparator: wire pair plus everything the backward pass
// needs to avoid recomputing sigmoids (inputs a, b and blend v).
struct SwapRecord {
  int i;
  int j;
  double v;
  double a;
  double b;
};

struct SortResult {
  int n = 0;
  std::vector<double> x_hat;  // relaxed ascending sort of the input
  std::vector<double> p;      // n*n row-major; rows = output ranks,
                              // columns = inputs; x_hat == p * x
  NetworkPlan plan;
  SwapConfig config;
  std::vector<std::vector<SwapRecord>> cache;  // one entry per layer
};

// Runs the plan on x. P starts at identity and each comparator
// left-multiplies its doubly stochastic 2x2 block, so P stays doubly
// stochastic throughout. Throws std::invalid_argument if x.size() != plan.n
// and std::domain_error for non-finite inputs.
SortResult forward(std::span<const double> x, const NetworkPlan& plan,
                   const SwapConfig& cfg);

// Reverse-mode sweep over the cached records. grad_x_hat is the cotangent
// of x_hat (size n); grad_p, if non-empty, is the cotangent of P (size n*n,
// row-major). Returns dL/dx. Empty grad_p means the loss does not touch P.
std::vector<double> backward(const SortResult& result,
                             std::span<const double> grad_x_hat,
                             std::span<const double> grad_p = {});

// Hard permutation: rank r is assigned to the input holding the r-th
// smallest value, ties broken by input index (stable).
struct GroundTruthPerm {
  int n = 0;
  std::vector<int> rank_to_input;  // Q[r][rank_to_input[r]] = 1

  // Row-major dense 0/1 matrix, same layout as SortResult::p.
  std::vector<double> dense() const;
};

GroundTruthPerm hard_rank_perm(std::span<const double> y);

// Row-wise categorical cross-entropy between the relaxed permutation P and
// the hard target Q: -(1/n) sum_r log(clamp(P[r][q(r)], 1e-12, 1)).
double cross_entropy_loss(std::span<const double> p, const GroundTruthPerm& q);

// dL/dP for the loss above, row-major n*n. Zero wherever the clamp is
// active, -1/(n P) on the targeted entries otherwise.
std::vector<double> cross_entropy_grad_p(std::span<const double> p,
                                         const GroundTruthPerm& q);

struct RankMetrics {
  bool exact_match = false;  // all ranks agree
  double element_rate = 0.0; // fraction of positions ranked correctly
};

// Compares the hard ranking of predicted scores against the hard ranking of
// the ground-truth values (sizes must match).
RankMetrics rank_metrics(std::span<const double> scores,
                         std::span<const double> truth);

}  // namespace monosort
