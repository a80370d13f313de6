#pragma once

// Comparator schedules. A plan is a list of layers; each layer is a set of
// disjoint wire pairs (i, j) with i < j that can fire in parallel. Plans are
// data, independent of the sigmoid relaxation that later executes them.

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace monosort {

using Layer = std::vector<std::pair<int, int>>;

struct NetworkPlan {
  int n = 0;                  // number of wires
  std::vector<Layer> layers;  // executed front to back
};

// Odd-even transposition sort: layer k compares (i, i+1) for i of parity
// k mod 2. Exactly n layers (n = 1 yields one empty layer, a no-op pass).
// Throws std::invalid_argument for n < 1.
NetworkPlan odd_even_plan(int n);

// Bitonic sort for n a power of two >= 2, in the direction-normalized form:
// every comparator orders ascending. Stage m = 2,4,...,n first merges
// mirrored pairs (i, m-1-i) within each block, then runs half-cleaner
// layers at strides m/4, m/8, ..., 1. (log2 n)(1 + log2 n)/2 layers.
// Throws std::invalid_argument otherwise.
NetworkPlan bitonic_plan(int n);

struct PlanDiagnostics {
  bool passed = false;
  std::string detail;  // human-readable reason on failure
  // First 0/1 input the hard network failed to sort, if that is the reason.
  std::optional<std::vector<int>> counterexample;
};

// Structural checks (index ranges, i < j, per-layer disjointness) plus, for
// n <= 16, the zero-one principle: the plan run with hard min/max
// comparators must sort all 2^n Boolean vectors.
PlanDiagnostics validate_plan(const NetworkPlan& plan);

// Wire format: header line "n <n>", then one line per layer of
// space-separated "i:j" pairs (empty line for an empty layer).
std::string plan_to_text(const NetworkPlan& plan);

// Executes the plan with hard comparators; the oracle behind validate_plan
// and a convenient reference for tests.
std::vector<double> hard_sort_through(const NetworkPlan& plan,
                                      std::vector<double> x);

}  // namespace monosort
