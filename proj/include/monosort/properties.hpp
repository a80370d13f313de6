#pragma once

// Numeric verification suite: monotonicity of the relaxed swap, per-swap and
// whole-network error bounds, double stochasticity of P, derivative decay
// classes, and the CSV emitters behind the swap-curve and permutahedron
// figures. Every check is deterministic given its seed and grid parameters.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "monosort/engine.hpp"

namespace monosort {

struct PropertyWitness {
  double where;       // offending input / index (see each check for meaning)
  double value;       // measured quantity at the witness
  double threshold;   // the bound it violated
};

struct PropertyReport {
  std::string name;
  bool passed = false;
  std::optional<PropertyWitness> witness;  // always present when failed
  long samples = 0;
};

// One JSON object per report, fields exactly {name, passed, witness, samples};
// witness is null on passing checks.
std::string report_to_json(const PropertyReport& report);

struct BoundMeasurement {
  SigmoidKind kind;
  double beta;
  double measured_sup;  // sup_x soft_swap(x, 0).lo over x > 0
  double alpha;         // Lipschitz constant at this beta (NaN for ART)
  double normalized;    // measured_sup * alpha, beta-invariant per kind
};

// Scans soft_swap(x, 0).lo on a dense grid over [-20/beta, 20/beta] and
// requires every central-difference slope >= -1e-9. Witness: where = x at
// the most negative slope, value = that slope.
PropertyReport check_swap_monotone(const SigmoidSpec& spec, double beta,
                                   int grid_points = 100001);

// Maximizes soft_swap(x, 0).lo over x in (0, 1e6/beta]. Kinds with a
// monotone deviation curve take the value at the largest grid point; the
// logistic family refines the interior grid maximum by golden section.
BoundMeasurement measure_error_bound(const SigmoidSpec& spec, double beta);

// Entries within [-tol, 1+tol], every row and column sum within tol of 1.
// Witness 'where': row index r for row sums, n + c for column sums,
// r*n + c for an out-of-range entry.
PropertyReport check_doubly_stochastic(std::span<const double> p, int n,
                                       double tol = 1e-9);

// For `trials` random inputs, ||x_hat - hard_sort(x)||_inf must not exceed
// layer_count * measured per-swap bound (+1e-9 slack).
PropertyReport check_network_error_bound(const NetworkPlan& plan,
                                         const SwapConfig& cfg, int trials,
                                         std::uint64_t seed = 0);

// Classifies the tail of f' via r(x) = f'(x) * x^2 at x = 1e1..1e5:
// reciprocal/cauchy/optimal must keep r within a constant band
// (r(1e5)/r(1e1) in [0.1, 10]); the logistic family must collapse
// (ratio <= 1e-6). Passing means the kind matches its expected class.
PropertyReport check_decay_class(const SigmoidSpec& spec);

// CSV with header "x,<kind>,<kind>,..." sampling soft_swap(x, 0).lo for
// each spec on a uniform grid over [-10/beta, 10/beta].
void emit_swap_curves(std::ostream& out, std::span<const SigmoidSpec> specs,
                      double beta, int grid_points = 2001);

struct PermutahedronSummary {
  // Cross-entropy loss (against the identity ordering) at the six vertices,
  // indexed by the permutation the vertex represents.
  double loss_123, loss_132, loss_213, loss_231, loss_312, loss_321;
  double grid_min, grid_max;
  double min_u, min_v;  // planar coordinates of the grid minimum
  double max_u, max_v;
  long points = 0;      // grid points inside the hexagon
};

// Samples the hexagonal permutahedron of (1,2,3) on a grid_axis x grid_axis
// planar grid, runs each point through the 3-wire odd-even network with cfg
// and writes rows (u, v, loss) against the identity ordering. Pass csv =
// nullptr to compute the summary only. The six vertices are always
// evaluated and included in the min/max scan.
PermutahedronSummary emit_permutahedron_loss(std::ostream* csv,
                                             const SwapConfig& cfg,
                                             int grid_axis = 201);

}  // namespace monosort
