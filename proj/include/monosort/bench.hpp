#pragma once

// Toy ordering-supervision benchmark: a small MLP predicts a scalar per
// input vector, the predictions run through a differentiable sorting
// network, and the only training signal is the cross-entropy between the
// relaxed permutation matrix and the ground-truth ordering. Runs are fully
// deterministic given (task seed, config seed).

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "monosort/engine.hpp"

namespace monosort {

enum class PlanFamily { OddEven, Bitonic };

const char* to_string(PlanFamily family);
// Accepts "odd-even", "odd_even" or "bitonic".
std::optional<PlanFamily> parse_plan_family(std::string_view name);

// Synthetic ranking task: inputs are standard-normal vectors, the latent
// truth is a monotone squash of a fixed random linear functional, so ranks
// are learnable by a small network. Instances are resampled until all
// pairwise truth gaps are >= 1e-6.
struct SyntheticTask {
  int input_dim = 16;
  int set_size = 5;          // vectors ranked jointly per instance
  std::uint64_t seed = 0;
  std::vector<double> latent_w;  // input_dim weights of the latent functional
  double latent_bias = 0.0;

  struct Instance {
    std::vector<double> inputs;  // set_size * input_dim, row per element
    std::vector<double> truth;   // set_size latent values
  };
  std::vector<Instance> train;
  std::vector<Instance> val;
};

SyntheticTask make_task(std::uint64_t seed, int input_dim = 16,
                        int set_size = 5, int train_instances = 4096,
                        int val_instances = 512);

struct TrainConfig {
  SigmoidSpec sigmoid;
  double beta = 1.0;
  PlanFamily family = PlanFamily::OddEven;
  int set_size = 5;
  int steps = 10000;
  double learning_rate = 3e-4;
  int batch_size = 32;
  std::uint64_t seed = 0;
  int eval_every = 500;
};

// Tuned inverse-temperature defaults for common (kind, family, n) combos,
// found by grid search at image-benchmark scale; nullopt when uncovered.
std::optional<double> default_beta(SigmoidKind kind, PlanFamily family, int n);

struct EvalPoint {
  int step = 0;
  double loss = 0.0;          // mean validation cross-entropy
  double exact_rate = 0.0;    // fraction of instances ranked fully correctly
  double element_rate = 0.0;  // fraction of elements assigned the right rank
};

struct RunRecord {
  TrainConfig config;
  std::vector<EvalPoint> evals;      // step 0, every eval_every, final step
  EvalPoint final;
  bool diverged = false;
  std::vector<double> train_loss;    // per-step batch loss (not serialized)
  double input_grad_norm0 = 0.0;     // first-layer weight-grad norm, step 1
  double wall_seconds = 0.0;         // not serialized (nondeterministic)
};

// Adam (0.9, 0.999, 1e-8) on a 16->64->64->1 tanh MLP, gradients flowing
// only through the sorting network's P / cross-entropy path. Aborts early
// with diverged=true if the batch loss becomes non-finite.
RunRecord train(const SyntheticTask& task, const TrainConfig& cfg);

// One run per beta, shared seed. max_threads <= 0 means use the hardware
// concurrency (capped by MONOSORT_THREADS when the CLI drives this).
std::vector<RunRecord> sweep_beta(const SyntheticTask& task,
                                  const TrainConfig& base,
                                  std::span<const double> betas,
                                  int max_threads = 0);

// JSON lines: one config/header object, one object per eval point, one
// final-metrics object. Byte-identical for identical (task, config).
void write_run_jsonl(std::ostream& out, const RunRecord& record);

// CSV "beta,kind,plan,n,exact_rate,element_rate", one row per record.
void write_sweep_csv(std::ostream& out, std::span<const RunRecord> records);

}  // namespace monosort
