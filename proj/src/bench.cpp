#include "monosort/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "monosort/io.hpp"

namespace monosort {

const char* to_string(PlanFamily family) {
  return family == PlanFamily::OddEven ? "odd_even" : "bitonic";
}

std::optional<PlanFamily> parse_plan_family(std::string_view name) {
  if (name == "odd-even" || name == "odd_even") return PlanFamily::OddEven;
  if (name == "bitonic") return PlanFamily::Bitonic;
  return std::nullopt;
}

std::optional<double> default_beta(SigmoidKind kind, PlanFamily family,
                                   int n) {
  struct Entry {
    SigmoidKind kind;
    PlanFamily family;
    int n;
    double beta;
  };
  constexpr double pi = 3.14159265358979323846;
  static const Entry table[] = {
      {SigmoidKind::Logistic, PlanFamily::OddEven, 3, 79},
      {SigmoidKind::Logistic, PlanFamily::OddEven, 5, 30},
      {SigmoidKind::Logistic, PlanFamily::OddEven, 7, 33},
      {SigmoidKind::Logistic, PlanFamily::OddEven, 9, 54},
      {SigmoidKind::Logistic, PlanFamily::OddEven, 15, 32},
      {SigmoidKind::Logistic, PlanFamily::OddEven, 32, 128},
      {SigmoidKind::Logistic, PlanFamily::Bitonic, 16, 43},
      {SigmoidKind::Logistic, PlanFamily::Bitonic, 32, 8},
      {SigmoidKind::LogisticArt, PlanFamily::OddEven, 3, 15},
      {SigmoidKind::LogisticArt, PlanFamily::OddEven, 5, 20},
      {SigmoidKind::LogisticArt, PlanFamily::OddEven, 7, 13},
      {SigmoidKind::LogisticArt, PlanFamily::OddEven, 9, 34},
      {SigmoidKind::LogisticArt, PlanFamily::OddEven, 15, 16},
      {SigmoidKind::LogisticArt, PlanFamily::OddEven, 32, 29},
      {SigmoidKind::LogisticArt, PlanFamily::Bitonic, 16, 28},
      {SigmoidKind::LogisticArt, PlanFamily::Bitonic, 32, 26},
      {SigmoidKind::Reciprocal, PlanFamily::OddEven, 3, 14},
      {SigmoidKind::Reciprocal, PlanFamily::OddEven, 5, 60},
      {SigmoidKind::Reciprocal, PlanFamily::OddEven, 7, 69},
      {SigmoidKind::Reciprocal, PlanFamily::OddEven, 9, 44},
      {SigmoidKind::Reciprocal, PlanFamily::OddEven, 15, 120},
      {SigmoidKind::Reciprocal, PlanFamily::OddEven, 32, 1140},
      {SigmoidKind::Reciprocal, PlanFamily::Bitonic, 16, 124},
      {SigmoidKind::Reciprocal, PlanFamily::Bitonic, 32, 76},
      {SigmoidKind::Cauchy, PlanFamily::OddEven, 3, 14.5 * pi},
      {SigmoidKind::Cauchy, PlanFamily::OddEven, 5, 51 * pi},
      {SigmoidKind::Cauchy, PlanFamily::OddEven, 7, 71 * pi},
      {SigmoidKind::Cauchy, PlanFamily::OddEven, 9, 15 * pi},
      {SigmoidKind::Cauchy, PlanFamily::OddEven, 15, 40 * pi},
      {SigmoidKind::Cauchy, PlanFamily::OddEven, 32, 169 * pi},
      {SigmoidKind::Cauchy, PlanFamily::Bitonic, 16, 12 * pi},
      {SigmoidKind::Cauchy, PlanFamily::Bitonic, 32, 48.5 * pi},
      {SigmoidKind::Optimal, PlanFamily::OddEven, 3, 6},
      {SigmoidKind::Optimal, PlanFamily::OddEven, 5, 20},
      {SigmoidKind::Optimal, PlanFamily::OddEven, 7, 29},
      {SigmoidKind::Optimal, PlanFamily::OddEven, 9, 32},
      {SigmoidKind::Optimal, PlanFamily::OddEven, 15, 25},
      {SigmoidKind::Optimal, PlanFamily::OddEven, 32, 124},
      {SigmoidKind::Optimal, PlanFamily::Bitonic, 16, 17},
      {SigmoidKind::Optimal, PlanFamily::Bitonic, 32, 25},
  };
  for (const Entry& e : table)
    if (e.kind == kind && e.family == family && e.n == n) return e.beta;
  return std::nullopt;
}

namespace {

SyntheticTask::Instance sample_instance(std::mt19937_64& rng,
                                        const SyntheticTask& task) {
  std::normal_distribution<double> normal(0.0, 1.0);
  SyntheticTask::Instance inst;
  inst.inputs.resize(static_cast<size_t>(task.set_size) * task.input_dim);
  inst.truth.resize(task.set_size);
  for (;;) {
    for (double& x : inst.inputs) x = normal(rng);
    for (int k = 0; k < task.set_size; ++k) {
      double pre = task.latent_bias;
      for (int d = 0; d < task.input_dim; ++d)
        pre += task.latent_w[d] * inst.inputs[static_cast<size_t>(k) * task.input_dim + d];
      inst.truth[k] = std::tanh(pre);
    }
    // Reject instances with near-tied truths: ordering supervision is
    // ill-defined below the gap threshold.
    std::vector<double> sorted = inst.truth;
    std::sort(sorted.begin(), sorted.end());
    double min_gap = std::numeric_limits<double>::infinity();
    for (size_t k = 1; k < sorted.size(); ++k)
      min_gap = std::min(min_gap, sorted[k] - sorted[k - 1]);
    if (task.set_size < 2 || min_gap >= 1e-6) return inst;
  }
}

}  // namespace

SyntheticTask make_task(std::uint64_t seed, int input_dim, int set_size,
                        int train_instances, int val_instances) {
  if (input_dim < 1 || set_size < 1)
    throw std::invalid_argument("make_task: bad dimensions");
  SyntheticTask task;
  task.input_dim = input_dim;
  task.set_size = set_size;
  task.seed = seed;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  task.latent_w.resize(input_dim);
  // 1/sqrt(dim) scaling keeps the latent pre-activation ~N(0,1) so tanh
  // neither saturates nor collapses the gaps.
  for (double& w : task.latent_w) w = normal(rng) / std::sqrt(input_dim);
  task.latent_bias = 0.1 * normal(rng);
  task.train.reserve(train_instances);
  for (int k = 0; k < train_instances; ++k)
    task.train.push_back(sample_instance(rng, task));
  task.val.reserve(val_instances);
  for (int k = 0; k < val_instances; ++k)
    task.val.push_back(sample_instance(rng, task));
  return task;
}

namespace {

// 2-hidden-layer tanh perceptron with a scalar head, parameters and Adam
// moments stored flat.
struct Mlp {
  static constexpr int kHidden = 64;
  int in_dim;
  std::vector<double> params;

  // Flat layout offsets.
  size_t w1() const { return 0; }
  size_t b1() const { return static_cast<size_t>(kHidden) * in_dim; }
  size_t w2() const { return b1() + kHidden; }
  size_t b2() const { return w2() + static_cast<size_t>(kHidden) * kHidden; }
  size_t w3() const { return b2() + kHidden; }
  size_t b3() const { return w3() + kHidden; }
  size_t size() const { return b3() + 1; }

  explicit Mlp(int dim, std::mt19937_64& rng) : in_dim(dim) {
    params.resize(size());
    const auto xavier = [&](size_t off, int fan_in, int fan_out, int count) {
      const double limit = std::sqrt(6.0 / (fan_in + fan_out));
      std::uniform_real_distribution<double> u(-limit, limit);
      for (int k = 0; k < count; ++k) params[off + k] = u(rng);
    };
    xavier(w1(), in_dim, kHidden, kHidden * in_dim);
    xavier(w2(), kHidden, kHidden, kHidden * kHidden);
    xavier(w3(), kHidden, 1, kHidden);
    // Biases start at zero (already value-initialized).
  }

  struct Activations {
    std::vector<double> h1, h2;  // post-tanh hidden activations
  };

  double forward(const double* x, Activations& act) const {
    act.h1.resize(kHidden);
    act.h2.resize(kHidden);
    const double* W1 = params.data() + w1();
    const double* B1 = params.data() + b1();
    for (int i = 0; i < kHidden; ++i) {
      double z = B1[i];
      const double* row = W1 + static_cast<size_t>(i) * in_dim;
      for (int d = 0; d < in_dim; ++d) z += row[d] * x[d];
      act.h1[i] = std::tanh(z);
    }
    const double* W2 = params.data() + w2();
    const double* B2 = params.data() + b2();
    for (int i = 0; i < kHidden; ++i) {
      double z = B2[i];
      const double* row = W2 + static_cast<size_t>(i) * kHidden;
      for (int d = 0; d < kHidden; ++d) z += row[d] * act.h1[d];
      act.h2[i] = std::tanh(z);
    }
    const double* W3 = params.data() + w3();
    double y = params[b3()];
    for (int d = 0; d < kHidden; ++d) y += W3[d] * act.h2[d];
    return y;
  }

  void backward(const double* x, const Activations& act, double dy,
                std::vector<double>& grad) const {
    const double* W3 = params.data() + w3();
    double dh2[kHidden];
    for (int d = 0; d < kHidden; ++d) {
      grad[w3() + d] += dy * act.h2[d];
      dh2[d] = dy * W3[d];
    }
    grad[b3()] += dy;

    const double* W2 = params.data() + w2();
    double dh1[kHidden] = {0};
    for (int i = 0; i < kHidden; ++i) {
      const double dz = dh2[i] * (1.0 - act.h2[i] * act.h2[i]);
      grad[b2() + i] += dz;
      double* grow = grad.data() + w2() + static_cast<size_t>(i) * kHidden;
      const double* row = W2 + static_cast<size_t>(i) * kHidden;
      for (int d = 0; d < kHidden; ++d) {
        grow[d] += dz * act.h1[d];
        dh1[d] += dz * row[d];
      }
    }
    for (int i = 0; i < kHidden; ++i) {
      const double dz = dh1[i] * (1.0 - act.h1[i] * act.h1[i]);
      grad[b1() + i] += dz;
      double* grow = grad.data() + w1() + static_cast<size_t>(i) * in_dim;
      for (int d = 0; d < in_dim; ++d) grow[d] += dz * x[d];
    }
  }
};

struct Adam {
  double lr;
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  std::vector<double> m, v;
  long t = 0;

  Adam(size_t size, double learning_rate)
      : lr(learning_rate), m(size, 0.0), v(size, 0.0) {}

  void step(std::vector<double>& params, const std::vector<double>& grad) {
    ++t;
    const double c1 = 1.0 - std::pow(beta1, t);
    const double c2 = 1.0 - std::pow(beta2, t);
    for (size_t k = 0; k < params.size(); ++k) {
      m[k] = beta1 * m[k] + (1.0 - beta1) * grad[k];
      v[k] = beta2 * v[k] + (1.0 - beta2) * grad[k] * grad[k];
      params[k] -= lr * (m[k] / c1) / (std::sqrt(v[k] / c2) + eps);
    }
  }
};

void check_config(const SyntheticTask& task, const TrainConfig& cfg) {
  if (!(cfg.beta > 0.0) || !std::isfinite(cfg.beta))
    throw std::invalid_argument("train: beta must be finite and > 0");
  if (cfg.steps < 0) throw std::invalid_argument("train: steps must be >= 0");
  if (cfg.batch_size < 1)
    throw std::invalid_argument("train: batch_size must be >= 1");
  if (cfg.eval_every < 1)
    throw std::invalid_argument("train: eval_every must be >= 1");
  if (cfg.set_size != task.set_size)
    throw std::invalid_argument("train: config set size != task set size");
  if (task.train.empty() || task.val.empty())
    throw std::invalid_argument("train: task has no data");
}

EvalPoint evaluate(const SyntheticTask& task, const Mlp& mlp,
                   const NetworkPlan& plan, const SwapConfig& swap_cfg,
                   int step) {
  EvalPoint pt;
  pt.step = step;
  Mlp::Activations act;
  std::vector<double> scores(task.set_size);
  double loss = 0.0, exact = 0.0, element = 0.0;
  for (const SyntheticTask::Instance& inst : task.val) {
    for (int k = 0; k < task.set_size; ++k)
      scores[k] = mlp.forward(
          inst.inputs.data() + static_cast<size_t>(k) * task.input_dim, act);
    const SortResult res = forward(scores, plan, swap_cfg);
    const GroundTruthPerm q = hard_rank_perm(inst.truth);
    loss += cross_entropy_loss(res.p, q);
    const RankMetrics m = rank_metrics(scores, inst.truth);
    exact += m.exact_match ? 1.0 : 0.0;
    element += m.element_rate;
  }
  const double count = static_cast<double>(task.val.size());
  pt.loss = loss / count;
  pt.exact_rate = exact / count;
  pt.element_rate = element / count;
  return pt;
}

}  // namespace

RunRecord train(const SyntheticTask& task, const TrainConfig& cfg) {
  check_config(task, cfg);
  const auto t_start = std::chrono::steady_clock::now();

  const NetworkPlan plan = cfg.family == PlanFamily::OddEven
                               ? odd_even_plan(cfg.set_size)
                               : bitonic_plan(cfg.set_size);
  const SwapConfig swap_cfg{cfg.sigmoid, cfg.beta};

  std::mt19937_64 init_rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);
  Mlp mlp(task.input_dim, init_rng);
  Adam adam(mlp.size(), cfg.learning_rate);
  std::mt19937_64 rng(cfg.seed);

  RunRecord rec;
  rec.config = cfg;
  rec.train_loss.reserve(cfg.steps);
  rec.evals.push_back(evaluate(task, mlp, plan, swap_cfg, 0));

  const int pool = static_cast<int>(task.train.size());
  std::vector<int> order(pool);
  for (int k = 0; k < pool; ++k) order[k] = k;
  const int batch = std::min(cfg.batch_size, pool);

  std::vector<double> grad(mlp.size());
  std::vector<Mlp::Activations> acts(cfg.set_size);
  std::vector<double> scores(cfg.set_size);
  std::vector<double> zero_cot(cfg.set_size, 0.0);

  for (int step = 1; step <= cfg.steps; ++step) {
    // Draw the batch without replacement (whole pool, in order, when the
    // pool is not larger than the batch).
    if (batch < pool) {
      for (int k = 0; k < batch; ++k) {
        std::uniform_int_distribution<int> pick(k, pool - 1);
        std::swap(order[k], order[pick(rng)]);
      }
    }
    std::fill(grad.begin(), grad.end(), 0.0);
    double batch_loss = 0.0;
    bool failed = false;
    try {
      for (int bi = 0; bi < batch; ++bi) {
        const SyntheticTask::Instance& inst = task.train[order[bi]];
        for (int k = 0; k < cfg.set_size; ++k)
          scores[k] = mlp.forward(
              inst.inputs.data() + static_cast<size_t>(k) * task.input_dim,
              acts[k]);
        const SortResult res = forward(scores, plan, swap_cfg);
        const GroundTruthPerm q = hard_rank_perm(inst.truth);
        batch_loss += cross_entropy_loss(res.p, q);
        const std::vector<double> gp = cross_entropy_grad_p(res.p, q);
        const std::vector<double> gs = backward(res, zero_cot, gp);
        for (int k = 0; k < cfg.set_size; ++k)
          mlp.backward(inst.inputs.data() + static_cast<size_t>(k) * task.input_dim,
                       acts[k], gs[k] / batch, grad);
      }
    } catch (const std::domain_error&) {
      // Non-finite predictions: the run has diverged.
      failed = true;
    }
    batch_loss /= batch;
    if (failed || !std::isfinite(batch_loss)) {
      rec.diverged = true;
      break;
    }
    rec.train_loss.push_back(batch_loss);
    if (step == 1) {
      double norm = 0.0;
      for (size_t k = mlp.w1(); k < mlp.b1(); ++k) norm += grad[k] * grad[k];
      rec.input_grad_norm0 = std::sqrt(norm);
    }
    adam.step(mlp.params, grad);
    if (step % cfg.eval_every == 0 || step == cfg.steps)
      rec.evals.push_back(evaluate(task, mlp, plan, swap_cfg, step));
  }

  rec.final = rec.evals.back();
  rec.wall_seconds = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - t_start)
                         .count();
  return rec;
}

namespace {

int resolve_threads(int requested, size_t jobs) {
  int cap = requested;
  if (cap <= 0) {
    if (const char* env = std::getenv("MONOSORT_THREADS"))
      cap = std::atoi(env);
    if (cap <= 0) cap = static_cast<int>(std::thread::hardware_concurrency());
    if (cap <= 0) cap = 1;
  }
  return std::max(1, std::min<int>(cap, static_cast<int>(jobs)));
}

}  // namespace

std::vector<RunRecord> sweep_beta(const SyntheticTask& task,
                                  const TrainConfig& base,
                                  std::span<const double> betas,
                                  int max_threads) {
  if (betas.empty())
    throw std::invalid_argument("sweep_beta: empty beta list");
  std::vector<RunRecord> records(betas.size());
  const int workers = resolve_threads(max_threads, betas.size());
  std::atomic<size_t> next{0};
  const auto worker = [&] {
    for (;;) {
      const size_t k = next.fetch_add(1);
      if (k >= betas.size()) return;
      TrainConfig cfg = base;
      cfg.beta = betas[k];
      records[k] = train(task, cfg);
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  return records;
}

namespace {

nlohmann::ordered_json eval_to_json(const EvalPoint& pt) {
  return {{"step", pt.step},
          {"loss", pt.loss},
          {"exact_rate", pt.exact_rate},
          {"element_rate", pt.element_rate}};
}

}  // namespace

void write_run_jsonl(std::ostream& out, const RunRecord& record) {
  const TrainConfig& cfg = record.config;
  nlohmann::ordered_json header;
  header["config"] = {{"sigmoid", to_string(cfg.sigmoid.kind)},
                      {"lambda", cfg.sigmoid.lambda},
                      {"epsilon_art", cfg.sigmoid.epsilon_art},
                      {"beta", cfg.beta},
                      {"plan", to_string(cfg.family)},
                      {"n", cfg.set_size},
                      {"steps", cfg.steps},
                      {"learning_rate", cfg.learning_rate},
                      {"batch_size", cfg.batch_size},
                      {"seed", cfg.seed},
                      {"eval_every", cfg.eval_every}};
  header["diverged"] = record.diverged;
  header["input_grad_norm0"] = record.input_grad_norm0;
  out << header.dump() << '\n';
  for (const EvalPoint& pt : record.evals) out << eval_to_json(pt).dump() << '\n';
  nlohmann::ordered_json footer;
  footer["final"] = eval_to_json(record.final);
  out << footer.dump() << '\n';
}

void write_sweep_csv(std::ostream& out, std::span<const RunRecord> records) {
  out << "beta,kind,plan,n,exact_rate,element_rate\n";
  for (const RunRecord& rec : records) {
    out << format_double(rec.config.beta) << ','
        << to_string(rec.config.sigmoid.kind) << ','
        << to_string(rec.config.family) << ',' << rec.config.set_size << ','
        << format_double(rec.final.exact_rate) << ','
        << format_double(rec.final.element_rate) << '\n';
  }
}

}  // namespace monosort
