#include "monosort/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace monosort {

SortResult forward(std::span<const double> x, const NetworkPlan& plan,
                   const SwapConfig& cfg) {
  if (static_cast<int>(x.size()) != plan.n)
    throw std::invalid_argument("forward: input length does not match plan");
  for (double xi : x)
    if (!std::isfinite(xi)) throw std::domain_error("forward: non-finite input");

  SortResult res;
  res.n = plan.n;
  res.x_hat.assign(x.begin(), x.end());
  res.plan = plan;
  res.config = cfg;
  const int n = plan.n;
  res.p.assign(static_cast<size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) res.p[static_cast<size_t>(i) * n + i] = 1.0;

  res.cache.reserve(plan.layers.size());
  for (const Layer& layer : plan.layers) {
    std::vector<SwapRecord> records;
    records.reserve(layer.size());
    for (const auto& [i, j] : layer) {
      const double a = res.x_hat[i];
      const double b = res.x_hat[j];
      const SwapOutcome out = soft_swap(cfg, a, b);
      res.x_hat[i] = out.lo;
      res.x_hat[j] = out.hi;
      const double v = out.blend;
      const double w = 1.0 - v;  // exact complement of v
      double* ri = res.p.data() + static_cast<size_t>(i) * n;
      double* rj = res.p.data() + static_cast<size_t>(j) * n;
      for (int k = 0; k < n; ++k) {
        const double pi = ri[k];
        const double pj = rj[k];
        ri[k] = v * pi + w * pj;
        rj[k] = w * pi + v * pj;
      }
      records.push_back({i, j, v, a, b});
    }
    res.cache.push_back(std::move(records));
  }
  return res;
}

std::vector<double> backward(const SortResult& result,
                             std::span<const double> grad_x_hat,
                             std::span<const double> grad_p) {
  const int n = result.n;
  if (result.cache.size() != result.plan.layers.size())
    throw std::logic_error("backward: missing forward cache");
  if (static_cast<int>(grad_x_hat.size()) != n)
    throw std::invalid_argument("backward: grad_x_hat length mismatch");
  const bool with_p = !grad_p.empty();
  if (with_p && grad_p.size() != static_cast<size_t>(n) * n)
    throw std::invalid_argument("backward: grad_p shape mismatch");

  // The P-path needs the pre-swap rows of P at every comparator; replay the
  // row accumulation forward (from the cached blends) and stack snapshots.
  std::vector<double> row_snaps;  // 2n doubles per comparator, push order
  if (with_p) {
    std::vector<double> p(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) p[static_cast<size_t>(i) * n + i] = 1.0;
    for (const auto& records : result.cache) {
      for (const SwapRecord& rec : records) {
        double* ri = p.data() + static_cast<size_t>(rec.i) * n;
        double* rj = p.data() + static_cast<size_t>(rec.j) * n;
        row_snaps.insert(row_snaps.end(), ri, ri + n);
        row_snaps.insert(row_snaps.end(), rj, rj + n);
        const double v = rec.v;
        const double w = 1.0 - v;
        for (int k = 0; k < n; ++k) {
          const double pi = ri[k];
          const double pj = rj[k];
          ri[k] = v * pi + w * pj;
          rj[k] = w * pi + v * pj;
        }
      }
    }
  }

  std::vector<double> g(grad_x_hat.begin(), grad_x_hat.end());
  std::vector<double> G(grad_p.begin(), grad_p.end());
  size_t snap_top = row_snaps.size();

  for (size_t li = result.cache.size(); li-- > 0;) {
    const auto& records = result.cache[li];
    for (size_t ri = records.size(); ri-- > 0;) {
      const SwapRecord& rec = records[ri];
      const double v = rec.v;
      const double w = 1.0 - v;
      const double delta = rec.b - rec.a;
      const double vp =
          result.config.beta * deriv(result.config.sigmoid,
                                     result.config.beta * delta);
      const double gi = g[rec.i];
      const double gj = g[rec.j];
      // Total cotangent of the blend v: the value path plus, when P is
      // being differentiated, the row path.
      double dv = (gi - gj) * (rec.a - rec.b);
      if (with_p) {
        snap_top -= static_cast<size_t>(2) * n;
        const double* si = row_snaps.data() + snap_top;        // pre-swap row i
        const double* sj = si + n;                             // pre-swap row j
        double* Gi = G.data() + static_cast<size_t>(rec.i) * n;
        double* Gj = G.data() + static_cast<size_t>(rec.j) * n;
        double acc = 0.0;
        for (int k = 0; k < n; ++k) acc += (Gi[k] - Gj[k]) * (si[k] - sj[k]);
        dv += acc;
        for (int k = 0; k < n; ++k) {
          const double a = Gi[k];
          const double b = Gj[k];
          Gi[k] = v * a + w * b;
          Gj[k] = w * a + v * b;
        }
      }
      g[rec.i] = gi * v + gj * w - vp * dv;
      g[rec.j] = gi * w + gj * v + vp * dv;
    }
  }
  return g;
}

std::vector<double> GroundTruthPerm::dense() const {
  std::vector<double> q(static_cast<size_t>(n) * n, 0.0);
  for (int r = 0; r < n; ++r)
    q[static_cast<size_t>(r) * n + rank_to_input[r]] = 1.0;
  return q;
}

GroundTruthPerm hard_rank_perm(std::span<const double> y) {
  for (double yi : y)
    if (!std::isfinite(yi))
      throw std::domain_error("hard_rank_perm: non-finite input");
  GroundTruthPerm q;
  q.n = static_cast<int>(y.size());
  q.rank_to_input.resize(y.size());
  std::iota(q.rank_to_input.begin(), q.rank_to_input.end(), 0);
  std::stable_sort(q.rank_to_input.begin(), q.rank_to_input.end(),
                   [&](int a, int b) { return y[a] < y[b]; });
  return q;
}

namespace {
constexpr double kClampLo = 1e-12;
}

double cross_entropy_loss(std::span<const double> p,
                          const GroundTruthPerm& q) {
  const int n = q.n;
  if (p.size() != static_cast<size_t>(n) * n)
    throw std::invalid_argument("cross_entropy_loss: shape mismatch");
  double loss = 0.0;
  for (int r = 0; r < n; ++r) {
    const double val = p[static_cast<size_t>(r) * n + q.rank_to_input[r]];
    loss -= std::log(std::clamp(val, kClampLo, 1.0));
  }
  return loss / n;
}

std::vector<double> cross_entropy_grad_p(std::span<const double> p,
                                         const GroundTruthPerm& q) {
  const int n = q.n;
  if (p.size() != static_cast<size_t>(n) * n)
    throw std::invalid_argument("cross_entropy_grad_p: shape mismatch");
  std::vector<double> grad(p.size(), 0.0);
  for (int r = 0; r < n; ++r) {
    const size_t idx = static_cast<size_t>(r) * n + q.rank_to_input[r];
    const double val = p[idx];
    // The clamp's gradient is zero outside [kClampLo, 1].
    if (val >= kClampLo && val <= 1.0) grad[idx] = -1.0 / (n * val);
  }
  return grad;
}

RankMetrics rank_metrics(std::span<const double> scores,
                         std::span<const double> truth) {
  if (scores.size() != truth.size())
    throw std::invalid_argument("rank_metrics: length mismatch");
  const int n = static_cast<int>(scores.size());
  const GroundTruthPerm qs = hard_rank_perm(scores);
  const GroundTruthPerm qt = hard_rank_perm(truth);
  std::vector<int> rank_s(n), rank_t(n);
  for (int r = 0; r < n; ++r) {
    rank_s[qs.rank_to_input[r]] = r;
    rank_t[qt.rank_to_input[r]] = r;
  }
  int hits = 0;
  for (int i = 0; i < n; ++i)
    if (rank_s[i] == rank_t[i]) ++hits;
  RankMetrics m;
  m.exact_match = hits == n;
  m.element_rate = n == 0 ? 1.0 : static_cast<double>(hits) / n;
  return m;
}

}  // namespace monosort
