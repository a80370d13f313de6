#include "monosort/topology.hpp"

#include <algorithm>
#include <cstdint>
#include <sstream>
#include <stdexcept>

namespace monosort {

NetworkPlan odd_even_plan(int n) {
  if (n < 1) throw std::invalid_argument("odd_even_plan: n must be >= 1");
  NetworkPlan plan;
  plan.n = n;
  plan.layers.resize(n);
  for (int k = 0; k < n; ++k)
    for (int i = k % 2; i + 1 < n; i += 2)
      plan.layers[k].push_back({i, i + 1});
  return plan;
}

NetworkPlan bitonic_plan(int n) {
  if (n < 2 || (n & (n - 1)) != 0)
    throw std::invalid_argument("bitonic_plan: n must be a power of two >= 2");
  NetworkPlan plan;
  plan.n = n;
  // Direction-normalized bitonic sort: each stage m first compares mirrored
  // pairs within blocks of size m (replacing the classic descending
  // half-blocks), then cleans with strided layers; every comparator can
  // then order ascending.
  for (int m = 2; m <= n; m *= 2) {
    Layer mirror;
    for (int b = 0; b < n; b += m)
      for (int i = 0; i < m / 2; ++i)
        mirror.push_back({b + i, b + m - 1 - i});
    plan.layers.push_back(std::move(mirror));
    for (int j = m / 4; j >= 1; j /= 2) {
      Layer clean;
      for (int b = 0; b < n; b += 2 * j)
        for (int i = 0; i < j; ++i)
          clean.push_back({b + i, b + i + j});
      plan.layers.push_back(std::move(clean));
    }
  }
  return plan;
}

PlanDiagnostics validate_plan(const NetworkPlan& plan) {
  PlanDiagnostics diag;
  if (plan.n < 1) {
    diag.detail = "wire count must be >= 1";
    return diag;
  }
  std::vector<char> seen(plan.n);
  for (size_t li = 0; li < plan.layers.size(); ++li) {
    std::fill(seen.begin(), seen.end(), 0);
    for (const auto& [i, j] : plan.layers[li]) {
      if (i < 0 || j >= plan.n) {
        diag.detail = "layer " + std::to_string(li) + ": pair (" +
                      std::to_string(i) + "," + std::to_string(j) +
                      ") out of range";
        return diag;
      }
      if (i >= j) {
        diag.detail = "layer " + std::to_string(li) + ": pair (" +
                      std::to_string(i) + "," + std::to_string(j) +
                      ") not ascending";
        return diag;
      }
      if (seen[i] || seen[j]) {
        diag.detail = "layer " + std::to_string(li) + ": wire " +
                      std::to_string(seen[i] ? i : j) + " used twice";
        return diag;
      }
      seen[i] = seen[j] = 1;
    }
  }

  // Zero-one principle: a comparator network sorts everything iff it sorts
  // all Boolean vectors. Bit-parallel hard execution over all 2^n masks.
  if (plan.n <= 16) {
    const int n = plan.n;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      std::uint32_t m = mask;
      for (const Layer& layer : plan.layers) {
        for (const auto& [i, j] : layer) {
          const std::uint32_t bi = (m >> i) & 1u;
          const std::uint32_t bj = (m >> j) & 1u;
          const std::uint32_t lo = bi & bj;
          const std::uint32_t hi = bi | bj;
          m = (m & ~((1u << i) | (1u << j))) | (lo << i) | (hi << j);
        }
      }
      const int ones = __builtin_popcount(mask);
      const std::uint32_t sorted =
          ones == 0 ? 0u : ((1u << ones) - 1u) << (n - ones);
      if (m != sorted) {
        diag.detail = "0-1 input missorted";
        std::vector<int> bits(n);
        for (int k = 0; k < n; ++k) bits[k] = (mask >> k) & 1;
        diag.counterexample = std::move(bits);
        return diag;
      }
    }
  }

  diag.passed = true;
  diag.detail = "ok";
  return diag;
}

std::string plan_to_text(const NetworkPlan& plan) {
  std::ostringstream out;
  out << "n " << plan.n << "\n";
  for (const Layer& layer : plan.layers) {
    for (size_t k = 0; k < layer.size(); ++k) {
      if (k) out << ' ';
      out << layer[k].first << ':' << layer[k].second;
    }
    out << '\n';
  }
  return out.str();
}

std::vector<double> hard_sort_through(const NetworkPlan& plan,
                                      std::vector<double> x) {
  if (static_cast<int>(x.size()) != plan.n)
    throw std::invalid_argument("hard_sort_through: length mismatch");
  for (const Layer& layer : plan.layers) {
    for (const auto& [i, j] : layer) {
      if (x[i] > x[j]) std::swap(x[i], x[j]);
    }
  }
  return x;
}

}  // namespace monosort
