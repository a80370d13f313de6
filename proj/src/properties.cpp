#include "monosort/properties.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>

#include <json.hpp>

#include "monosort/io.hpp"

namespace monosort {

namespace {

std::string check_label(const char* check, const SigmoidSpec& spec,
                        double beta) {
  std::string label = std::string(check) + "/" + to_string(spec.kind);
  char buf[32];
  std::snprintf(buf, sizeof buf, "/beta=%g", beta);
  return label + buf;
}

// Soft-minimum deviation curve g(x) = min_f(x, 0); its sup over x > 0 is
// the per-swap error bound.
double min_curve(const SwapConfig& cfg, double x) {
  return soft_swap(cfg, x, 0.0).lo;
}

}  // namespace

std::string report_to_json(const PropertyReport& report) {
  nlohmann::ordered_json j;
  j["name"] = report.name;
  j["passed"] = report.passed;
  if (report.witness) {
    j["witness"] = {{"where", report.witness->where},
                    {"value", report.witness->value},
                    {"threshold", report.witness->threshold}};
  } else {
    j["witness"] = nullptr;
  }
  j["samples"] = report.samples;
  return j.dump();
}

PropertyReport check_swap_monotone(const SigmoidSpec& spec, double beta,
                                   int grid_points) {
  const SwapConfig cfg{spec, beta};
  const double half = 20.0 / beta;
  const int m = std::max(grid_points, 3);
  std::vector<double> xs(m), ys(m);
  for (int k = 0; k < m; ++k) {
    xs[k] = -half + 2.0 * half * k / (m - 1);
    ys[k] = min_curve(cfg, xs[k]);
  }
  double worst_slope = std::numeric_limits<double>::infinity();
  double worst_x = 0.0;
  for (int k = 1; k + 1 < m; ++k) {
    const double slope = (ys[k + 1] - ys[k - 1]) / (xs[k + 1] - xs[k - 1]);
    if (slope < worst_slope) {
      worst_slope = slope;
      worst_x = xs[k];
    }
  }
  PropertyReport report;
  report.name = check_label("swap_monotone", spec, beta);
  report.samples = m;
  report.passed = worst_slope >= -1e-9;
  if (!report.passed) report.witness = {worst_x, worst_slope, -1e-9};
  return report;
}

BoundMeasurement measure_error_bound(const SigmoidSpec& spec, double beta) {
  const SwapConfig cfg{spec, beta};
  const double x_lo = 1e-6 / beta;
  const double x_hi = 1e6 / beta;
  const int m = 4001;
  const double ratio = std::pow(x_hi / x_lo, 1.0 / (m - 1));

  BoundMeasurement bm;
  bm.kind = spec.kind;
  bm.beta = beta;

  if (is_monotonic_kind(spec.kind)) {
    // These deviation curves increase toward their tail limit; the largest
    // grid point is the best available value.
    bm.measured_sup = min_curve(cfg, x_hi);
  } else {
    // Logistic-family curves peak in the interior: locate the grid maximum,
    // then refine by golden section.
    double best = -std::numeric_limits<double>::infinity();
    int best_k = 0;
    double x = x_lo;
    for (int k = 0; k < m; ++k, x *= ratio) {
      const double y = min_curve(cfg, x);
      if (y > best) {
        best = y;
        best_k = k;
      }
    }
    double a = x_lo * std::pow(ratio, std::max(0, best_k - 1));
    double b = x_lo * std::pow(ratio, std::min(m - 1, best_k + 1));
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - gr * (b - a);
    double d = a + gr * (b - a);
    double fc = min_curve(cfg, c);
    double fd = min_curve(cfg, d);
    for (int it = 0; it < 200 && b - a > 1e-15 * b; ++it) {
      if (fc > fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - gr * (b - a);
        fc = min_curve(cfg, c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + gr * (b - a);
        fd = min_curve(cfg, d);
      }
    }
    bm.measured_sup = std::max(best, std::max(fc, fd));
  }

  if (spec.kind == SigmoidKind::LogisticArt) {
    bm.alpha = std::numeric_limits<double>::quiet_NaN();
    bm.normalized = std::numeric_limits<double>::quiet_NaN();
  } else {
    bm.alpha = beta * lipschitz_constant(spec);
    bm.normalized = bm.measured_sup * bm.alpha;
  }
  return bm;
}

PropertyReport check_doubly_stochastic(std::span<const double> p, int n,
                                       double tol) {
  PropertyReport report;
  report.name = "doubly_stochastic/n=" + std::to_string(n);
  report.samples = static_cast<long>(n) * n;
  report.passed = true;
  for (int r = 0; r < n && report.passed; ++r) {
    for (int c = 0; c < n; ++c) {
      const double e = p[static_cast<size_t>(r) * n + c];
      if (e < -tol || e > 1.0 + tol) {
        report.passed = false;
        report.witness = {static_cast<double>(r * n + c), e, tol};
        break;
      }
    }
  }
  for (int r = 0; r < n && report.passed; ++r) {
    double sum = 0.0;
    for (int c = 0; c < n; ++c) sum += p[static_cast<size_t>(r) * n + c];
    if (std::abs(sum - 1.0) > tol) {
      report.passed = false;
      report.witness = {static_cast<double>(r), sum, tol};
    }
  }
  for (int c = 0; c < n && report.passed; ++c) {
    double sum = 0.0;
    for (int r = 0; r < n; ++r) sum += p[static_cast<size_t>(r) * n + c];
    if (std::abs(sum - 1.0) > tol) {
      report.passed = false;
      report.witness = {static_cast<double>(n + c), sum, tol};
    }
  }
  return report;
}

PropertyReport check_network_error_bound(const NetworkPlan& plan,
                                         const SwapConfig& cfg, int trials,
                                         std::uint64_t seed) {
  const double eps = measure_error_bound(cfg.sigmoid, cfg.beta).measured_sup;
  const double bound = static_cast<double>(plan.layers.size()) * eps + 1e-9;

  PropertyReport report;
  report.name = check_label("network_error_bound", cfg.sigmoid, cfg.beta) +
                "/n=" + std::to_string(plan.n) +
                "/l=" + std::to_string(plan.layers.size());
  report.samples = trials;
  report.passed = true;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-5.0, 5.0);
  std::vector<double> x(plan.n);
  for (int t = 0; t < trials; ++t) {
    for (double& xi : x) xi = dist(rng);
    const SortResult res = forward(x, plan, cfg);
    std::vector<double> hard = x;
    std::sort(hard.begin(), hard.end());
    double err = 0.0;
    for (int k = 0; k < plan.n; ++k)
      err = std::max(err, std::abs(res.x_hat[k] - hard[k]));
    if (err > bound) {
      report.passed = false;
      report.witness = {static_cast<double>(t), err, bound};
      break;
    }
  }
  return report;
}

PropertyReport check_decay_class(const SigmoidSpec& spec) {
  // r(x) = f'(x) x^2 at natural scale: bounded away from 0 and infinity for
  // the 1/x^2-tailed kinds, collapsing for the exponential-tailed ones.
  std::vector<double> r;
  for (double x : {1e1, 1e2, 1e3, 1e4, 1e5}) r.push_back(deriv(spec, x) * x * x);
  const double ratio = r.front() > 0.0 ? r.back() / r.front() : 0.0;

  PropertyReport report;
  report.name = std::string("decay_class/") + to_string(spec.kind);
  report.samples = static_cast<long>(r.size());
  if (is_monotonic_kind(spec.kind)) {
    const double r_min = *std::min_element(r.begin(), r.end());
    report.passed = ratio >= 0.1 && ratio <= 10.0 && r_min > 0.0;
    if (!report.passed) report.witness = {1e5, ratio, 0.1};
  } else {
    report.passed = ratio <= 1e-6;
    if (!report.passed) report.witness = {1e5, ratio, 1e-6};
  }
  return report;
}

void emit_swap_curves(std::ostream& out, std::span<const SigmoidSpec> specs,
                      double beta, int grid_points) {
  out << "x";
  for (const SigmoidSpec& spec : specs) out << ',' << to_string(spec.kind);
  out << '\n';
  const double half = 10.0 / beta;
  const int m = std::max(grid_points, 2);
  for (int k = 0; k < m; ++k) {
    const double x = -half + 2.0 * half * k / (m - 1);
    out << format_double(x);
    for (const SigmoidSpec& spec : specs)
      out << ',' << format_double(min_curve(SwapConfig{spec, beta}, x));
    out << '\n';
  }
}

namespace {

// Planar embedding of the permutahedron of (1, 2, 3): orthonormal basis of
// the plane x + y + z = 6 through the centroid (2, 2, 2).
constexpr double kCentroid = 2.0;
const double kSqrt2 = std::sqrt(2.0);
const double kSqrt6 = std::sqrt(6.0);
const double kUHat[3] = {-1.0 / kSqrt2, 0.0, 1.0 / kSqrt2};
const double kVHat[3] = {1.0 / kSqrt6, -2.0 / kSqrt6, 1.0 / kSqrt6};

void plane_to_point(double u, double v, double out[3]) {
  for (int k = 0; k < 3; ++k)
    out[k] = kCentroid + u * kUHat[k] + v * kVHat[k];
}

void point_to_plane(const double x[3], double& u, double& v) {
  u = v = 0.0;
  for (int k = 0; k < 3; ++k) {
    u += (x[k] - kCentroid) * kUHat[k];
    v += (x[k] - kCentroid) * kVHat[k];
  }
}

bool inside_hexagon(double u, double v) {
  const double limit = kSqrt6 / 2.0 + 1e-9;
  const double w = std::sqrt(3.0) / 2.0 * u;
  return std::abs(v) <= limit && std::abs(w + v / 2.0) <= limit &&
         std::abs(w - v / 2.0) <= limit;
}

}  // namespace

PermutahedronSummary emit_permutahedron_loss(std::ostream* csv,
                                             const SwapConfig& cfg,
                                             int grid_axis) {
  const NetworkPlan plan = odd_even_plan(3);
  const GroundTruthPerm identity{3, {0, 1, 2}};
  const auto loss_at = [&](const double x[3]) {
    const SortResult res = forward(std::span<const double>(x, 3), plan, cfg);
    return cross_entropy_loss(res.p, identity);
  };

  PermutahedronSummary s{};
  s.grid_min = std::numeric_limits<double>::infinity();
  s.grid_max = -std::numeric_limits<double>::infinity();
  const auto consider = [&](double u, double v, double loss) {
    if (loss < s.grid_min) {
      s.grid_min = loss;
      s.min_u = u;
      s.min_v = v;
    }
    if (loss > s.grid_max) {
      s.grid_max = loss;
      s.max_u = u;
      s.max_v = v;
    }
  };

  if (csv) *csv << "u,v,loss\n";
  const int m = std::max(grid_axis, 2);
  for (int iu = 0; iu < m; ++iu) {
    const double u = -kSqrt2 + 2.0 * kSqrt2 * iu / (m - 1);
    for (int iv = 0; iv < m; ++iv) {
      const double v = -kSqrt6 / 2.0 + kSqrt6 * iv / (m - 1);
      if (!inside_hexagon(u, v)) continue;
      double x[3];
      plane_to_point(u, v, x);
      const double loss = loss_at(x);
      consider(u, v, loss);
      ++s.points;
      if (csv)
        *csv << format_double(u) << ',' << format_double(v) << ','
             << format_double(loss) << '\n';
    }
  }

  const auto vertex_loss = [&](double a, double b, double c) {
    const double x[3] = {a, b, c};
    const double loss = loss_at(x);
    double u, v;
    point_to_plane(x, u, v);
    consider(u, v, loss);
    return loss;
  };
  s.loss_123 = vertex_loss(1, 2, 3);
  s.loss_132 = vertex_loss(1, 3, 2);
  s.loss_213 = vertex_loss(2, 1, 3);
  s.loss_231 = vertex_loss(2, 3, 1);
  s.loss_312 = vertex_loss(3, 1, 2);
  s.loss_321 = vertex_loss(3, 2, 1);
  return s;
}

}  // namespace monosort
