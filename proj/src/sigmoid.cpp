#include "monosort/sigmoid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace monosort {

namespace {

void check_spec(const SigmoidSpec& spec) {
  if (spec.kind != SigmoidKind::LogisticArt) return;
  if (!(spec.lambda >= 0.0 && spec.lambda <= 1.0))
    throw std::invalid_argument("sigmoid: lambda must be in [0, 1]");
  if (!(spec.epsilon_art > 0.0) || !std::isfinite(spec.epsilon_art))
    throw std::invalid_argument("sigmoid: epsilon_art must be positive");
}

void check_finite(double z) {
  if (!std::isfinite(z))
    throw std::domain_error("sigmoid: non-finite argument");
}

// Overflow-free logistic: route through t = e^{-|z|} in (0, 1].
double logistic(double z) {
  const double t = std::exp(-std::abs(z));
  return z >= 0.0 ? 1.0 / (1.0 + t) : t / (1.0 + t);
}

double logistic_deriv(double z) {
  const double t = std::exp(-std::abs(z));
  return t / ((1.0 + t) * (1.0 + t));
}

// ART input warp phi(z) = z / (|z|^lambda + eps) and its derivative.
double art_warp(const SigmoidSpec& spec, double z) {
  return z / (std::pow(std::abs(z), spec.lambda) + spec.epsilon_art);
}

double art_warp_deriv(const SigmoidSpec& spec, double z) {
  const double p = std::pow(std::abs(z), spec.lambda);
  const double d = p + spec.epsilon_art;
  return ((1.0 - spec.lambda) * p + spec.epsilon_art) / (d * d);
}

}  // namespace

const char* to_string(SigmoidKind kind) {
  switch (kind) {
    case SigmoidKind::Logistic:    return "logistic";
    case SigmoidKind::LogisticArt: return "logistic_art";
    case SigmoidKind::Reciprocal:  return "reciprocal";
    case SigmoidKind::Cauchy:      return "cauchy";
    case SigmoidKind::Optimal:     return "optimal";
  }
  return "unknown";
}

std::optional<SigmoidKind> parse_sigmoid_kind(std::string_view name) {
  if (name == "logistic")     return SigmoidKind::Logistic;
  if (name == "logistic_art") return SigmoidKind::LogisticArt;
  if (name == "reciprocal")   return SigmoidKind::Reciprocal;
  if (name == "cauchy")       return SigmoidKind::Cauchy;
  if (name == "optimal")      return SigmoidKind::Optimal;
  return std::nullopt;
}

double eval(const SigmoidSpec& spec, double z) {
  check_spec(spec);
  check_finite(z);
  switch (spec.kind) {
    case SigmoidKind::Logistic:
      return logistic(z);
    case SigmoidKind::LogisticArt:
      return logistic(art_warp(spec, z));
    case SigmoidKind::Reciprocal:
      // z / (1 + 2|z|) + 1/2, written as 1/(1/|z| + 2) to stay finite for
      // |z| near DBL_MAX (1/0 = inf at z = 0 collapses the term to 0).
      return 0.5 + std::copysign(1.0 / (1.0 / std::abs(z) + 2.0), z);
    case SigmoidKind::Cauchy:
      return std::atan(z) / std::numbers::pi + 0.5;
    case SigmoidKind::Optimal:
      if (z < -0.25) return -1.0 / (16.0 * z);
      if (z > 0.25) return 1.0 - 1.0 / (16.0 * z);
      return z + 0.5;
  }
  throw std::invalid_argument("sigmoid: unknown kind");
}

double deriv(const SigmoidSpec& spec, double z) {
  check_spec(spec);
  check_finite(z);
  switch (spec.kind) {
    case SigmoidKind::Logistic:
      return logistic_deriv(z);
    case SigmoidKind::LogisticArt:
      return logistic_deriv(art_warp(spec, z)) * art_warp_deriv(spec, z);
    case SigmoidKind::Reciprocal: {
      const double d = 1.0 + 2.0 * std::abs(z);
      return 1.0 / (d * d);
    }
    case SigmoidKind::Cauchy:
      return 1.0 / (std::numbers::pi * (1.0 + z * z));
    case SigmoidKind::Optimal:
      // The kink points +-1/4 deliberately take the linear-branch value so
      // gradients stay deterministic there.
      if (std::abs(z) <= 0.25) return 1.0;
      return 1.0 / (16.0 * z * z);
  }
  throw std::invalid_argument("sigmoid: unknown kind");
}

double lipschitz_constant(const SigmoidSpec& spec) {
  check_spec(spec);
  switch (spec.kind) {
    case SigmoidKind::Logistic:   return 0.25;
    case SigmoidKind::Reciprocal: return 1.0;
    case SigmoidKind::Cauchy:     return 1.0 / std::numbers::pi;
    case SigmoidKind::Optimal:    return 1.0;
    case SigmoidKind::LogisticArt:
      throw std::invalid_argument(
          "sigmoid: logistic_art has unbounded slope at 0; "
          "no Lipschitz normalization");
  }
  throw std::invalid_argument("sigmoid: unknown kind");
}

bool is_monotonic_kind(SigmoidKind kind) {
  return kind == SigmoidKind::Reciprocal || kind == SigmoidKind::Cauchy ||
         kind == SigmoidKind::Optimal;
}

}  // namespace monosort
