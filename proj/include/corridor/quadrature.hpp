// SPDX-License-Identifier: Apache-2.0
#pragma once

// Adaptive Gauss-Kronrod (G10/K21) integration with semi-infinite maps and
// iterated 2-D / 3-D integration. Rules never evaluate at interval endpoints,
// so integrable endpoint singularities (e.g. x^(-1/2)) are handled.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "corridor/errors.hpp"

namespace corridor {

struct QuadratureConfig {
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  int max_subdivisions = 2000;

  /// Budget for the next nesting level (tolerances / 10).
  QuadratureConfig inner() const noexcept {
    return {rel_tol / 10.0, abs_tol / 10.0, max_subdivisions};
  }
  void validate() const;
};

enum class SemiInfiniteMap {
  Rational,     ///< x = a + t / (1 - t)
  Exponential,  ///< x = a - log(1 - t)
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int subdivisions = 0;
  int evaluations = 0;
};

namespace detail {

struct KronrodRule {
  // Nonnegative abscissae, index 0 is the centre; odd indices are Gauss nodes.
  std::array<double, 11> nodes;
  std::array<double, 11> kronrod_weights;
  std::array<double, 11> gauss_weights;  // zero where the node is Kronrod-only
};

const KronrodRule& kronrod21();

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& other) const noexcept { return error < other.error; }
};

template <class F>
Segment apply_rule(F& f, double a, double b, int& evaluations) {
  const KronrodRule& rule = kronrod21();
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double kronrod = 0.0;
  double gauss = 0.0;
  double f0 = f(centre);
  kronrod += f0 * rule.kronrod_weights[0];
  for (std::size_t i = 1; i < rule.nodes.size(); ++i) {
    const double dx = half * rule.nodes[i];
    const double sum = f(centre - dx) + f(centre + dx);
    kronrod += sum * rule.kronrod_weights[i];
    gauss += sum * rule.gauss_weights[i];
  }
  evaluations += 21;
  const double value = kronrod * half;
  double error = std::abs((kronrod - gauss) * half);
  error = std::max(error, 50.0 * std::numeric_limits<double>::epsilon() * std::abs(value));
  return {a, b, value, error};
}

template <class F>
QuadratureResult integrate_finite(F& f, double a, double b, const QuadratureConfig& cfg) {
  QuadratureResult result;
  std::priority_queue<Segment> heap;
  Segment first = apply_rule(f, a, b, result.evaluations);
  double total = first.value;
  double total_error = first.error;
  heap.push(first);
  while (total_error > std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total))) {
    if (result.subdivisions >= cfg.max_subdivisions) {
      throw AccuracyError("quadrature did not converge after " +
                              std::to_string(result.subdivisions) + " subdivisions",
                          total, total_error);
    }
    Segment worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // interval exhausted at machine precision
      throw AccuracyError("quadrature interval reached machine precision", total, total_error);
    }
    heap.pop();
    Segment left = apply_rule(f, worst.a, mid, result.evaluations);
    Segment right = apply_rule(f, mid, worst.b, result.evaluations);
    total += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++result.subdivisions;
  }
  // re-sum to remove drift from incremental updates
  double sum = 0.0, err = 0.0;
  while (!heap.empty()) {
    sum += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  result.value = sum;
  result.error = err;
  if (!std::isfinite(sum)) {
    throw AccuracyError("quadrature produced a non-finite value", sum, err);
  }
  return result;
}

}  // namespace detail

/// Integral of f over [a, b]; either bound may be infinite.
///
/// Throws AccuracyError (with the best estimate) when the tolerance
/// max(abs_tol, rel_tol * |I|) is not met within max_subdivisions.
template <class F>
QuadratureResult integrate(F&& f, double a, double b, const QuadratureConfig& cfg = {},
                           SemiInfiniteMap map = SemiInfiniteMap::Rational) {
  if (a == b) {
    return {};
  }
  if (a > b) {
    QuadratureResult r = integrate(f, b, a, cfg, map);
    r.value = -r.value;
    return r;
  }
  const bool lower_inf = std::isinf(a);
  const bool upper_inf = std::isinf(b);
  if (lower_inf && upper_inf) {
    QuadratureResult left = integrate(f, a, 0.0, cfg, map);
    QuadratureResult right = integrate(f, 0.0, b, cfg, map);
    return {left.value + right.value, left.error + right.error,
            left.subdivisions + right.subdivisions, left.evaluations + right.evaluations};
  }
  if (!lower_inf && !upper_inf) {
    return detail::integrate_finite(f, a, b, cfg);
  }
  // one infinite end: map t in (0, 1) to the half line starting at the finite end
  const double origin = lower_inf ? b : a;
  const double sign = lower_inf ? -1.0 : 1.0;
  auto mapped = [&](double t) {
    if (!(t < 1.0)) return 0.0;  // node rounded onto the mapped infinity
    double offset, jacobian;
    if (map == SemiInfiniteMap::Rational) {
      const double one_minus = 1.0 - t;
      offset = t / one_minus;
      jacobian = 1.0 / (one_minus * one_minus);
    } else {
      offset = -std::log1p(-t);
      jacobian = 1.0 / (1.0 - t);
    }
    const double value = f(origin + sign * offset);
    return value == 0.0 ? 0.0 : value * jacobian;
  };
  return detail::integrate_finite(mapped, 0.0, 1.0, cfg);
}

/// Iterated integral over { a < x < b, lo(x) < y < hi(x) } of f(x, y).
/// The inner level runs with cfg.inner(); inner failures are rethrown with
/// the level annotated.
template <class F, class Lo, class Hi>
QuadratureResult nested_integrate_2d(F&& f, double a, double b, Lo&& y_lo, Hi&& y_hi,
                                     const QuadratureConfig& cfg = {}) {
  const QuadratureConfig inner_cfg = cfg.inner();
  auto outer = [&](double x) {
    try {
      return integrate([&](double y) { return f(x, y); }, y_lo(x), y_hi(x), inner_cfg).value;
    } catch (const AccuracyError& e) {
      if (!e.level().empty()) throw;
      throw AccuracyError(std::string("inner level: ") + e.what(), e.best_estimate(),
                          e.error_estimate(), "inner");
    }
  };
  try {
    return integrate(outer, a, b, cfg);
  } catch (const AccuracyError& e) {
    if (!e.level().empty()) throw;
    throw AccuracyError(std::string("outer level: ") + e.what(), e.best_estimate(),
                        e.error_estimate(), "outer");
  }
}

/// Iterated triple integral; x in (a, b), y in (y_lo(x), y_hi(x)),
/// z in (z_lo(x, y), z_hi(x, y)).
template <class F, class YLo, class YHi, class ZLo, class ZHi>
QuadratureResult nested_integrate_3d(F&& f, double a, double b, YLo&& y_lo, YHi&& y_hi, ZLo&& z_lo,
                                     ZHi&& z_hi, const QuadratureConfig& cfg = {}) {
  const QuadratureConfig middle_cfg = cfg.inner();
  const QuadratureConfig inner_cfg = middle_cfg.inner();
  auto middle = [&](double x) {
    auto inner = [&](double y) {
      try {
        return integrate([&](double z) { return f(x, y, z); }, z_lo(x, y), z_hi(x, y), inner_cfg)
            .value;
      } catch (const AccuracyError& e) {
        if (!e.level().empty()) throw;
        throw AccuracyError(std::string("inner level: ") + e.what(), e.best_estimate(),
                            e.error_estimate(), "inner");
      }
    };
    try {
      return integrate(inner, y_lo(x), y_hi(x), middle_cfg).value;
    } catch (const AccuracyError& e) {
      if (!e.level().empty()) throw;
      throw AccuracyError(std::string("middle level: ") + e.what(), e.best_estimate(),
                          e.error_estimate(), "middle");
    }
  };
  try {
    return integrate(middle, a, b, cfg);
  } catch (const AccuracyError& e) {
    if (!e.level().empty()) throw;
    throw AccuracyError(std::string("outer level: ") + e.what(), e.best_estimate(),
                        e.error_estimate(), "outer");
  }
}

}  // namespace corridor
