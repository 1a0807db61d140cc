#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lipfield/errors.hpp"

namespace lipfield {

struct RootResult {
  double x;
  int iterations;
};

/**
 * Root of a nondecreasing function on [a, b] by Newton steps safeguarded with
 * bisection. Returns a (resp. b) when the function is >= 0 at a (resp. <= 0 at
 * b), i.e. the minimizer of the convex primitive on [a, b].
 *
 * `fn(x)` returns {f(x), f'(x)}.
 */
template <class Fn>
RootResult find_increasing_root(Fn&& fn, double a, double b, double xtol, int max_iterations) {
  auto [fa, dfa] = fn(a);
  if (fa >= 0.0 || a >= b) return {a, 0};
  auto [fb, dfb] = fn(b);
  if (fb <= 0.0) return {b, 0};

  double lo = a, hi = b;
  // Start from the secant point; it is inside the bracket.
  double x = lo + (hi - lo) * (-fa) / (fb - fa);
  if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
  for (int it = 1; it <= max_iterations; ++it) {
    auto [f, df] = fn(x);
    if (f == 0.0) return {x, it};
    if (f < 0.0) lo = x; else hi = x;
    if (hi - lo <= xtol) return {0.5 * (lo + hi), it};
    double next = (df > 0.0) ? x - f / df : lo - 1.0;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 0.25 * xtol) return {next, it};
    x = next;
  }
  throw NonConvergence("scalar root search exceeded " + std::to_string(max_iterations) +
                       " iterations", {lo, hi});
}

struct ChainSolution {
  std::vector<double> x;
  int iterations = 0;
};

/**
 * Exact minimizer of  sum_i phi_i(x_i)  subject to  lo_i <= x_i <= hi_i  and
 * |x_{i+1} - x_i| <= step, for strictly convex differentiable phi_i.
 *
 * Forward dynamic programming over the chain: V_0 = phi_0 and
 *   V_{i+1}(y) = phi_{i+1}(y) + min_{|x - y| <= step} V_i(x).
 * Each V_i is convex, and the inner minimum is V_i evaluated at y clamped to
 * [x*_i - step, x*_i + step], so V_i' is evaluated by walking back through the
 * stored minimizers x*_j until the window is hit. A backward pass then clamps
 * each x*_i into the window of its successor.
 *
 * `derivs(i, x)` returns {phi_i'(x), phi_i''(x)}.
 */
template <class Derivs>
ChainSolution minimize_chain(Derivs&& derivs, std::span<const double> lo,
                             std::span<const double> hi, double step, double xtol = 1e-15,
                             int max_root_iterations = 200) {
  const int n = static_cast<int>(lo.size());
  std::vector<double> dom_lo(n), dom_hi(n), best(n);
  ChainSolution out;
  out.x.resize(n);
  if (n == 0) return out;

  for (int i = 0; i < n; ++i) {
    dom_lo[i] = lo[i];
    dom_hi[i] = hi[i];
    if (i > 0) {
      dom_lo[i] = std::max(dom_lo[i], dom_lo[i - 1] - step);
      dom_hi[i] = std::min(dom_hi[i], dom_hi[i - 1] + step);
    }
    if (dom_lo[i] > dom_hi[i]) {
      if (dom_lo[i] - dom_hi[i] > 1e-12) {
        throw PreconditionError("chain problem is infeasible at position " + std::to_string(i));
      }
      dom_hi[i] = dom_lo[i];
    }

    auto value_derivs = [&, i](double y) {
      double g = 0.0, gg = 0.0;
      int j = i;
      for (;;) {
        auto [g1, g2] = derivs(j, y);
        g += g1;
        gg += g2;
        if (j == 0) break;
        const double prev = best[j - 1];
        if (y + step < prev) {
          y = std::max(y + step, dom_lo[j - 1]);
        } else if (y - step > prev) {
          y = std::min(y - step, dom_hi[j - 1]);
        } else {
          break;
        }
        --j;
      }
      return std::pair<double, double>{g, gg};
    };
    const RootResult r =
        find_increasing_root(value_derivs, dom_lo[i], dom_hi[i], xtol, max_root_iterations);
    best[i] = r.x;
    out.iterations += r.iterations;
  }

  out.x[n - 1] = best[n - 1];
  for (int i = n - 2; i >= 0; --i) {
    const double a = std::max(dom_lo[i], out.x[i + 1] - step);
    const double b = std::min(dom_hi[i], out.x[i + 1] + step);
    out.x[i] = std::clamp(best[i], a, std::max(a, b));
  }
  return out;
}

}  // namespace lipfield
