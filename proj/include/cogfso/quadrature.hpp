#pragma once

// Adaptive Gauss-Kronrod (G7,K15) quadrature with a worst-interval-first
// subdivision queue. Semi-infinite integrals go through x = t/(1-t).

#include <cmath>
#include <cstdint>
#include <functional>
#include <queue>
#include <vector>

namespace cogfso::quad {

struct QuadOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-9;
  std::int64_t max_evals = 1'000'000;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  std::int64_t evals = 0;
  bool converged = false;
};

namespace detail {

// K15 nodes on [0,1] half-interval (symmetric) and weights; G7 weights on
// the odd-indexed nodes.
inline constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline constexpr double kWg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <typename F>
inline Segment gk15(const F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double res_g = fc * kWg[3];
  double res_k = fc * kWgk[7];
  for (int j = 0; j < 7; ++j) {
    const double x = h * kXgk[j];
    const double fsum = f(c - x) + f(c + x);
    res_k += kWgk[j] * fsum;
    if (j % 2 == 1) res_g += kWg[j / 2] * fsum;
  }
  res_k *= h;
  res_g *= h;
  return {a, b, res_k, std::abs(res_k - res_g)};
}

}  // namespace detail

template <typename F>
inline QuadResult integrate(F&& f, double a, double b, const QuadOptions& opts = {}) {
  QuadResult out;
  if (a == b) {
    out.converged = true;
    return out;
  }
  std::priority_queue<detail::Segment> heap;
  detail::Segment s0 = detail::gk15(f, a, b);
  out.evals = 15;
  double total = s0.value;
  double err = s0.error;
  heap.push(s0);
  while (true) {
    const double tol = std::max(opts.abs_tol, opts.rel_tol * std::abs(total));
    if (err <= tol) {
      out.converged = true;
      break;
    }
    if (out.evals + 30 > opts.max_evals || heap.empty()) break;
    detail::Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid == worst.a || mid == worst.b) continue;  // interval exhausted
    detail::Segment l = detail::gk15(f, worst.a, mid);
    detail::Segment r = detail::gk15(f, mid, worst.b);
    out.evals += 30;
    total += l.value + r.value - worst.value;
    err += l.error + r.error - worst.error;
    heap.push(l);
    heap.push(r);
  }
  out.value = total;
  out.error = err;
  return out;
}

/// Integral of f over (0, inf) via the substitution x = t/(1-t).
template <typename F>
inline QuadResult integrate_half_line(F&& f, const QuadOptions& opts = {}) {
  auto g = [&f](double t) {
    const double om = 1.0 - t;
    const double x = t / om;
    return f(x) / (om * om);
  };
  return integrate(g, 0.0, 1.0, opts);
}

/// Integral of f over (a, inf).
template <typename F>
inline QuadResult integrate_from(F&& f, double a, const QuadOptions& opts = {}) {
  auto shifted = [&f, a](double u) { return f(a + u); };
  return integrate_half_line(shifted, opts);
}

}  // namespace cogfso::quad
