#pragma once

// Incomplete gamma functions, the truncated-gamma helper used by the
// link-SNR closed forms, and Bessel J0. All functions are pure and
// thread-safe.

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cogfso::specfun {

inline constexpr double kEps = std::numeric_limits<double>::epsilon();

namespace detail {

inline void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw std::domain_error(what);
}

inline bool is_small_integer(double s, int limit = 512) {
  return s == std::floor(s) && s >= 1.0 && s <= static_cast<double>(limit);
}

// log(sum_{l=0}^{a-1} y^l / l!) for integer a >= 1, y >= 0.
inline double log_truncated_exp_sum(int a, double y) {
  if (y <= 0.0) return 0.0;
  const double ln_y = std::log(y);
  double acc = 0.0;  // l = 0 term
  double log_t = 0.0;
  for (int l = 1; l < a; ++l) {
    log_t += ln_y - std::log(static_cast<double>(l));
    acc = acc > log_t ? acc + std::log1p(std::exp(log_t - acc))
                      : log_t + std::log1p(std::exp(acc - log_t));
  }
  return acc;
}

// Series for P(s,x), valid for x < s + 1.
inline double reg_lower_series(double s, double x) {
  double ap = s;
  double sum = 1.0 / s;
  double del = sum;
  for (int n = 0; n < 1000; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * kEps) break;
  }
  return sum * std::exp(-x + s * std::log(x) - std::lgamma(s));
}

// Continued fraction (modified Lentz) for Q(s,x), valid for x >= s + 1.
inline double reg_upper_cf(double s, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - s;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 1000; ++i) {
    const double an = -i * (i - s);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return std::exp(-x + s * std::log(x) - std::lgamma(s)) * h;
}

}  // namespace detail

/// Regularized lower incomplete gamma P(s,x) = gamma(s,x)/Gamma(s).
inline double reg_lower_gamma(double s, double x) {
  detail::require_finite(s, "incomplete gamma: non-finite shape");
  detail::require_finite(x, "incomplete gamma: non-finite argument");
  if (s <= 0.0) throw std::domain_error("reg_lower_gamma: shape must be positive");
  if (x < 0.0) throw std::domain_error("reg_lower_gamma: argument must be non-negative");
  if (x == 0.0) return 0.0;
  // Integer shapes use the finite-sum identity
  // gamma(s,x) = (s-1)! (1 - e^{-x} sum_{m<s} x^m/m!) in log space; for
  // small x the identity cancels below machine precision, so the series
  // takes over there to keep full relative accuracy.
  if (detail::is_small_integer(s) && x >= 1.0) {
    const double log_q = -x + detail::log_truncated_exp_sum(static_cast<int>(s), x);
    return -std::expm1(log_q);
  }
  if (x < s + 1.0) return detail::reg_lower_series(s, x);
  return 1.0 - detail::reg_upper_cf(s, x);
}

/// Unregularized lower incomplete gamma.
inline double lower_gamma(double s, double x) {
  return std::tgamma(s) * reg_lower_gamma(s, x);
}

/// Upper incomplete gamma Gamma(s,x).
inline double upper_gamma(double s, double x) {
  detail::require_finite(s, "incomplete gamma: non-finite shape");
  detail::require_finite(x, "incomplete gamma: non-finite argument");
  if (s <= 0.0) throw std::domain_error("upper_gamma: shape must be positive");
  if (x < 0.0) throw std::domain_error("upper_gamma: argument must be non-negative");
  if (x == 0.0) return std::tgamma(s);
  if (detail::is_small_integer(s)) {
    const double log_q = -x + detail::log_truncated_exp_sum(static_cast<int>(s), x);
    return std::exp(std::lgamma(s) + log_q);
  }
  if (x < s + 1.0) return std::tgamma(s) * (1.0 - detail::reg_lower_series(s, x));
  return std::tgamma(s) * detail::reg_upper_cf(s, x);
}

/// log of J(a;b) = Gamma(a, b*ratio) / b^a for integer a >= 1.
inline double log_j_func(int a, double b, double ratio) {
  if (a < 1) throw std::domain_error("j_func: order must be a positive integer");
  if (!(b > 0.0) || !std::isfinite(b)) throw std::domain_error("j_func: rate must be positive");
  if (ratio < 0.0 || !std::isfinite(ratio)) throw std::domain_error("j_func: ratio must be non-negative");
  const double y = b * ratio;
  return std::lgamma(static_cast<double>(a)) - y +
         detail::log_truncated_exp_sum(a, y) - a * std::log(b);
}

/// Truncated-gamma helper J(a;b) with truncation point b*ratio.
inline double j_func(int a, double b, double ratio) {
  return std::exp(log_j_func(a, b, ratio));
}

/// Bessel function of the first kind, order zero.
inline double bessel_j0(double x) {
  detail::require_finite(x, "bessel_j0: non-finite argument");
  return std::cyl_bessel_j(0.0, std::abs(x));
}

/// log of binomial(n, k).
inline double log_binom(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace cogfso::specfun
