#pragma once

// Univariate Meijer G evaluation with two independent backends (residue
// series over one pole group, and numerical Mellin-Barnes contour
// integration), plus a bivariate G evaluated by double-contour
// integration. Coincident poles are handled by symmetric parameter
// perturbation; results in that regime carry roughly 1e-6 accuracy.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cogfso::meijer {

inline constexpr double kPi = 3.14159265358979323846;

// ---------------------------------------------------------------------
// Signed real log-gamma and complex log-gamma (Lanczos, g = 7).
// ---------------------------------------------------------------------

struct SignedLog {
  double lg = 0.0;  // log of magnitude
  int sign = 1;     // -1, 0 (pole flag uses sign = 0 via is_pole), +1
};

namespace detail {

inline bool near_nonpos_int(double x, double tol = 1e-12) {
  return x <= 0.5 && std::abs(x - std::round(x)) < tol;
}

// log |Gamma(x)| with sign; pole -> sign 0.
inline SignedLog lgamma_signed(double x) {
  if (near_nonpos_int(x)) return {0.0, 0};
  if (x > 0.0) return {std::lgamma(x), 1};
  // reflection: Gamma(x) = pi / (sin(pi x) Gamma(1 - x))
  const double r = x - std::round(x);
  const double sin_mag = std::abs(std::sin(kPi * r));
  const long long flr = static_cast<long long>(std::floor(x));
  // sign of sin(pi x): positive on (2k, 2k+1)
  const int sin_sign = (flr % 2 == 0) ? 1 : -1;
  const double lg = std::log(kPi) - std::log(sin_mag) - std::lgamma(1.0 - x);
  return {lg, sin_sign};
}

inline constexpr double kLanczos[9] = {
    0.99999999999980993,      676.5203681218851,     -1259.1392167224028,
    771.32342877765313,       -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,     9.9843695780195716e-6, 1.5056327351493116e-7};

// Complex log-gamma up to 2*pi*i multiples (callers only exponentiate
// sums of these). Reflection for Re z < 0.5 uses a form of log(sin(pi z))
// that stays bounded for large |Im z|.
inline std::complex<double> log_gamma(std::complex<double> z) {
  if (z.real() < 0.5) {
    // reflection formula
    const std::complex<double> i(0.0, 1.0);
    std::complex<double> ls;
    if (z.imag() >= 0.0) {
      ls = -i * kPi * z + std::log(std::complex<double>(0.0, 0.5)) +
           std::log(1.0 - std::exp(2.0 * i * kPi * z));
    } else {
      ls = std::conj(-i * kPi * std::conj(z) + std::log(std::complex<double>(0.0, 0.5)) +
                     std::log(1.0 - std::exp(2.0 * i * kPi * std::conj(z))));
    }
    return std::log(std::complex<double>(kPi, 0.0)) - ls - log_gamma(1.0 - z);
  }
  const std::complex<double> zm1 = z - 1.0;
  std::complex<double> acc(kLanczos[0], 0.0);
  for (int k = 1; k < 9; ++k) acc += kLanczos[k] / (zm1 + static_cast<double>(k));
  const std::complex<double> t = zm1 + 7.5;
  return 0.5 * std::log(2.0 * kPi) + (zm1 + 0.5) * std::log(t) - t + std::log(acc);
}

}  // namespace detail

// ---------------------------------------------------------------------
// Specs
// ---------------------------------------------------------------------

struct MeijerGSpec {
  int m = 0;
  int n = 0;
  std::vector<double> a;  // p upper parameters
  std::vector<double> b;  // q lower parameters

  int p() const { return static_cast<int>(a.size()); }
  int q() const { return static_cast<int>(b.size()); }

  void validate() const {
    if (m < 0 || n < 0 || m > q() || n > p())
      throw std::invalid_argument("MeijerGSpec: index bounds violated (need m <= q, n <= p)");
    for (double v : a)
      if (!std::isfinite(v)) throw std::invalid_argument("MeijerGSpec: non-finite a-parameter");
    for (double v : b)
      if (!std::isfinite(v)) throw std::invalid_argument("MeijerGSpec: non-finite b-parameter");
  }

  // Pole families of the chosen residue side are pairwise distinct, i.e.
  // no two exponents differ by an integer.
  bool residue_poles_distinct(bool right_side, double tol = 1e-9) const {
    const int cnt = right_side ? m : n;
    for (int i = 0; i < cnt; ++i)
      for (int j = i + 1; j < cnt; ++j) {
        const double d = right_side ? b[i] - b[j] : a[i] - a[j];
        if (std::abs(d - std::round(d)) < tol) return false;
      }
    return true;
  }
};

namespace detail {

inline double mb_real_log_magnitude(const MeijerGSpec& g, double sigma, double lz) {
  double lg = sigma * lz;
  auto add = [&lg](double arg, double sgn) {
    const SignedLog sl = lgamma_signed(arg);
    if (sl.sign == 0) { lg = std::numeric_limits<double>::infinity(); return; }
    lg += sgn * sl.lg;
  };
  for (int j = 0; j < g.m; ++j) add(g.b[j] - sigma, +1.0);
  for (int i = 0; i < g.n; ++i) add(1.0 - g.a[i] + sigma, +1.0);
  for (int j = g.m; j < g.q(); ++j) add(1.0 - g.b[j] + sigma, -1.0);
  for (int i = g.n; i < g.p(); ++i) add(g.a[i] - sigma, -1.0);
  return lg;
}

}  // namespace detail

struct GEvalOptions {
  double rel_tol = 1e-11;
  double abs_tol = 0.0;          // absolute acceptance floor for the contour
  int max_terms = 1400;          // residue series length cap per family
  std::int64_t max_points = 400000;  // contour evaluation cap
  std::optional<double> sigma;   // contour abscissa override
  double cancel_guard = 1e13;    // max term / |sum| rejection threshold
};

struct GEvalResult {
  double value = 0.0;
  double err_est = std::numeric_limits<double>::infinity();
  bool converged = false;
  bool perturbed = false;
  const char* backend = "none";
  std::int64_t evals = 0;

  double checked() const {
    if (!converged) throw std::runtime_error(std::string("meijer_g: backend '") + backend +
                                             "' failed to converge");
    return value;
  }
};

// ---------------------------------------------------------------------
// Residue (Slater-type) series backend
// ---------------------------------------------------------------------

enum class Side { right, left };

namespace detail {

struct Family {
  double expo = 0.0;               // exponent of z (right) or of z with series in 1/z (left)
  std::vector<double> lcoef;       // log magnitude of series coefficients
  std::vector<signed char> csign;  // sign of coefficients; 0 marks a zero term
  bool terminated = false;         // finite family (denominator pole chain)
  bool failed = false;             // numerator pole: series representation invalid

  std::size_t size() const { return lcoef.size(); }
};

// Build the coefficient table of one pole family.
inline Family build_family(const MeijerGSpec& g, Side side, int h, int max_terms) {
  Family fam;
  const int p = g.p(), q = g.q();
  const double base = side == Side::right ? g.b[h] : g.a[h];
  fam.expo = side == Side::right ? base : base - 1.0;
  fam.lcoef.reserve(64);
  fam.csign.reserve(64);
  for (int l = 0; l < max_terms; ++l) {
    double lg = -std::lgamma(l + 1.0);
    int sign = (l % 2 == 0) ? 1 : -1;
    bool zero = false;
    bool stop = false;
    auto mul_num = [&](double arg) {
      const SignedLog sl = lgamma_signed(arg);
      if (sl.sign == 0) { fam.failed = true; return; }
      lg += sl.lg;
      sign *= sl.sign;
    };
    // div_dec: denominator factor whose argument decreases with l; a pole
    // there zeroes every later term as well.
    auto div_dec = [&](double arg) {
      if (near_nonpos_int(arg)) { stop = true; return; }
      const SignedLog sl = lgamma_signed(arg);
      lg -= sl.lg;
      sign *= sl.sign;
    };
    // div_inc: denominator factor with increasing argument; a pole zeroes
    // only the current term.
    auto div_inc = [&](double arg) {
      if (near_nonpos_int(arg)) { zero = true; return; }
      const SignedLog sl = lgamma_signed(arg);
      lg -= sl.lg;
      sign *= sl.sign;
    };
    if (side == Side::right) {
      for (int j = 0; j < g.m && !fam.failed; ++j)
        if (j != h) mul_num(g.b[j] - base - l);
      for (int i = 0; i < g.n && !fam.failed; ++i) mul_num(1.0 - g.a[i] + base + l);
      if (!fam.failed) {
        for (int j = g.m; j < q && !stop; ++j) div_inc(1.0 - g.b[j] + base + l);
        for (int i = g.n; i < p && !stop; ++i) div_dec(g.a[i] - base - l);
      }
    } else {
      for (int j = 0; j < g.m && !fam.failed; ++j) mul_num(g.b[j] - base + 1.0 + l);
      for (int i = 0; i < g.n && !fam.failed; ++i)
        if (i != h) mul_num(base - g.a[i] - l);
      if (!fam.failed) {
        for (int j = g.m; j < q && !stop; ++j) div_dec(base - g.b[j] - l);
        for (int i = g.n; i < p && !stop; ++i) div_inc(g.a[i] - base + 1.0 + l);
      }
    }
    if (fam.failed) return fam;
    if (stop) { fam.terminated = true; return fam; }
    fam.lcoef.push_back(zero ? -std::numeric_limits<double>::infinity() : lg);
    fam.csign.push_back(zero ? 0 : static_cast<signed char>(sign));
  }
  return fam;
}

}  // namespace detail

class SlaterExpansion {
 public:
  SlaterExpansion(const MeijerGSpec& spec, Side side, int max_terms = 1400)
      : spec_(spec), side_(side) {
    spec.validate();
    perturbed_ = !spec.residue_poles_distinct(side == Side::right);
    if (!perturbed_) {
      branches_.push_back(build_branch(spec, side, max_terms));
    } else {
      for (double eps : {1e-6, -1e-6})
        branches_.push_back(build_branch(perturb(spec, side, eps), side, max_terms));
    }
    usable_ = true;
    for (const auto& br : branches_)
      for (const auto& f : br)
        if (f.failed) usable_ = false;
    const int cnt = side == Side::right ? spec.m : spec.n;
    if (cnt == 0) usable_ = false;
  }

  bool usable() const { return usable_; }
  bool perturbed() const { return perturbed_; }
  Side side() const { return side_; }

  GEvalResult eval(double z, const GEvalOptions& opts = {}) const {
    GEvalResult out;
    out.backend = side_ == Side::right ? "residue-right" : "residue-left";
    out.perturbed = perturbed_;
    if (!usable_ || !(z > 0.0)) return out;
    BranchEval e0 = eval_branch(branches_[0], z, opts, out.evals);
    bool ok = e0.ok;
    double max_term = e0.max_term;
    if (branches_.size() == 2) {
      BranchEval e1 = eval_branch(branches_[1], z, opts, out.evals);
      ok = ok && e1.ok;
      max_term = std::max(max_term, e1.max_term);
      out.value = 0.5 * (e0.value + e1.value);
      out.err_est = std::max(std::max(e0.tail, e1.tail), 0.5 * std::abs(e0.value - e1.value));
    } else {
      out.value = e0.value;
      out.err_est = e0.tail;
    }
    // Deep cross-family cancellation can leave a self-consistent-looking
    // garbage sum; cap accepted magnitudes by a Mellin-Barnes line bound.
    if (ok && max_term > 1e3) {
      const double bound = line_log_magnitude_bound(z);
      if (std::isfinite(bound) && std::log(std::abs(out.value) + 1e-300) > bound + 45.0) {
        ok = false;
        out.err_est = std::max(out.err_est, std::abs(out.value));
      }
    }
    // Perturbed evaluations are only claimed to ~1e-6 relative accuracy.
    const double gate = perturbed_ ? 1e-4 : opts.rel_tol;
    out.converged = ok && out.err_est <= std::max(gate * std::abs(out.value), 1e-300);
    return out;
  }

  // Preferred summation side: ascending series when q > p (or q == p with
  // z < 1), descending otherwise.
  static Side preferred_side(const MeijerGSpec& g, double z) {
    if (g.q() > g.p()) return Side::right;
    if (g.p() > g.q()) return Side::left;
    return z < 1.0 ? Side::right : Side::left;
  }

 private:
  using Branch = std::vector<detail::Family>;

  struct BranchEval {
    double value = 0.0;
    double tail = 0.0;
    double max_term = 0.0;
    bool ok = false;
  };

  // Minimum line magnitude of the Mellin-Barnes integrand over a sigma
  // candidate set; an upper-bound scale for |G(z)|.
  double line_log_magnitude_bound(double z) const {
    const double lz = std::log(z);
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (int i = 0; i < spec_.n; ++i) lo = std::max(lo, spec_.a[i] - 1.0);
    for (int j = 0; j < spec_.m; ++j) hi = std::min(hi, spec_.b[j]);
    std::vector<double> cands;
    if (std::isfinite(lo) && std::isfinite(hi) && lo < hi - 1e-9) {
      for (int k = 1; k <= 7; ++k) cands.push_back(lo + (hi - lo) * k / 8.0);
    } else if (std::isfinite(hi)) {
      for (double d : {0.3, 0.9, 2.1, 4.7, 9.9, 20.3, 41.1}) cands.push_back(hi - d);
    } else if (std::isfinite(lo)) {
      for (double d : {0.3, 0.9, 2.1, 4.7, 9.9, 20.3, 41.1}) cands.push_back(lo + d);
    }
    double best = std::numeric_limits<double>::infinity();
    for (double c : cands) {
      const double mag = detail::mb_real_log_magnitude(spec_, c, lz);
      if (std::isfinite(mag)) best = std::min(best, mag);
    }
    return best;
  }

  static MeijerGSpec perturb(const MeijerGSpec& g, Side side, double eps) {
    MeijerGSpec out = g;
    auto& params = side == Side::right ? out.b : out.a;
    const int cnt = side == Side::right ? g.m : g.n;
    // shift every later member of each integer-spaced cluster
    for (int i = 0; i < cnt; ++i) {
      int rank = 0;
      for (int j = 0; j < i; ++j) {
        const double d = params[i] - params[j];
        if (std::abs(d - std::round(d)) < 1e-9) ++rank;
      }
      if (rank > 0) params[i] += eps * rank;
    }
    return out;
  }

  static Branch build_branch(const MeijerGSpec& g, Side side, int max_terms) {
    Branch br;
    const int cnt = side == Side::right ? g.m : g.n;
    for (int h = 0; h < cnt; ++h) br.push_back(detail::build_family(g, side, h, max_terms));
    return br;
  }

  BranchEval eval_branch(const Branch& br, double z, const GEvalOptions& opts,
                         std::int64_t& evals) const {
    BranchEval out;
    const double lz = std::log(z);
    double total = 0.0, comp = 0.0;  // Neumaier compensated sum
    double max_term = 0.0;
    double max_abs_lpow = 0.0;
    std::int64_t n_terms = 0;
    bool all_ok = true;
    double worst_tail = 0.0;
    for (const auto& fam : br) {
      if (fam.failed) return out;
      const double step = side_ == Side::right ? lz : -lz;
      double lpow = fam.expo * lz;
      double last = 0.0;
      std::size_t l = 0;
      int small_run = 0;
      bool tail_small = false;
      bool seen_nonzero = false;
      double prev_abs = 0.0;
      bool seen_decay = false;
      for (; l < fam.size(); ++l, lpow += step) {
        double t = 0.0;
        if (fam.csign[l] != 0) {
          const double lt = fam.lcoef[l] + lpow;
          if (lt >= 700.0) return out;  // genuine overflow: series unusable here
          if (lt > -720.0) t = fam.csign[l] * std::exp(lt);
        }
        ++evals;
        ++n_terms;
        max_abs_lpow = std::max(max_abs_lpow, std::abs(lpow));
        const double s = total + t;
        comp += (std::abs(total) >= std::abs(t)) ? ((total - s) + t) : ((t - s) + total);
        total = s;
        max_term = std::max(max_term, std::abs(t));
        if (t != 0.0) {
          if (seen_nonzero && std::abs(t) <= prev_abs) seen_decay = true;
          seen_nonzero = true;
          prev_abs = std::abs(t);
        }
        last = std::abs(t);
        if (l > 2 && last < 1e-17 * (std::abs(total) + 1e-300) + 1e-305) {
          if (++small_run >= 3 && ((seen_nonzero && seen_decay) || l > 6)) {
            tail_small = true;
            break;
          }
        } else {
          small_run = 0;
        }
      }
      const bool exhausted_finite = fam.terminated && l >= fam.size();
      if (exhausted_finite) continue;  // exact finite sum, no tail
      if (!tail_small) all_ok = false;
      worst_tail = std::max(worst_tail, last);
    }
    total += comp;
    out.value = total;
    // roundoff floor: per-term relative error scales with the log ranges
    // entering exp(), accumulated over the summation length
    const double per_term = 1e-16 * (8.0 + 2.0 * max_abs_lpow +
                                     0.5 * std::abs(std::log(max_term + 1e-300)));
    out.tail = worst_tail + per_term * std::sqrt(static_cast<double>(n_terms + 1)) * max_term;
    out.max_term = max_term;
    if (max_term > opts.cancel_guard * (std::abs(total) + 1e-300)) all_ok = false;
    out.ok = all_ok;
    return out;
  }

  std::vector<Branch> branches_;
  MeijerGSpec spec_;
  Side side_;
  bool usable_ = false;
  bool perturbed_ = false;
};

inline GEvalResult meijer_g_residue(const MeijerGSpec& spec, double z,
                                    const GEvalOptions& opts = {}) {
  SlaterExpansion ex(spec, SlaterExpansion::preferred_side(spec, z), opts.max_terms);
  return ex.eval(z, opts);
}

// ---------------------------------------------------------------------
// Mellin-Barnes contour backend
// ---------------------------------------------------------------------

namespace detail {

inline std::complex<double> mb_log_integrand(const MeijerGSpec& g, std::complex<double> s) {
  std::complex<double> lg(0.0, 0.0);
  for (int j = 0; j < g.m; ++j) lg += log_gamma(g.b[j] - s);
  for (int i = 0; i < g.n; ++i) lg += log_gamma(1.0 - g.a[i] + s);
  for (int j = g.m; j < g.q(); ++j) lg -= log_gamma(1.0 - g.b[j] + s);
  for (int i = g.n; i < g.p(); ++i) lg -= log_gamma(g.a[i] - s);
  return lg;
}

// Exponential decay rate of |integrand| along the vertical line.
inline double mb_decay_rate(const MeijerGSpec& g) {
  return 0.5 * kPi * (2.0 * (g.m + g.n) - g.p() - g.q());
}

struct ContourLine {
  double sigma;
  bool feasible = false;
};

inline ContourLine choose_sigma(const MeijerGSpec& g, double z,
                                const std::optional<double>& override_sigma) {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (int i = 0; i < g.n; ++i) lo = std::max(lo, g.a[i] - 1.0);
  for (int j = 0; j < g.m; ++j) hi = std::min(hi, g.b[j]);
  if (override_sigma) {
    // Caller-supplied abscissa is taken as-is; deliberately shifted
    // contours (pole-crossing complements) are the caller's bookkeeping.
    return {*override_sigma, *override_sigma < hi};
  }
  if (lo >= hi - 1e-10) return {0.0, false};
  const double lz = std::log(z);
  std::vector<double> cands;
  if (std::isfinite(lo) && std::isfinite(hi)) {
    for (int k = 1; k <= 13; ++k) cands.push_back(lo + (hi - lo) * k / 14.0);
  } else if (std::isfinite(hi)) {
    for (double d : {0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0}) cands.push_back(hi - d);
  } else if (std::isfinite(lo)) {
    for (double d : {0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0}) cands.push_back(lo + d);
  } else {
    cands.push_back(0.0);
  }
  double best = cands.front(), best_mag = std::numeric_limits<double>::infinity();
  for (double c : cands) {
    if (!(c > lo && c < hi)) continue;
    const double mag = mb_real_log_magnitude(g, c, lz);
    if (std::isfinite(mag) && mag < best_mag) { best_mag = mag; best = c; }
  }
  return {best, std::isfinite(best_mag)};
}

}  // namespace detail

inline GEvalResult meijer_g_contour(const MeijerGSpec& spec, double z,
                                    const GEvalOptions& opts = {}) {
  spec.validate();
  GEvalResult out;
  out.backend = "contour";
  if (!(z > 0.0)) return out;
  const double decay = detail::mb_decay_rate(spec);
  if (decay <= 1e-9) return out;  // line integral not absolutely convergent
  const auto line = detail::choose_sigma(spec, z, opts.sigma);
  if (!line.feasible) return out;
  const double sigma = line.sigma;
  const double lz = std::log(z);

  // One-sided trapezoid of the conjugate-symmetric integrand.
  auto sweep = [&](double h) {
    const std::complex<double> s0(sigma, 0.0);
    double acc = 0.5 * std::real(std::exp(detail::mb_log_integrand(spec, s0) +
                                          std::complex<double>(sigma * lz, 0.0)));
    double fmax = std::abs(acc);
    int quiet = 0;
    std::int64_t k = 1;
    for (; k * 2 < opts.max_points; ++k) {
      const double t = k * h;
      const std::complex<double> s(sigma, t);
      const std::complex<double> lgv =
          detail::mb_log_integrand(spec, s) + std::complex<double>(sigma * lz, t * lz);
      double term = 0.0;
      if (lgv.real() < 700.0) term = std::real(std::exp(lgv));
      acc += term;
      fmax = std::max(fmax, std::abs(term));
      if (std::abs(term) < 1e-18 * (fmax + 1e-300)) {
        if (++quiet >= 24) break;
      } else {
        quiet = 0;
      }
      if (decay * t > 750.0) break;
    }
    out.evals += k;
    return acc * h / kPi;
  };

  double h = std::min(0.35, kPi / (4.0 * (1.0 + std::abs(lz))));
  double prev = sweep(h);
  double prev_diff = std::numeric_limits<double>::infinity();
  for (int level = 0; level < 9; ++level) {
    const double cur = sweep(h * 0.5);
    const double diff = std::abs(cur - prev);
    const double accept = std::max({1e-305, opts.abs_tol, opts.rel_tol * std::abs(cur)});
    if (diff <= accept || out.evals > opts.max_points) {
      out.value = cur;
      out.err_est = diff;
      out.converged = diff <= accept * 4.0 || diff <= 1e-7 * std::abs(cur);
      return out;
    }
    // geometric convergence stalled: further halving will not help
    if (level >= 3 && diff > 0.5 * prev_diff) {
      out.value = cur;
      out.err_est = diff;
      return out;
    }
    prev = cur;
    prev_diff = diff;
    h *= 0.5;
  }
  out.value = prev;
  return out;
}

/// log magnitude of the Mellin-Barnes integrand at real abscissa sigma;
/// used by callers that pick shifted contours themselves.
inline double contour_log_magnitude(const MeijerGSpec& g, double sigma, double z) {
  return detail::mb_real_log_magnitude(g, sigma, std::log(z));
}

// ---------------------------------------------------------------------
// Automatic front end: residue series preferred, contour fallback.
// ---------------------------------------------------------------------

inline GEvalResult meijer_g(const MeijerGSpec& spec, double z, const GEvalOptions& opts = {}) {
  GEvalResult res = meijer_g_residue(spec, z, opts);
  if (res.converged) return res;
  GEvalResult con = meijer_g_contour(spec, z, opts);
  if (con.converged) return con;
  return res.err_est < con.err_est ? res : con;
}

// ---------------------------------------------------------------------
// Bivariate G: (1/2pi i)^2 integral of Phi_outer(s+t) Phi_1(s) Phi_2(t)
// x^s y^t ds dt over two vertical lines.
// ---------------------------------------------------------------------

struct BivariateGSpec {
  MeijerGSpec outer;  // applied at s + t
  MeijerGSpec g1;     // applied at s
  MeijerGSpec g2;     // applied at t

  void validate() const {
    outer.validate();
    g1.validate();
    g2.validate();
  }
};

namespace detail {

struct Strip {
  double lo, hi;
};

inline Strip strip_of(const MeijerGSpec& g) {
  Strip s{-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  for (int i = 0; i < g.n; ++i) s.lo = std::max(s.lo, g.a[i] - 1.0);
  for (int j = 0; j < g.m; ++j) s.hi = std::min(s.hi, g.b[j]);
  return s;
}

}  // namespace detail

inline GEvalResult meijer_g_bivariate(const BivariateGSpec& spec, double x, double y,
                                      const GEvalOptions& opts = {}) {
  spec.validate();
  GEvalResult out;
  out.backend = "contour2d";
  if (!(x > 0.0) || !(y > 0.0)) return out;
  const double d1 = detail::mb_decay_rate(spec.g1);
  const double d2 = detail::mb_decay_rate(spec.g2);
  const double douter = 0.5 * kPi * (2.0 * (spec.outer.m + spec.outer.n) -
                                     spec.outer.p() - spec.outer.q());
  if (d1 + std::min(0.0, douter) <= 1e-9 || d2 + std::min(0.0, douter) <= 1e-9) return out;

  const auto s1 = detail::strip_of(spec.g1);
  const auto s2 = detail::strip_of(spec.g2);
  const auto so = detail::strip_of(spec.outer);
  auto pick = [](const detail::Strip& s, double fallback) {
    if (std::isfinite(s.lo) && std::isfinite(s.hi)) return 0.5 * (s.lo + s.hi);
    if (std::isfinite(s.hi)) return s.hi - 0.5;
    if (std::isfinite(s.lo)) return s.lo + 0.5;
    return fallback;
  };
  double sig1 = pick(s1, 0.0);
  double sig2 = pick(s2, 0.0);
  // nudge to satisfy the outer strip on s + t
  for (int it = 0; it < 64 && sig1 + sig2 <= so.lo + 1e-9; ++it) {
    bool moved = false;
    if (sig1 + 0.05 < s1.hi) { sig1 += 0.05; moved = true; }
    if (sig1 + sig2 <= so.lo + 1e-9 && sig2 + 0.05 < s2.hi) { sig2 += 0.05; moved = true; }
    if (!moved) return out;
  }
  for (int it = 0; it < 64 && sig1 + sig2 >= so.hi - 1e-9; ++it) {
    bool moved = false;
    if (sig1 - 0.05 > s1.lo) { sig1 -= 0.05; moved = true; }
    if (sig1 + sig2 >= so.hi - 1e-9 && sig2 - 0.05 > s2.lo) { sig2 -= 0.05; moved = true; }
    if (!moved) return out;
  }
  if (!(sig1 > s1.lo && sig1 < s1.hi && sig2 > s2.lo && sig2 < s2.hi &&
        sig1 + sig2 > so.lo && sig1 + sig2 < so.hi))
    return out;

  const double lx = std::log(x), ly = std::log(y);

  auto sweep = [&](double h, int half_n) {
    const int n_pts = 2 * half_n + 1;
    std::vector<std::complex<double>> fa(n_pts), fb(n_pts), fo(4 * half_n + 1);
    for (int k = -half_n; k <= half_n; ++k) {
      const std::complex<double> s(sig1, k * h);
      const std::complex<double> t(sig2, k * h);
      const auto la = detail::mb_log_integrand(spec.g1, s) + s * lx;
      const auto lb = detail::mb_log_integrand(spec.g2, t) + t * ly;
      fa[k + half_n] = la.real() < 700.0 ? std::exp(la) : 0.0;
      fb[k + half_n] = lb.real() < 700.0 ? std::exp(lb) : 0.0;
    }
    for (int w = -2 * half_n; w <= 2 * half_n; ++w) {
      const std::complex<double> u(sig1 + sig2, w * h);
      const auto lo = detail::mb_log_integrand(spec.outer, u);
      fo[w + 2 * half_n] = lo.real() < 700.0 ? std::exp(lo) : 0.0;
    }
    std::complex<double> acc(0.0, 0.0);
    for (int k = -half_n; k <= half_n; ++k) {
      if (fa[k + half_n] == std::complex<double>(0.0, 0.0)) continue;
      std::complex<double> row(0.0, 0.0);
      for (int l = -half_n; l <= half_n; ++l)
        row += fb[l + half_n] * fo[k + l + 2 * half_n];
      acc += fa[k + half_n] * row;
    }
    out.evals += static_cast<std::int64_t>(n_pts) * n_pts;
    // (h/2pi)^2 and the two (1/i) factors cancel against the dt ds = (i du)(i dv)
    return std::real(acc) * h * h / (4.0 * kPi * kPi);
  };

  const double dmin = std::min(d1, d2) + std::min(0.0, douter);
  const double tol2d = std::max(opts.rel_tol, 1e-9);
  double h = std::min(0.3, kPi / (4.0 * (1.0 + std::max(std::abs(lx), std::abs(ly)))));
  double span = std::max(40.0 / std::max(dmin, 0.5), 12.0);
  double prev = sweep(h, static_cast<int>(span / h));
  for (int level = 0; level < 4; ++level) {
    h *= 0.5;
    const double cur = sweep(h, static_cast<int>(span / h));
    const double diff = std::abs(cur - prev);
    if (diff <= std::max(1e-300, tol2d * std::abs(cur))) {
      out.value = cur;
      out.err_est = diff;
      out.converged = true;
      return out;
    }
    prev = cur;
    if (out.evals > 40'000'000) break;
  }
  out.value = prev;
  return out;
}

}  // namespace cogfso::meijer
