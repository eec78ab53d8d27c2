#pragma once

// SNR law of the optical hop: Gamma-Gamma turbulence with pointing
// errors, for heterodyne (theta = 1) and IM/DD (theta = 2) reception.
// The CDF is the single source of truth; sampling inverts it
// numerically.

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "cogfso/meijer.hpp"
#include "cogfso/specfun.hpp"

namespace cogfso::channels {

struct FsoParams {
  double alpha = 0.0;   // large-scale scintillation shape
  double beta = 0.0;    // small-scale scintillation shape
  double xi = 0.0;      // pointing-error ratio w_e / (2 sigma_s)
  double h_l = 1.0;     // deterministic path loss, recorded metadata
  int theta = 1;        // 1 heterodyne, 2 IM/DD
  double mu = 0.0;      // average electrical SNR, linear

  void validate() const {
    if (!(alpha > 0.0) || !(beta > 0.0) || !(xi > 0.0) || !(mu > 0.0))
      throw std::invalid_argument("FsoParams: alpha, beta, xi, mu must be positive");
    if (theta != 1 && theta != 2)
      throw std::invalid_argument("FsoParams: detection mode must be 1 or 2");
    if (!(h_l > 0.0) || h_l > 1.0)
      throw std::invalid_argument("FsoParams: path loss must lie in (0, 1]");
  }

  bool operator==(const FsoParams&) const = default;
};

class FsoDistribution {
 public:
  explicit FsoDistribution(const FsoParams& p)
      : p_(p),
        cdf_spec_(make_cdf_spec(p)),
        pdf_spec_(make_pdf_spec(p)),
        cdf_series_(cdf_spec_, meijer::Side::right),
        pdf_series_(pdf_spec_, meijer::Side::right) {
    p.validate();
    const double th = static_cast<double>(p.theta);
    const double xi2 = p.xi * p.xi;
    prefactor_cdf_ = std::pow(th, p.alpha + p.beta - 2.0) * xi2 /
                     (std::pow(2.0 * meijer::kPi, th - 1.0) *
                      std::tgamma(p.alpha) * std::tgamma(p.beta));
    z_scale_cdf_ = std::pow(p.alpha * p.beta, th) / std::pow(th, 2.0 * th) / p.mu;
    prefactor_pdf_ = xi2 / (th * std::tgamma(p.alpha) * std::tgamma(p.beta));
    z_scale_pdf_ = p.alpha * p.beta * std::pow(1.0 / p.mu, 1.0 / th);
  }

  const FsoParams& params() const { return p_; }
  const meijer::MeijerGSpec& cdf_spec() const { return cdf_spec_; }
  const meijer::MeijerGSpec& pdf_spec() const { return pdf_spec_; }
  double cdf_prefactor() const { return prefactor_cdf_; }
  double cdf_argument_scale() const { return z_scale_cdf_; }

  double pdf(double x) const {
    if (!(x > 0.0)) throw std::domain_error("fso pdf: argument must be positive");
    const double z = z_scale_pdf_ * std::pow(x, 1.0 / p_.theta);
    meijer::GEvalOptions opts;
    opts.rel_tol = 1e-10;
    auto r = pdf_series_.eval(z, opts);
    if (!r.converged) {
      // deep tail: slide the contour toward the saddle; if even the
      // integrand bound is negligible the density is numerically zero
      double best_sigma = 0.0, best_mag = std::numeric_limits<double>::infinity();
      double hi = pdf_spec_.b[0];
      for (int j = 1; j < pdf_spec_.m; ++j) hi = std::min(hi, pdf_spec_.b[j]);
      for (double d : kContourShifts) {
        const double mag = meijer::contour_log_magnitude(pdf_spec_, hi + d, z);
        if (std::isfinite(mag) && mag < best_mag) {
          best_mag = mag;
          best_sigma = hi + d;
        }
      }
      if (std::log(prefactor_pdf_ / x) + best_mag < -720.0) return 0.0;
      opts.sigma = best_sigma;
      opts.abs_tol = 1e-22 * x / prefactor_pdf_;
      r = meijer::meijer_g_contour(pdf_spec_, z, opts);
    }
    if (!r.converged) throw std::runtime_error("fso pdf: both backends failed to converge");
    return std::max(0.0, prefactor_pdf_ / x * r.value);
  }

  double cdf(double x) const {
    if (x < 0.0) throw std::domain_error("fso cdf: argument must be non-negative");
    if (x == 0.0) return 0.0;
    const double z = z_scale_cdf_ * x;
    meijer::GEvalOptions opts;
    opts.rel_tol = 1e-9;
    const auto r = cdf_series_.eval(z, opts);
    if (r.converged) return std::clamp(prefactor_cdf_ * r.value, 0.0, 1.0);
    return std::clamp(1.0 - sf_contour(z), 0.0, 1.0);
  }

  // Survival function 1 - F, accurate deep into the upper tail.
  double sf(double x) const {
    if (x <= 0.0) return 1.0;
    const double z = z_scale_cdf_ * x;
    meijer::GEvalOptions opts;
    opts.rel_tol = 1e-9;
    const auto r = cdf_series_.eval(z, opts);
    if (r.converged) {
      const double f = prefactor_cdf_ * r.value;
      if (f < 0.5) return std::clamp(1.0 - f, 0.0, 1.0);
    }
    return std::clamp(sf_contour(z), 0.0, 1.0);
  }

  /// Quantile by bisection in log-x to 1e-10 relative tolerance.
  double quantile(double u) const {
    if (!(u > 0.0) || !(u < 1.0))
      throw std::domain_error("fso quantile: probability must lie in (0, 1)");
    u = std::clamp(u, 1e-300, 1.0 - 1e-15);
    double lo = p_.mu, hi = p_.mu;
    if (cdf(lo) > u) {
      while (cdf(lo) > u) {
        lo *= 0.125;
        if (lo < 1e-280) break;
      }
      hi = lo * 8.0;
    } else {
      while (cdf(hi) <= u) {
        hi *= 8.0;
        if (hi > 1e280) break;
      }
      lo = hi * 0.125;
    }
    for (int it = 0; it < 200 && (hi - lo) > 1e-10 * lo; ++it) {
      const double mid = std::sqrt(lo * hi);
      (cdf(mid) <= u ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }

  /// Exact inverse-transform sample.
  template <typename Engine>
  double sample(Engine& eng) const {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    double u = uni(eng);
    u = std::clamp(u, 1e-12, 1.0 - 1e-12);
    return quantile(u);
  }

 private:
  static meijer::MeijerGSpec make_cdf_spec(const FsoParams& p) {
    p.validate();
    const double th = static_cast<double>(p.theta);
    const double xi2 = p.xi * p.xi;
    meijer::MeijerGSpec g;
    g.m = 3 * p.theta;
    g.n = 1;
    g.a.push_back(1.0);
    for (int i = 1; i <= p.theta; ++i) g.a.push_back((xi2 + i) / th);
    for (int i = 0; i < p.theta; ++i) g.b.push_back((xi2 + i) / th);
    for (int i = 0; i < p.theta; ++i) g.b.push_back((p.alpha + i) / th);
    for (int i = 0; i < p.theta; ++i) g.b.push_back((p.beta + i) / th);
    g.b.push_back(0.0);
    return g;
  }

  static meijer::MeijerGSpec make_pdf_spec(const FsoParams& p) {
    p.validate();
    const double xi2 = p.xi * p.xi;
    return {3, 0, {xi2 + 1.0}, {xi2, p.alpha, p.beta}};
  }

  // Non-integer abscissa offsets; the complement line must avoid the
  // nonpositive-integer poles of the Gamma(s) factor.
  static constexpr double kContourShifts[15] = {-0.3,  -0.7,  -1.4,   -2.6,   -4.4,
                                                -7.3,  -11.9, -18.7,  -27.5,  -38.3,
                                                -51.4, -76.6, -103.4, -155.7, -233.8};

  // Complement via the contour shifted left across s = 0 (the only pole
  // on that side): 1 - F = -Theta1 * I(sigma < 0).
  double sf_contour(double z) const {
    double best_sigma = -0.3;
    double best_mag = std::numeric_limits<double>::infinity();
    for (double s : kContourShifts) {
      const double mag = meijer::contour_log_magnitude(cdf_spec_, s, z);
      if (std::isfinite(mag) && mag < best_mag) {
        best_mag = mag;
        best_sigma = s;
      }
    }
    // integrand-magnitude bound: the survival mass is numerically zero
    if (std::log(prefactor_cdf_) + best_mag < std::log(1e-19)) return 0.0;
    meijer::GEvalOptions opts;
    opts.rel_tol = 1e-11;
    opts.abs_tol = 1e-18 / prefactor_cdf_;
    opts.sigma = best_sigma;
    const auto r = meijer::meijer_g_contour(cdf_spec_, z, opts);
    if (!r.converged) throw std::runtime_error("fso sf: shifted contour failed to converge");
    return -prefactor_cdf_ * r.value;
  }

  FsoParams p_;
  meijer::MeijerGSpec cdf_spec_, pdf_spec_;
  meijer::SlaterExpansion cdf_series_, pdf_series_;
  double prefactor_cdf_ = 0.0, z_scale_cdf_ = 0.0;
  double prefactor_pdf_ = 0.0, z_scale_pdf_ = 0.0;
};

/// Tabulated inverse CDF for the Monte Carlo hot path. Node layout is
/// uniform in probability with geometric refinement toward both tails;
/// interpolation is monotone cubic in (u, log x).
class FsoQuantileTable {
 public:
  explicit FsoQuantileTable(const FsoDistribution& dist, int nodes = 6000) {
    // forward CDF sweep on a log-x grid covering quantiles 1e-12..1-1e-12
    const double x_lo = dist.quantile(1e-12);
    const double x_hi = dist.quantile(1.0 - 1e-12);
    const double ll = std::log(x_lo), lh = std::log(x_hi);
    u_.reserve(nodes);
    lx_.reserve(nodes);
    double prev_u = -1.0;
    for (int i = 0; i < nodes; ++i) {
      const double lx = ll + (lh - ll) * i / (nodes - 1.0);
      const double u = dist.cdf(std::exp(lx));
      if (u <= prev_u + 1e-15 && i > 0) continue;  // keep strictly increasing
      u_.push_back(u);
      lx_.push_back(lx);
      prev_u = u;
    }
    build_tangents();
  }

  double quantile(double u) const {
    u = std::clamp(u, u_.front(), u_.back());
    const auto it = std::upper_bound(u_.begin(), u_.end(), u);
    std::size_t i = static_cast<std::size_t>(it - u_.begin());
    if (i == 0) i = 1;
    if (i >= u_.size()) i = u_.size() - 1;
    const std::size_t k = i - 1;
    const double h = u_[i] - u_[k];
    const double t = (u - u_[k]) / h;
    const double t2 = t * t, t3 = t2 * t;
    const double v = (2 * t3 - 3 * t2 + 1) * lx_[k] + (t3 - 2 * t2 + t) * h * m_[k] +
                     (-2 * t3 + 3 * t2) * lx_[i] + (t3 - t2) * h * m_[i];
    return std::exp(v);
  }

  template <typename Engine>
  double sample(Engine& eng) const {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    return quantile(uni(eng));
  }

 private:
  // Fritsch-Carlson monotone tangents.
  void build_tangents() {
    const std::size_t n = u_.size();
    m_.assign(n, 0.0);
    std::vector<double> d(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) d[i] = (lx_[i + 1] - lx_[i]) / (u_[i + 1] - u_[i]);
    m_[0] = d[0];
    m_[n - 1] = d[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i)
      m_[i] = (d[i - 1] * d[i] <= 0.0) ? 0.0 : 0.5 * (d[i - 1] + d[i]);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (d[i] == 0.0) {
        m_[i] = m_[i + 1] = 0.0;
        continue;
      }
      const double a = m_[i] / d[i], b = m_[i + 1] / d[i];
      const double s = a * a + b * b;
      if (s > 9.0) {
        const double tau = 3.0 / std::sqrt(s);
        m_[i] = tau * a * d[i];
        m_[i + 1] = tau * b * d[i];
      }
    }
  }

  std::vector<double> u_, lx_, m_;
};

/// PDF of the optical SNR law.
inline double fso_snr_pdf(const FsoParams& p, double x) { return FsoDistribution(p).pdf(x); }

/// CDF of the optical SNR law.
inline double fso_snr_cdf(const FsoParams& p, double x) { return FsoDistribution(p).cdf(x); }

/// Inverse-transform sample of the optical SNR law.
template <typename Engine>
double fso_snr_sample(const FsoParams& p, Engine& eng) {
  return FsoDistribution(p).sample(eng);
}

/// Unit-mean Gamma-Gamma irradiance sample (turbulence only).
template <typename Engine>
double gamma_gamma_sample(double alpha, double beta, Engine& eng) {
  if (!(alpha > 0.0) || !(beta > 0.0))
    throw std::domain_error("gamma_gamma_sample: shapes must be positive");
  std::gamma_distribution<double> ga(alpha, 1.0 / alpha);
  std::gamma_distribution<double> gb(beta, 1.0 / beta);
  return ga(eng) * gb(eng);
}

}  // namespace cogfso::channels
