#pragma once

// Closed-form statistics of the secondary TX-relay link SNR under the
// composite interference power constraint, with the defining-integral
// quadrature oracle.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "cogfso/channels.hpp"
#include "cogfso/quadrature.hpp"
#include "cogfso/specfun.hpp"

namespace cogfso::linkstats {

/// Composite power control: peak power while the estimated cross gain is
/// small, proportional backoff past the boundary (boundary on the peak
/// branch).
inline double transmit_power(double g_hat, double p_a, double p_m) {
  if (!(g_hat > 0.0) || !(p_a > 0.0) || !(p_m > 0.0))
    throw std::domain_error("transmit_power: all inputs must be positive");
  return g_hat <= p_a / p_m ? p_m : p_a / g_hat;
}

struct AlphaCoeffs {
  double peak_gain = 0.0;    // SNR per unit estimated gain on the peak-power branch
  double prop_gain = 0.0;    // numerator scale on the proportional branch
  double prop_offset = 0.0;  // additive gain offset on the proportional branch
  int pilot_dist = 0;        // |L - k|
};

/// Effective-SNR coefficients for codeword slot k.
inline AlphaCoeffs alpha_coeffs(const channels::RfLinkConfig& cfg, double p_a, double p_m,
                                double eta0, int k) {
  cfg.validate();
  if (k < 1 || k > cfg.frame_len) throw std::out_of_range("alpha_coeffs: slot index out of range");
  if (!(p_a > 0.0) || !(p_m > 0.0) || !(eta0 > 0.0))
    throw std::domain_error("alpha_coeffs: powers and noise must be positive");
  const int dist = std::abs(cfg.pilot_pos - k);
  const double rho2i = dist == 0 ? 1.0 : std::pow(cfg.rho_sr * cfg.rho_sr, dist);
  const double err_bar = cfg.active_symbols * cfg.err_var_sr;
  const double innov_bar = cfg.active_symbols * cfg.innov_var;
  const double impair = rho2i * err_bar + (1.0 - rho2i) * innov_bar;
  const double norm = cfg.code_rate * cfg.n_tx * eta0;
  AlphaCoeffs a;
  a.pilot_dist = dist;
  a.peak_gain = p_m * rho2i / (norm + p_m * impair);
  a.prop_gain = p_a * rho2i / norm;
  a.prop_offset = p_a * impair / norm;
  return a;
}

struct SrSnrModel {
  double peak_gain = 0.0;    // alpha_1
  double prop_gain = 0.0;    // alpha_2
  double prop_offset = 0.0;  // alpha_3
  int dim_sr = 0;            // tau_1 = n_tx * n_relay
  int dim_sp = 0;            // tau_2 = n_tx * n_pu
  double var_sr = 0.0;       // estimated-gain entry variance, TX-relay
  double var_sp_k = 0.0;     // predicted-gain entry variance at slot k
  double p_a = 0.0;
  double p_m = 0.0;
  int k = 1;
  int pilot_dist = 0;

  double power_ratio() const { return p_a / p_m; }

  void validate() const {
    if (!(peak_gain > 0.0) || !(prop_gain > 0.0) || prop_offset < 0.0)
      throw std::invalid_argument("SrSnrModel: branch gains must be positive");
    if (dim_sr < 1 || dim_sp < 1 || dim_sr > 64 || dim_sp > 64)
      throw std::invalid_argument("SrSnrModel: Frobenius dimensions supported up to 64");
    if (!(var_sr > 0.0) || !(var_sp_k > 0.0))
      throw std::invalid_argument("SrSnrModel: gain variances must be positive");
    if (!(p_a > 0.0) || !(p_m > 0.0))
      throw std::invalid_argument("SrSnrModel: powers must be positive");
  }
};

inline SrSnrModel make_sr_model(const channels::RfLinkConfig& cfg, double p_a, double p_m,
                                double eta0, int k) {
  const AlphaCoeffs a = alpha_coeffs(cfg, p_a, p_m, eta0, k);
  SrSnrModel m;
  m.peak_gain = a.peak_gain;
  m.prop_gain = a.prop_gain;
  m.prop_offset = a.prop_offset;
  m.dim_sr = cfg.frobenius_dim_sr();
  m.dim_sp = cfg.frobenius_dim_sp();
  m.var_sr = cfg.est_var_sr();
  m.var_sp_k = cfg.est_var_sp(k);
  m.p_a = p_a;
  m.p_m = p_m;
  m.k = k;
  m.pilot_dist = a.pilot_dist;
  m.validate();
  return m;
}

namespace detail {

// Compensated sum in ascending magnitude order.
inline double stable_sum(std::vector<double>& terms) {
  std::sort(terms.begin(), terms.end(),
            [](double a, double b) { return std::abs(a) < std::abs(b); });
  double total = 0.0, comp = 0.0;
  for (double t : terms) {
    const double s = total + t;
    comp += (std::abs(total) >= std::abs(t)) ? ((total - s) + t) : ((t - s) + total);
    total = s;
  }
  return total + comp;
}

}  // namespace detail

/// CDF of the TX-relay link SNR at slot k.
inline double sr_snr_cdf(const SrSnrModel& m, double x) {
  m.validate();
  if (x < 0.0) throw std::domain_error("sr_snr_cdf: argument must be non-negative");
  if (x == 0.0) return 0.0;
  const double ratio = m.power_ratio();
  const double branch_weight = specfun::reg_lower_gamma(m.dim_sp, ratio / m.var_sp_k);
  const double peak_term =
      specfun::reg_lower_gamma(m.dim_sr, x / (m.peak_gain * m.var_sr)) * branch_weight;

  const double xs = x / (m.prop_gain * m.var_sr);
  const double rate0 = 1.0 / m.var_sp_k;
  const double log_pref = -m.dim_sp * std::log(m.var_sp_k) - std::lgamma(m.dim_sp);
  const double lead = std::exp(log_pref + specfun::log_j_func(m.dim_sp, rate0, ratio));

  const double damp = -x * m.prop_offset / (m.prop_gain * m.var_sr);
  const double log_a3 = m.prop_offset > 0.0 ? std::log(m.prop_offset) : 0.0;
  std::vector<double> terms;
  terms.reserve(m.dim_sr * (m.dim_sr + 1) / 2);
  const double lxs = std::log(xs);
  for (int mm = 0; mm < m.dim_sr; ++mm) {
    for (int c = 0; c <= mm; ++c) {
      if (m.prop_offset == 0.0 && c != mm) continue;
      double lt = log_pref + damp + mm * lxs - std::lgamma(mm + 1.0) +
                  specfun::log_binom(mm, c) +
                  specfun::log_j_func(m.dim_sp + c, rate0 + xs, ratio);
      if (c != mm) lt += (mm - c) * log_a3;
      terms.push_back(std::exp(lt));
    }
  }
  const double sum = detail::stable_sum(terms);
  const double prop_term = lead - sum;
  return std::clamp(peak_term + std::max(0.0, prop_term), 0.0, 1.0);
}

/// PDF of the TX-relay link SNR at slot k.
inline double sr_snr_pdf(const SrSnrModel& m, double x) {
  m.validate();
  if (!(x > 0.0)) throw std::domain_error("sr_snr_pdf: argument must be positive");
  const double ratio = m.power_ratio();
  const double shared = -std::lgamma(m.dim_sr) - std::lgamma(m.dim_sp) -
                        m.dim_sr * std::log(m.var_sr) + (m.dim_sr - 1.0) * std::log(x);
  std::vector<double> terms;
  const double branch_weight = specfun::reg_lower_gamma(m.dim_sp, ratio / m.var_sp_k);
  if (branch_weight > 0.0) {
    const double lt = shared - m.dim_sr * std::log(m.peak_gain) + std::lgamma(m.dim_sp) +
                      std::log(branch_weight) - x / (m.peak_gain * m.var_sr);
    terms.push_back(std::exp(lt));
  }
  const double xs = x / (m.prop_gain * m.var_sr);
  const double rate = 1.0 / m.var_sp_k + xs;
  const double log_a3 = m.prop_offset > 0.0 ? std::log(m.prop_offset) : 0.0;
  for (int c = 0; c <= m.dim_sr; ++c) {
    if (m.prop_offset == 0.0 && c != m.dim_sr) continue;
    double lt = shared - m.dim_sr * std::log(m.prop_gain) - m.dim_sp * std::log(m.var_sp_k) -
                x * m.prop_offset / (m.prop_gain * m.var_sr) +
                specfun::log_binom(m.dim_sr, c) +
                specfun::log_j_func(m.dim_sp + c, rate, ratio);
    if (c != m.dim_sr) lt += (m.dim_sr - c) * log_a3;
    terms.push_back(std::exp(lt));
  }
  return std::max(0.0, detail::stable_sum(terms));
}

/// CDF limit for an unbounded interference allowance: the peak branch
/// alone.
inline double sr_snr_cdf_pa_inf(const SrSnrModel& m, double x) {
  m.validate();
  if (x < 0.0) throw std::domain_error("sr_snr_cdf_pa_inf: argument must be non-negative");
  return specfun::reg_lower_gamma(m.dim_sr, x / (m.peak_gain * m.var_sr));
}

/// Defining-integral oracle for sr_snr_cdf: outer quadrature over the
/// cross-gain density, inner Gamma CDF in closed form, split at the
/// power-control boundary.
inline double sr_snr_cdf_oracle(const SrSnrModel& m, double x) {
  m.validate();
  if (x < 0.0) throw std::domain_error("sr_snr_cdf_oracle: argument must be non-negative");
  if (x == 0.0) return 0.0;
  const double ratio = m.power_ratio();
  const double peak_term =
      specfun::reg_lower_gamma(m.dim_sr, x / (m.peak_gain * m.var_sr)) *
      specfun::reg_lower_gamma(m.dim_sp, ratio / m.var_sp_k);
  const double log_norm = -std::lgamma(m.dim_sp) - m.dim_sp * std::log(m.var_sp_k);
  auto integrand = [&](double z) {
    if (!(z > 0.0)) return 0.0;
    const double dens = std::exp(log_norm + (m.dim_sp - 1.0) * std::log(z) - z / m.var_sp_k);
    const double inner = specfun::reg_lower_gamma(
        m.dim_sr, x * (z + m.prop_offset) / (m.prop_gain * m.var_sr));
    return dens * inner;
  };
  const auto res = quad::integrate_from(integrand, ratio, {1e-13, 1e-11, 1000000});
  if (!res.converged)
    throw std::runtime_error("sr_snr_cdf_oracle: quadrature failed to converge");
  return std::clamp(peak_term + res.value, 0.0, 1.0);
}

}  // namespace cogfso::linkstats
