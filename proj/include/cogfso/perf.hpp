#pragma once

// End-to-end analytic performance: outage probability with both
// asymptotic floors, and average bit error probability with closed-form
// and quadrature backends for the three error integrals.

#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cogfso/channels.hpp"
#include "cogfso/linkstats.hpp"
#include "cogfso/meijer.hpp"
#include "cogfso/quadrature.hpp"
#include "cogfso/specfun.hpp"

namespace cogfso::perf {

struct ModulationConstants {
  double a = 0.5;
  double b = 1.0;

  static constexpr ModulationConstants bpsk() { return {0.5, 1.0}; }
  static constexpr ModulationConstants bfsk() { return {0.5, 0.5}; }
  static constexpr ModulationConstants dbpsk() { return {1.0, 1.0}; }
  static constexpr ModulationConstants ncbfsk() { return {1.0, 0.5}; }

  void validate() const {
    const bool known = (a == 0.5 && b == 1.0) || (a == 0.5 && b == 0.5) ||
                       (a == 1.0 && b == 1.0) || (a == 1.0 && b == 0.5);
    if (!known)
      throw std::invalid_argument("ModulationConstants: unknown binary scheme constants");
  }

  bool operator==(const ModulationConstants&) const = default;
};

struct ScenarioSet {
  int num_tx = 1;  // number of secondary transmitters J
  std::vector<channels::RfLinkConfig> rf;
  channels::FsoParams fso;
  std::vector<double> p_a;  // interference allowance per transmitter, linear
  std::vector<double> p_m;  // peak power per transmitter, linear
  double gamma_th = 1.0;    // outage threshold, linear
  double eta0 = 1.0;        // receiver noise-plus-interference power

  void validate() const {
    if (num_tx < 1) throw std::invalid_argument("ScenarioSet: need at least one transmitter");
    if (rf.size() != static_cast<std::size_t>(num_tx) || p_a.size() != rf.size() ||
        p_m.size() != rf.size())
      throw std::invalid_argument("ScenarioSet: per-transmitter vectors must have length J");
    for (const auto& c : rf) c.validate();
    for (const auto& c : rf)
      if (c.frame_len != rf[0].frame_len)
        throw std::invalid_argument("ScenarioSet: frame length must be common across transmitters");
    fso.validate();
    for (double v : p_a)
      if (!(v > 0.0)) throw std::invalid_argument("ScenarioSet: interference allowance must be positive");
    for (double v : p_m)
      if (!(v > 0.0)) throw std::invalid_argument("ScenarioSet: peak power must be positive");
    if (!(gamma_th > 0.0)) throw std::invalid_argument("ScenarioSet: threshold must be positive");
    if (!(eta0 > 0.0)) throw std::invalid_argument("ScenarioSet: noise power must be positive");
  }

  // All transmitters statistically identical: the j-average collapses.
  bool homogeneous() const {
    for (int j = 1; j < num_tx; ++j)
      if (!(rf[j] == rf[0]) || p_a[j] != p_a[0] || p_m[j] != p_m[0]) return false;
    return true;
  }

  bool operator==(const ScenarioSet&) const = default;
};

enum class FloorKind { mu_inf, pa_inf };
enum class BerMethod { closed, quadrature };
enum class L3Backend { quadrature, bivariate };

/// Conditional error probability of the binary schemes.
inline double cond_ber(double gamma, ModulationConstants mc) {
  mc.validate();
  if (gamma < 0.0) throw std::domain_error("cond_ber: SNR must be non-negative");
  if (mc.a == 0.5) return 0.5 * std::erfc(std::sqrt(mc.b * gamma));
  return 0.5 * std::exp(-mc.b * gamma);  // a = 1
}

/// End-to-end outage CDF of the weaker hop.
inline double e2e_outage_cdf(double gamma_th, const linkstats::SrSnrModel& m,
                             const channels::FsoDistribution& fso) {
  if (!(gamma_th > 0.0)) throw std::domain_error("e2e_outage_cdf: threshold must be positive");
  const double f_sr = linkstats::sr_snr_cdf(m, gamma_th);
  const double f_rd = fso.cdf(gamma_th);
  return 1.0 - (1.0 - f_sr) * (1.0 - f_rd);
}

namespace detail {

template <typename PerSlot>
double scenario_average(const ScenarioSet& s, PerSlot&& per_slot) {
  s.validate();
  const int j_count = s.homogeneous() ? 1 : s.num_tx;
  double acc = 0.0;
  for (int j = 0; j < j_count; ++j) {
    for (int k = 1; k <= s.rf[j].frame_len; ++k) {
      // every symbol slot of a codeword sees the same SNR law: the
      // in-codeword average is a pure multiplicity factor
      acc += per_slot(j, k);
    }
  }
  return acc / (j_count * s.rf[0].frame_len);
}

}  // namespace detail

/// Frame-and-user averaged outage probability.
inline double outage_avg(const ScenarioSet& s) {
  channels::FsoDistribution fso(s.fso);
  return detail::scenario_average(s, [&](int j, int k) {
    const auto m = linkstats::make_sr_model(s.rf[j], s.p_a[j], s.p_m[j], s.eta0, k);
    return e2e_outage_cdf(s.gamma_th, m, fso);
  });
}

/// Outage floors: optical hop unbounded (mu_inf) or interference
/// allowance unbounded (pa_inf).
inline double outage_floor(const ScenarioSet& s, FloorKind kind) {
  if (kind == FloorKind::mu_inf) {
    return detail::scenario_average(s, [&](int j, int k) {
      const auto m = linkstats::make_sr_model(s.rf[j], s.p_a[j], s.p_m[j], s.eta0, k);
      return linkstats::sr_snr_cdf(m, s.gamma_th);
    });
  }
  channels::FsoDistribution fso(s.fso);
  const double f_rd = fso.cdf(s.gamma_th);
  return detail::scenario_average(s, [&](int j, int k) {
    const auto m = linkstats::make_sr_model(s.rf[j], s.p_a[j], s.p_m[j], s.eta0, k);
    const double f_sr = linkstats::sr_snr_cdf_pa_inf(m, s.gamma_th);
    return 1.0 - (1.0 - f_sr) * (1.0 - f_rd);
  });
}

// ---------------------------------------------------------------------
// The three error integrals L1, L2, L3
// ---------------------------------------------------------------------

struct LValue {
  double value = 0.0;
  bool converged = false;
  bool used_fallback = false;
};

namespace detail {

// Cache of descending-series expansions keyed by the integer pair
// (m, tau2 + c - l); the continuous argument varies per slot but the
// parameter tuple does not.
using GCache = std::map<std::pair<int, int>, meijer::SlaterExpansion>;

inline const meijer::SlaterExpansion& power_kernel_expansion(GCache& cache, double mod_a, int m,
                                                             int beta_idx) {
  const auto key = std::make_pair(m, beta_idx);
  auto it = cache.find(key);
  if (it == cache.end()) {
    meijer::MeijerGSpec spec{1, 2, {1.0 - mod_a - m, 1.0 - beta_idx}, {0.0}};
    it = cache.emplace(key, meijer::SlaterExpansion(spec, meijer::Side::left)).first;
  }
  return it->second;
}

// Shared triple-sum coefficient walk of the proportional-branch terms in
// the closed forms. The emitted log-coefficient includes the
// 1/Gamma(dim_sp + c - l) normalization of the binomial kernel, so the
// visitor multiplies by the bare kernel value and kappa powers only.
template <typename Visit>
void walk_prop_terms(const linkstats::SrSnrModel& m, Visit&& visit) {
  const double ratio = m.power_ratio();
  const double scale = m.prop_gain * m.var_sr;  // alpha2 * var
  const double log_scale = std::log(scale);
  const double log_a3 = m.prop_offset > 0.0 ? std::log(m.prop_offset) : 0.0;
  const double log_ratio = ratio > 0.0 ? std::log(ratio) : 0.0;
  const double log_vsp = std::log(m.var_sp_k);
  for (int mm = 0; mm < m.dim_sr; ++mm) {
    for (int c = 0; c <= mm; ++c) {
      if (m.prop_offset == 0.0 && c != mm) continue;
      for (int l = 0; l < m.dim_sp + c; ++l) {
        if (ratio == 0.0 && l > 0) continue;
        double lg = -std::lgamma(m.dim_sp) - mm * log_scale - std::lgamma(mm + 1.0) +
                    specfun::log_binom(mm, c) + std::lgamma(m.dim_sp + c + 0.0) -
                    ratio / m.var_sp_k - std::lgamma(l + 1.0) + (c - l) * log_vsp -
                    std::lgamma(m.dim_sp + c - l + 0.0);
        if (c != mm) lg += (mm - c) * log_a3;
        if (l > 0) lg += l * log_ratio;
        visit(mm, c, l, lg);
      }
    }
  }
}

}  // namespace detail

/// L2: error integral of the optical hop CDF. Closed form applies the
/// Laplace-transform identity to the CDF kernel.
inline LValue ber_l2(const channels::FsoDistribution& fso, ModulationConstants mc,
                     BerMethod method) {
  mc.validate();
  LValue out;
  if (method == BerMethod::quadrature) {
    auto f = [&](double s) {
      const double x = s * s;
      if (mc.b * x > 745.0) return 0.0;
      return 2.0 * std::pow(s, 2.0 * mc.a - 1.0) * std::exp(-mc.b * x) * fso.cdf(x);
    };
    const auto r = quad::integrate_half_line(f, {1e-12, 1e-9, 1000000});
    out.value = r.value;
    out.converged = r.converged;
    return out;
  }
  meijer::MeijerGSpec spec = fso.cdf_spec();
  spec.n = 2;
  spec.a.insert(spec.a.begin(), 1.0 - mc.a);
  const double z = fso.cdf_argument_scale() / mc.b;
  const auto g = meijer::meijer_g(spec, z);
  out.value = fso.cdf_prefactor() * std::pow(mc.b, -mc.a) * g.value;
  out.converged = g.converged;
  return out;
}

/// L1: error integral of the RF hop CDF. The closed form combines the
/// ascending-series kernel for the peak branch with descending-series
/// kernels for the proportional branch.
inline LValue ber_l1(const linkstats::SrSnrModel& m, ModulationConstants mc, BerMethod method,
                     detail::GCache* cache = nullptr) {
  mc.validate();
  m.validate();
  LValue out;
  if (method == BerMethod::quadrature) {
    auto f = [&](double s) {
      const double x = s * s;
      if (mc.b * x > 745.0) return 0.0;
      return 2.0 * std::pow(s, 2.0 * mc.a - 1.0) * std::exp(-mc.b * x) *
             linkstats::sr_snr_cdf(m, x);
    };
    const auto r = quad::integrate_half_line(f, {1e-12, 1e-9, 1000000});
    out.value = r.value;
    out.converged = r.converged;
    return out;
  }
  const double ratio = m.power_ratio();
  const double branch_weight = specfun::reg_lower_gamma(m.dim_sp, ratio / m.var_sp_k);
  bool ok = true;

  // peak-power branch
  double term1 = 0.0;
  if (branch_weight > 0.0) {
    meijer::MeijerGSpec spec{1, 2, {1.0 - mc.a, 1.0}, {static_cast<double>(m.dim_sr), 0.0}};
    const double z = 1.0 / (m.peak_gain * m.var_sr * mc.b);
    const auto g = meijer::meijer_g(spec, z);
    ok = ok && g.converged;
    term1 = std::pow(mc.b, -mc.a) * branch_weight * g.value / std::tgamma(m.dim_sr);
  }
  // proportional branch, leading part
  const double term2 = std::tgamma(mc.a) * std::pow(mc.b, -mc.a) * (1.0 - branch_weight);

  // proportional branch, triple sum
  const double kappa2 = mc.b + (m.prop_offset + ratio) / (m.prop_gain * m.var_sr);
  const double zg = m.var_sp_k / (m.prop_gain * m.var_sr * kappa2);
  const double log_kappa2 = std::log(kappa2);
  detail::GCache local;
  detail::GCache& gc = cache ? *cache : local;
  std::vector<double> terms;
  detail::walk_prop_terms(m, [&](int mm, int c, int l, double lg) {
    const int beta_idx = m.dim_sp + c - l;
    const auto& exp_g = detail::power_kernel_expansion(gc, mc.a, mm, beta_idx);
    auto gv = exp_g.eval(zg);
    if (!gv.converged) {
      meijer::MeijerGSpec spec{1, 2, {1.0 - mc.a - mm, 1.0 - beta_idx}, {0.0}};
      gv = meijer::meijer_g_contour(spec, zg);
      if (!gv.converged) ok = false;
    }
    const double lt = lg - (mc.a + mm) * log_kappa2;
    terms.push_back(std::exp(lt) * gv.value);
  });
  const double term3 = linkstats::detail::stable_sum(terms);
  out.value = term1 + term2 - term3;
  out.converged = ok;
  return out;
}

/// L3: error integral of the product of both hop CDFs. Default backend is
/// adaptive quadrature of the defining integral; the two-variable
/// closed form is an opt-in validation backend with quadrature fallback.
inline LValue ber_l3(const linkstats::SrSnrModel& m, const channels::FsoDistribution& fso,
                     ModulationConstants mc, L3Backend backend = L3Backend::quadrature) {
  mc.validate();
  m.validate();
  LValue out;
  if (backend == L3Backend::bivariate) {
    const double ratio = m.power_ratio();
    const double branch_weight = specfun::reg_lower_gamma(m.dim_sp, ratio / m.var_sp_k);
    const double theta1 = fso.cdf_prefactor();
    const double zc = fso.cdf_argument_scale();
    bool ok = true;

    double term1 = 0.0;
    if (branch_weight > 0.0) {
      meijer::BivariateGSpec biv;
      biv.outer = {0, 1, {1.0 - mc.a}, {}};
      biv.g1 = {1, 1, {1.0}, {static_cast<double>(m.dim_sr), 0.0}};
      biv.g2 = fso.cdf_spec();
      const auto g2 = meijer::meijer_g_bivariate(
          biv, 1.0 / (m.peak_gain * m.var_sr * mc.b), zc / mc.b);
      ok = ok && g2.converged;
      term1 = theta1 * branch_weight / std::tgamma(m.dim_sr) * std::pow(mc.b, -mc.a) * g2.value;
    }

    const auto l2 = ber_l2(fso, mc, BerMethod::closed);
    ok = ok && l2.converged;
    const double term2 = (1.0 - branch_weight) * l2.value;

    const double kappa2 = mc.b + (m.prop_offset + ratio) / (m.prop_gain * m.var_sr);
    const double cc = m.var_sp_k / (m.prop_gain * m.var_sr);
    std::vector<double> terms;
    detail::walk_prop_terms(m, [&](int mm, int c, int l, double lg) {
      if (!ok) return;
      const int beta_idx = m.dim_sp + c - l;
      meijer::BivariateGSpec biv;
      biv.outer = {0, 1, {1.0 - mc.a - mm}, {}};
      biv.g1 = {1, 1, {1.0 - beta_idx}, {0.0}};
      biv.g2 = fso.cdf_spec();
      const auto g2 = meijer::meijer_g_bivariate(biv, cc / kappa2, zc / kappa2);
      if (!g2.converged) {
        ok = false;
        return;
      }
      const double lt = lg - (mc.a + mm) * std::log(kappa2);
      terms.push_back(std::exp(lt) * g2.value);
    });
    if (ok) {
      const double term3 = theta1 * linkstats::detail::stable_sum(terms);
      out.value = term1 + term2 - term3;
      out.converged = true;
      return out;
    }
    out.used_fallback = true;  // recorded in provenance by callers
  }
  auto f = [&](double s) {
    const double x = s * s;
    if (mc.b * x > 745.0) return 0.0;
    return 2.0 * std::pow(s, 2.0 * mc.a - 1.0) * std::exp(-mc.b * x) *
           linkstats::sr_snr_cdf(m, x) * fso.cdf(x);
  };
  const auto r = quad::integrate_half_line(f, {1e-12, 1e-9, 1000000});
  out.value = r.value;
  out.converged = r.converged;
  return out;
}

struct BerResult {
  double value = 0.0;
  bool converged = false;
  int l3_fallbacks = 0;  // bivariate evaluations that fell back to quadrature
};

/// Symbol error probability from the three integrals.
inline BerResult ber_symbol(const linkstats::SrSnrModel& m, const channels::FsoDistribution& fso,
                            ModulationConstants mc, BerMethod method,
                            L3Backend l3 = L3Backend::quadrature,
                            detail::GCache* cache = nullptr) {
  mc.validate();
  const auto l1 = ber_l1(m, mc, method, cache);
  const auto l2 = ber_l2(fso, mc, method);
  const auto l3v = ber_l3(m, fso, mc, method == BerMethod::quadrature ? L3Backend::quadrature : l3);
  BerResult out;
  out.value = std::pow(mc.b, mc.a) / (2.0 * std::tgamma(mc.a)) * (l1.value + l2.value - l3v.value);
  out.converged = l1.converged && l2.converged && l3v.converged;
  out.l3_fallbacks = l3v.used_fallback ? 1 : 0;
  out.value = std::clamp(out.value, 0.0, 0.5);
  return out;
}

/// Frame-and-user averaged bit error probability.
inline BerResult ber_avg(const ScenarioSet& s, ModulationConstants mc, BerMethod method,
                         L3Backend l3 = L3Backend::quadrature) {
  channels::FsoDistribution fso(s.fso);
  detail::GCache cache;
  BerResult out;
  out.converged = true;
  out.value = detail::scenario_average(s, [&](int j, int k) {
    const auto m = linkstats::make_sr_model(s.rf[j], s.p_a[j], s.p_m[j], s.eta0, k);
    const auto r = ber_symbol(m, fso, mc, method, l3, &cache);
    out.converged = out.converged && r.converged;
    out.l3_fallbacks += r.l3_fallbacks;
    return r.value;
  });
  return out;
}

/// Error floors, mirroring the outage floors.
inline double ber_floor(const ScenarioSet& s, ModulationConstants mc, FloorKind kind) {
  mc.validate();
  if (kind == FloorKind::mu_inf) {
    detail::GCache cache;
    const double avg_l1 = detail::scenario_average(s, [&](int j, int k) {
      const auto m = linkstats::make_sr_model(s.rf[j], s.p_a[j], s.p_m[j], s.eta0, k);
      return ber_l1(m, mc, BerMethod::closed, &cache).value;
    });
    return std::pow(mc.b, mc.a) / (2.0 * std::tgamma(mc.a)) * avg_l1;
  }
  channels::FsoDistribution fso(s.fso);
  return detail::scenario_average(s, [&](int j, int k) {
    const auto m = linkstats::make_sr_model(s.rf[j], s.p_a[j], s.p_m[j], s.eta0, k);
    const double kappa = mc.b + 1.0 / (m.peak_gain * m.var_sr);
    const double log_c = -std::log(m.peak_gain * m.var_sr);
    std::vector<double> terms;
    bool ok = true;
    for (int l = 0; l < m.dim_sr; ++l) {
      meijer::MeijerGSpec spec = fso.cdf_spec();
      spec.n = 2;
      spec.a.insert(spec.a.begin(), 1.0 - mc.a - l);
      const auto g = meijer::meijer_g(spec, fso.cdf_argument_scale() / kappa);
      if (!g.converged) ok = false;
      const double pre =
          std::exp(-std::lgamma(l + 1.0) + l * log_c - (mc.a + l) * std::log(kappa));
      terms.push_back(pre * (std::tgamma(mc.a + l) - fso.cdf_prefactor() * g.value));
    }
    if (!ok) throw std::runtime_error("ber_floor: optical kernel failed to converge");
    const double sum = linkstats::detail::stable_sum(terms);
    const double bracket = std::tgamma(mc.a) * std::pow(mc.b, -mc.a) - sum;
    return std::pow(mc.b, mc.a) / (2.0 * std::tgamma(mc.a)) * bracket;
  });
}

}  // namespace cogfso::perf
