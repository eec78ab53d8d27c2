#pragma once

// Stochastic channel models for the RF hop: Jakes correlation from
// mobility, AR1 time-selective Rayleigh MIMO evolution around a pilot,
// and Frobenius-gain sampling.

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <stdexcept>

#include "cogfso/fso.hpp"
#include "cogfso/specfun.hpp"

namespace cogfso::channels {

inline constexpr double kSpeedOfLight = 2.998e8;  // m/s
inline constexpr double kMphToMps = 0.44704;

struct RfLinkConfig {
  int n_tx = 0;         // transmit antennas per secondary transmitter
  int n_relay = 0;      // receive antennas at the relay
  int n_pu = 0;         // receive antennas per primary receiver
  double var_sr = 1.0;  // true channel entry variance, TX-relay
  double var_sp = 1.0;  // true channel entry variance, TX-primary
  double err_var_sr = 0.0;  // estimation-error entry variance at the relay
  double err_var_sp = 0.0;  // estimation-error entry variance at the TX
  double innov_var = 1.0;   // AR1 innovation entry variance
  double rho_sr = 1.0;      // per-slot correlation, TX-relay link
  double rho_sp = 1.0;      // per-slot correlation, TX-primary link
  int pilot_pos = 1;        // estimation slot L within the frame
  int frame_len = 1;        // codewords per frame
  int active_symbols = 1;   // nonzero symbol transmissions per codeword slot
  double code_rate = 1.0;   // OSTBC rate = block_symbols / block_len
  int block_symbols = 1;    // symbols encoded per block
  int block_len = 1;        // block length in channel uses

  void validate() const {
    if (n_tx < 1 || n_relay < 1 || n_pu < 1)
      throw std::invalid_argument("RfLinkConfig: antenna counts must be >= 1");
    if (!(var_sr > 0.0) || !(var_sp > 0.0))
      throw std::invalid_argument("RfLinkConfig: channel variances must be positive");
    if (err_var_sr < 0.0 || err_var_sp < 0.0)
      throw std::invalid_argument("RfLinkConfig: estimation-error variances must be >= 0");
    if (!(innov_var > 0.0))
      throw std::invalid_argument("RfLinkConfig: innovation variance must be positive");
    if (std::abs(rho_sr) > 1.0 || std::abs(rho_sp) > 1.0)
      throw std::invalid_argument("RfLinkConfig: correlation magnitude exceeds 1");
    if (frame_len < 1 || pilot_pos < 1 || pilot_pos > frame_len)
      throw std::invalid_argument("RfLinkConfig: pilot position must lie in [1, frame_len]");
    if (active_symbols < 1)
      throw std::invalid_argument("RfLinkConfig: active symbol count must be >= 1");
    if (!(code_rate > 0.0) || code_rate > 1.0)
      throw std::invalid_argument("RfLinkConfig: code rate must lie in (0, 1]");
    if (block_symbols < 1 || block_len < 1 ||
        std::abs(code_rate - static_cast<double>(block_symbols) / block_len) > 1e-12)
      throw std::invalid_argument("RfLinkConfig: code rate must equal block_symbols/block_len");
  }

  // Entry variance of the estimated TX-relay channel at the pilot slot.
  double est_var_sr() const { return var_sr + err_var_sr; }

  // Entry variance of the predicted TX-primary channel at codeword k.
  double est_var_sp(int k) const {
    if (k < 1) throw std::out_of_range("est_var_sp: codeword index starts at 1");
    return std::pow(rho_sp * rho_sp, k - 1) * (var_sp + err_var_sp);
  }

  int frobenius_dim_sr() const { return n_tx * n_relay; }  // tau1
  int frobenius_dim_sp() const { return n_tx * n_pu; }     // tau2

  bool operator==(const RfLinkConfig&) const = default;
};

/// Per-slot fading correlation from mobility: J0(2 pi f_c v / (R_s c)).
inline double jakes_rho(double speed_mps, double carrier_hz, double symbol_rate) {
  if (!std::isfinite(speed_mps) || !std::isfinite(carrier_hz) || !std::isfinite(symbol_rate))
    throw std::domain_error("jakes_rho: non-finite input");
  if (speed_mps < 0.0 || !(carrier_hz > 0.0) || !(symbol_rate > 0.0))
    throw std::domain_error("jakes_rho: negative speed or non-positive rates");
  const double arg = 2.0 * meijer::kPi * carrier_hz * speed_mps / (symbol_rate * kSpeedOfLight);
  return specfun::bessel_j0(arg);
}

/// AR1 evolution of the channel matrix from the pilot slot to slot k.
template <typename Engine>
Eigen::MatrixXcd ar1_evolve(const Eigen::MatrixXcd& h_pilot, int k, const RfLinkConfig& cfg,
                            Engine& eng) {
  cfg.validate();
  if (k < 1 || k > cfg.frame_len) throw std::out_of_range("ar1_evolve: slot index out of range");
  const int dist = std::abs(cfg.pilot_pos - k);
  if (dist == 0) return h_pilot;
  const double rho = cfg.rho_sr;
  Eigen::MatrixXcd out = std::pow(rho, dist) * h_pilot;
  const double innov_weight = std::sqrt(std::max(0.0, 1.0 - rho * rho));
  if (innov_weight == 0.0) return out;
  std::normal_distribution<double> gauss(0.0, std::sqrt(cfg.innov_var / 2.0));
  double w = innov_weight;
  for (int step = 0; step < dist; ++step) {
    for (Eigen::Index r = 0; r < out.rows(); ++r)
      for (Eigen::Index c = 0; c < out.cols(); ++c)
        out(r, c) += w * std::complex<double>(gauss(eng), gauss(eng));
    w *= rho;
  }
  return out;
}

/// Frobenius-norm-squared of a dim-entry i.i.d. complex Gaussian matrix:
/// Gamma(dim, var).
template <typename Engine>
double sample_estimated_gain(int dim, double var, Engine& eng) {
  if (dim < 1) throw std::domain_error("sample_estimated_gain: dimension must be >= 1");
  if (!(var > 0.0)) throw std::domain_error("sample_estimated_gain: variance must be positive");
  std::gamma_distribution<double> g(static_cast<double>(dim), var);
  return g(eng);
}

/// Predicted cross-channel gain at codeword k from the frame-start estimate.
inline double predict_cross_gain(double g1, double rho_sp, int k) {
  if (k < 1) throw std::out_of_range("predict_cross_gain: codeword index starts at 1");
  if (k == 1) return g1;
  return std::pow(rho_sp * rho_sp, k - 1) * g1;
}

}  // namespace cogfso::channels
