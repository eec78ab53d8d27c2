#pragma once

// Frame-level Monte Carlo engine. Work is split into fixed-size frame
// blocks with one RNG stream per (block, transmitter); block results are
// reduced in index order, so estimates are bit-identical for any worker
// count.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

#include "cogfso/channels.hpp"
#include "cogfso/linkstats.hpp"
#include "cogfso/perf.hpp"
#include "cogfso/rng.hpp"

namespace cogfso::mcsim {

struct McOptions {
  std::uint64_t frames = 100000;
  std::uint64_t seed = 1;
  int workers = 0;             // 0: hardware concurrency
  std::uint64_t block = 4096;  // frames per RNG stream block
};

struct McResult {
  double estimate = 0.0;
  double std_error = 0.0;
  std::uint64_t frames = 0;
  std::uint64_t seed = 0;
  std::vector<double> per_k;  // per-slot breakdown of the estimate
};

namespace detail {

struct SlotCoeffs {
  double peak_gain, prop_gain, prop_offset;  // effective-SNR coefficients
  double sp_decay;                           // rho_sp^{2(k-1)}
};

struct TxModel {
  std::vector<SlotCoeffs> slots;
  double var_sp1 = 0.0;  // estimated cross-gain variance at frame start
  double var_sr = 0.0;   // estimated direct-gain variance at the pilot
  int dim_sp = 0, dim_sr = 0;
  double ratio = 0.0;  // p_a / p_m
  double p_a = 0.0, p_m = 0.0;
};

inline TxModel build_tx_model(const channels::RfLinkConfig& cfg, double p_a, double p_m,
                              double eta0) {
  TxModel t;
  t.var_sp1 = cfg.est_var_sp(1);
  t.var_sr = cfg.est_var_sr();
  t.dim_sp = cfg.frobenius_dim_sp();
  t.dim_sr = cfg.frobenius_dim_sr();
  t.ratio = p_a / p_m;
  t.p_a = p_a;
  t.p_m = p_m;
  t.slots.reserve(cfg.frame_len);
  const double r2 = cfg.rho_sp * cfg.rho_sp;
  double decay = 1.0;
  for (int k = 1; k <= cfg.frame_len; ++k) {
    const auto a = linkstats::alpha_coeffs(cfg, p_a, p_m, eta0, k);
    t.slots.push_back({a.peak_gain, a.prop_gain, a.prop_offset, decay});
    decay *= r2;
  }
  return t;
}

// Effective SNR of the direct hop given the frame's gain draws.
inline double slot_snr(const TxModel& t, const SlotCoeffs& sc, double g_sp1, double g_sr) {
  const double g_sp_k = sc.sp_decay * g_sp1;
  if (g_sp_k <= t.ratio) return sc.peak_gain * g_sr;
  return sc.prop_gain * g_sr / (g_sp_k + sc.prop_offset);
}

struct BlockAccum {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::uint64_t frames = 0;
  std::vector<double> per_k;
};

// Runs per-frame work over all blocks on a small worker pool and reduces
// block accumulators in block order.
template <typename FrameFn>
McResult run_frames(const perf::ScenarioSet& s, const McOptions& o, int per_k_slots,
                    FrameFn&& frame_fn) {
  s.validate();
  if (o.frames < 1) throw std::invalid_argument("monte carlo: need at least one frame");
  const std::uint64_t block = std::max<std::uint64_t>(1, o.block);
  const std::uint64_t n_blocks = (o.frames + block - 1) / block;
  std::vector<BlockAccum> acc(n_blocks);
  for (auto& a : acc) a.per_k.assign(per_k_slots, 0.0);

  std::atomic<std::uint64_t> next{0};
  auto worker = [&]() {
    std::vector<double> k_buf(per_k_slots);
    while (true) {
      const std::uint64_t b = next.fetch_add(1);
      if (b >= n_blocks) break;
      BlockAccum& out = acc[b];
      std::vector<std::mt19937_64> engines;
      engines.reserve(s.num_tx);
      for (int j = 0; j < s.num_tx; ++j) engines.push_back(rng::make_engine(o.seed, b, j));
      const std::uint64_t lo = b * block;
      const std::uint64_t hi = std::min(o.frames, lo + block);
      for (std::uint64_t f = lo; f < hi; ++f) {
        std::fill(k_buf.begin(), k_buf.end(), 0.0);
        const double v = frame_fn(engines, k_buf);
        out.sum += v;
        out.sum_sq += v * v;
        ++out.frames;
        for (int k = 0; k < per_k_slots; ++k) out.per_k[k] += k_buf[k];
      }
    }
  };

  int workers = o.workers > 0 ? o.workers : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min<int>(workers, static_cast<int>(n_blocks)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  // deterministic reduction in block order
  double sum = 0.0, sum_sq = 0.0;
  std::vector<double> per_k(per_k_slots, 0.0);
  std::uint64_t frames = 0;
  for (const auto& a : acc) {
    sum += a.sum;
    sum_sq += a.sum_sq;
    frames += a.frames;
    for (int k = 0; k < per_k_slots; ++k) per_k[k] += a.per_k[k];
  }
  McResult res;
  res.frames = frames;
  res.seed = o.seed;
  res.estimate = sum / frames;
  const double var =
      frames > 1 ? std::max(0.0, (sum_sq - frames * res.estimate * res.estimate) /
                                     (static_cast<double>(frames) - 1.0))
                 : 0.0;
  res.std_error = std::sqrt(var / static_cast<double>(frames));
  res.per_k.resize(per_k_slots);
  for (int k = 0; k < per_k_slots; ++k) res.per_k[k] = per_k[k] / frames;
  return res;
}

}  // namespace detail

/// Empirical outage probability of the end-to-end link.
inline McResult mc_outage(const perf::ScenarioSet& s, const McOptions& o) {
  s.validate();
  channels::FsoDistribution dist(s.fso);
  channels::FsoQuantileTable table(dist);
  std::vector<detail::TxModel> tx;
  for (int j = 0; j < s.num_tx; ++j)
    tx.push_back(detail::build_tx_model(s.rf[j], s.p_a[j], s.p_m[j], s.eta0));
  const int nb = s.rf[0].frame_len;
  std::uniform_real_distribution<double> uni(0.0, 1.0);

  return detail::run_frames(
      s, o, nb, [&, nb](std::vector<std::mt19937_64>& engines, std::vector<double>& k_buf) {
        double hits = 0.0;
        for (int j = 0; j < s.num_tx; ++j) {
          auto& eng = engines[j];
          const auto& t = tx[j];
          std::gamma_distribution<double> gsp(t.dim_sp, t.var_sp1);
          std::gamma_distribution<double> gsr(t.dim_sr, t.var_sr);
          const double g_sp1 = gsp(eng);
          const double g_sr = gsr(eng);
          for (int k = 0; k < nb; ++k) {
            const double snr_rf = detail::slot_snr(t, t.slots[k], g_sp1, g_sr);
            const double snr_fso = table.quantile(uni(eng));
            if (std::min(snr_rf, snr_fso) < s.gamma_th) {
              hits += 1.0;
              k_buf[k] += 1.0 / s.num_tx;
            }
          }
        }
        return hits / (s.num_tx * nb);
      });
}

/// Semi-analytic bit error probability: the conditional error probability
/// averaged over sampled end-to-end SNRs.
inline McResult mc_ber(const perf::ScenarioSet& s, perf::ModulationConstants mc,
                       const McOptions& o) {
  s.validate();
  mc.validate();
  channels::FsoDistribution dist(s.fso);
  channels::FsoQuantileTable table(dist);
  std::vector<detail::TxModel> tx;
  for (int j = 0; j < s.num_tx; ++j)
    tx.push_back(detail::build_tx_model(s.rf[j], s.p_a[j], s.p_m[j], s.eta0));
  const int nb = s.rf[0].frame_len;
  std::uniform_real_distribution<double> uni(0.0, 1.0);

  return detail::run_frames(
      s, o, nb, [&, nb](std::vector<std::mt19937_64>& engines, std::vector<double>& k_buf) {
        double acc = 0.0;
        for (int j = 0; j < s.num_tx; ++j) {
          auto& eng = engines[j];
          const auto& t = tx[j];
          std::gamma_distribution<double> gsp(t.dim_sp, t.var_sp1);
          std::gamma_distribution<double> gsr(t.dim_sr, t.var_sr);
          const double g_sp1 = gsp(eng);
          const double g_sr = gsr(eng);
          for (int k = 0; k < nb; ++k) {
            const double snr_rf = detail::slot_snr(t, t.slots[k], g_sp1, g_sr);
            const double snr_fso = table.quantile(uni(eng));
            const double pe = perf::cond_ber(std::min(snr_rf, snr_fso), mc);
            acc += pe;
            k_buf[k] += pe / s.num_tx;
          }
        }
        return acc / (s.num_tx * nb);
      });
}

/// Raw direct-hop SNR samples at a fixed codeword slot, for distribution
/// validation.
inline std::vector<double> mc_sr_snr_samples(const channels::RfLinkConfig& cfg, double p_a,
                                             double p_m, double eta0, int k, std::size_t count,
                                             std::uint64_t seed) {
  cfg.validate();
  if (count < 1) throw std::invalid_argument("mc_sr_snr_samples: need at least one sample");
  const auto t = detail::build_tx_model(cfg, p_a, p_m, eta0);
  const auto& sc = t.slots.at(k - 1);
  auto eng = rng::make_engine(seed, 0, 0);
  std::gamma_distribution<double> gsp(t.dim_sp, t.var_sp1);
  std::gamma_distribution<double> gsr(t.dim_sr, t.var_sr);
  std::vector<double> out(count);
  for (auto& x : out) x = detail::slot_snr(t, sc, gsp(eng), gsr(eng));
  return out;
}

/// Empirical fraction of codeword slots served at peak power, at slot k.
inline McResult mc_branch_fraction(const perf::ScenarioSet& s, int k, const McOptions& o) {
  s.validate();
  std::vector<detail::TxModel> tx;
  for (int j = 0; j < s.num_tx; ++j)
    tx.push_back(detail::build_tx_model(s.rf[j], s.p_a[j], s.p_m[j], s.eta0));
  return detail::run_frames(
      s, o, 1, [&, k](std::vector<std::mt19937_64>& engines, std::vector<double>& k_buf) {
        double hits = 0.0;
        for (int j = 0; j < s.num_tx; ++j) {
          const auto& t = tx[j];
          std::gamma_distribution<double> gsp(t.dim_sp, t.var_sp1);
          const double g_sp_k = t.slots[k - 1].sp_decay * gsp(engines[j]);
          if (g_sp_k <= t.ratio) hits += 1.0;
        }
        k_buf[0] += hits / s.num_tx;
        return hits / s.num_tx;
      });
}

struct PrimaryNetConfig {
  int n_tx = 2;                      // primary transmit antennas (Alamouti)
  int n_rx = 2;                      // primary receive antennas
  double p_u = 100.0;                // primary transmit power, linear
  double var_pp = 1.0;               // primary channel entry variance
  double eta_primary = 1.0;          // primary receiver noise power
  double rate_target = 4.37;         // outage rate threshold, bits/use
  bool composite_constraint = true;  // false: proportional-only control

  void validate() const {
    if (n_tx < 1 || n_rx < 1) throw std::invalid_argument("PrimaryNetConfig: antenna counts");
    if (!(p_u > 0.0) || !(var_pp > 0.0) || !(eta_primary > 0.0) || !(rate_target > 0.0))
      throw std::invalid_argument("PrimaryNetConfig: parameters must be positive");
  }
};

/// Empirical outage of the primary link under secondary interference.
/// The secondary transmitters control power from their own gain
/// estimates; the interference at the primary receiver flows through the
/// true cross gains.
inline McResult mc_primary_outage(const PrimaryNetConfig& pri, const perf::ScenarioSet& s,
                                  const McOptions& o) {
  pri.validate();
  s.validate();
  std::vector<detail::TxModel> tx;
  for (int j = 0; j < s.num_tx; ++j)
    tx.push_back(detail::build_tx_model(s.rf[j], s.p_a[j], s.p_m[j], s.eta0));
  const int nb = s.rf[0].frame_len;
  const int pp_dim = pri.n_tx * pri.n_rx;
  const double sinr_floor = std::pow(2.0, pri.rate_target) - 1.0;

  // static cross channels with exact estimates admit a scalar fast path;
  // otherwise sample the channel and error matrices entrywise
  std::vector<char> scalar_path(s.num_tx);
  for (int j = 0; j < s.num_tx; ++j)
    scalar_path[j] = s.rf[j].err_var_sp == 0.0 && s.rf[j].rho_sp == 1.0;

  return detail::run_frames(
      s, o, nb, [&, nb](std::vector<std::mt19937_64>& engines, std::vector<double>& k_buf) {
        // primary link gain, shared across the frame
        std::gamma_distribution<double> gpp(pp_dim, pri.var_pp);
        double g_pp = gpp(engines[0]);
        std::vector<double> interference(nb, 0.0);
        for (int j = 0; j < s.num_tx; ++j) {
          auto& eng = engines[j];
          const auto& t = tx[j];
          const auto& cfg = s.rf[j];
          if (scalar_path[j]) {
            // static cross link with exact estimates: one shared gain
            std::gamma_distribution<double> gsp(t.dim_sp, cfg.var_sp);
            const double g = gsp(eng);
            for (int k = 0; k < nb; ++k) {
              const double p_s = pri.composite_constraint
                                     ? linkstats::transmit_power(g, t.p_a, t.p_m)
                                     : t.p_a / g;
              interference[k] += p_s * g;
            }
            continue;
          }
          // mobile or imperfectly estimated cross link: the power control
          // sees the predicted estimate while the interference flows
          // through the true AR1-evolved gain (stationary innovation)
          std::normal_distribution<double> ch(0.0, std::sqrt(cfg.var_sp / 2.0));
          std::normal_distribution<double> er(0.0, std::sqrt(cfg.err_var_sp / 2.0));
          std::vector<double> hr(t.dim_sp), hi(t.dim_sp);
          double g_est_1 = 0.0;
          for (int e = 0; e < t.dim_sp; ++e) {
            hr[e] = ch(eng);
            hi[e] = ch(eng);
            const double er_r = er(eng), er_i = er(eng);
            g_est_1 += (hr[e] + er_r) * (hr[e] + er_r) + (hi[e] + er_i) * (hi[e] + er_i);
          }
          const double rho = cfg.rho_sp;
          const double w = std::sqrt(std::max(0.0, 1.0 - rho * rho));
          const double r2 = rho * rho;
          double decay = 1.0;
          for (int k = 0; k < nb; ++k) {
            if (k > 0 && w > 0.0) {
              for (int e = 0; e < t.dim_sp; ++e) {
                hr[e] = rho * hr[e] + w * ch(eng);
                hi[e] = rho * hi[e] + w * ch(eng);
              }
            }
            double g_true_k = 0.0;
            for (int e = 0; e < t.dim_sp; ++e) g_true_k += hr[e] * hr[e] + hi[e] * hi[e];
            const double g_est_k = decay * g_est_1;
            const double p_s = pri.composite_constraint
                                   ? linkstats::transmit_power(g_est_k, t.p_a, t.p_m)
                                   : t.p_a / g_est_k;
            interference[k] += p_s * g_true_k;
            decay *= r2;
          }
        }
        double hits = 0.0;
        for (int k = 0; k < nb; ++k) {
          const double sinr =
              pri.p_u * g_pp / (pri.n_tx * (pri.eta_primary + interference[k]));
          if (sinr < sinr_floor) {
            hits += 1.0;
            k_buf[k] += 1.0;
          }
        }
        return hits / nb;
      });
}

}  // namespace cogfso::mcsim
