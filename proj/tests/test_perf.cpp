#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "cogfso/perf.hpp"

using namespace cogfso;
using channels::FsoDistribution;
using channels::FsoParams;
using channels::RfLinkConfig;
using perf::BerMethod;
using perf::FloorKind;
using perf::ModulationConstants;
using perf::ScenarioSet;

namespace {

constexpr double kPm27dbw = 501.18723362727246;
constexpr double kGammaTh3db = 1.9952623149688795;

const FsoParams kModerate{5.4181, 3.7916, 1.6758, 0.9033, 1, 100.0};

RfLinkConfig ref_rf(double rho = 1.0, double err_var = 0.0) {
  RfLinkConfig c;
  c.n_tx = 3;
  c.n_relay = 2;
  c.n_pu = 2;
  c.var_sr = 1.0;
  c.var_sp = 1.0;
  c.err_var_sr = err_var;
  c.err_var_sp = err_var;
  c.innov_var = 1.0;
  c.rho_sr = rho;
  c.rho_sp = rho;
  c.pilot_pos = 1;
  c.frame_len = 50;
  c.active_symbols = 3;
  c.code_rate = 0.5;
  c.block_symbols = 4;
  c.block_len = 8;
  return c;
}

ScenarioSet ref_scenario(int j = 1, double rho = 1.0, double err_var = 0.0,
                         double p_a = 10.0) {
  ScenarioSet s;
  s.num_tx = j;
  s.rf.assign(j, ref_rf(rho, err_var));
  s.fso = kModerate;
  s.p_a.assign(j, p_a);
  s.p_m.assign(j, kPm27dbw);
  s.gamma_th = kGammaTh3db;
  s.eta0 = 1.0;
  return s;
}

double erfc_series(double x) {
  double term = x, sum = x;
  for (int k = 1; k < 300; ++k) {
    term *= -x * x / k;
    sum += term / (2.0 * k + 1.0);
    if (std::abs(term) < 1e-19) break;
  }
  return 1.0 - 2.0 / std::sqrt(3.14159265358979323846) * sum;
}

}  // namespace

TEST_CASE("cond_ber pinned values and monotonicity", "[perf]") {
  CHECK(perf::cond_ber(0.0, ModulationConstants::bpsk()) == 0.5);
  CHECK_THAT(perf::cond_ber(1.0, ModulationConstants::dbpsk()),
             Catch::Matchers::WithinRel(0.5 * std::exp(-1.0), 1e-14));
  CHECK_THAT(perf::cond_ber(1.0, ModulationConstants::bpsk()),
             Catch::Matchers::WithinRel(0.5 * erfc_series(1.0), 1e-12));
  CHECK_THAT(perf::cond_ber(1.0, ModulationConstants::bpsk()),
             Catch::Matchers::WithinAbs(0.0786496, 5e-7));
  // agrees with the incomplete-gamma definition for every scheme
  for (auto mc : {ModulationConstants::bpsk(), ModulationConstants::bfsk(),
                  ModulationConstants::dbpsk(), ModulationConstants::ncbfsk()}) {
    double prev = 0.51;
    for (double g = 0.0; g <= 10.0; g += 0.25) {
      const double v = perf::cond_ber(g, mc);
      CHECK_THAT(v, Catch::Matchers::WithinRel(
                        specfun::upper_gamma(mc.a, mc.b * g) / (2.0 * std::tgamma(mc.a)),
                        1e-11));
      CHECK(v < prev);
      prev = v;
    }
  }
  CHECK_THROWS_AS(perf::cond_ber(-1.0, ModulationConstants::bpsk()), std::domain_error);
  CHECK_THROWS_AS(perf::cond_ber(1.0, ModulationConstants{0.7, 1.0}), std::invalid_argument);
}

TEST_CASE("e2e outage structure", "[perf]") {
  FsoDistribution fso(kModerate);
  auto cfg = ref_rf();
  // degenerate RF hop: enormous peak power and allowance
  const auto m_strong = linkstats::make_sr_model(cfg, 1e12, 1e12, 1.0, 1);
  const double f_rd = fso.cdf(kGammaTh3db);
  CHECK_THAT(perf::e2e_outage_cdf(kGammaTh3db, m_strong, fso),
             Catch::Matchers::WithinAbs(f_rd, 1e-9));
  // both hops in certain outage
  const auto m_weak = linkstats::make_sr_model(cfg, 1e-9, 1e-9, 1.0, 1);
  CHECK_THAT(perf::e2e_outage_cdf(1e14, m_weak, fso), Catch::Matchers::WithinAbs(1.0, 1e-12));
  // bounds against the two hop CDFs
  for (double pa : {2.0, 10.0, 40.0}) {
    const auto m = linkstats::make_sr_model(cfg, pa, kPm27dbw, 1.0, 1);
    const double fsr = linkstats::sr_snr_cdf(m, kGammaTh3db);
    const double e2e = perf::e2e_outage_cdf(kGammaTh3db, m, fso);
    CHECK(e2e >= std::max(fsr, f_rd) - 1e-15);
    CHECK(e2e <= fsr + f_rd + 1e-15);
  }
}

TEST_CASE("outage_avg reductions and slot independence", "[perf]") {
  auto s = ref_scenario(1, 0.99, 0.05, 10.0);
  s.rf[0].frame_len = 1;
  FsoDistribution fso(s.fso);
  const auto m = linkstats::make_sr_model(s.rf[0], s.p_a[0], s.p_m[0], s.eta0, 1);
  CHECK_THAT(perf::outage_avg(s),
             Catch::Matchers::WithinRel(perf::e2e_outage_cdf(s.gamma_th, m, fso), 1e-13));
  // symbol slots within a codeword see the same SNR law; repeated
  // evaluation is bit-identical
  const double v1 = perf::e2e_outage_cdf(s.gamma_th, m, fso);
  const double v2 = perf::e2e_outage_cdf(s.gamma_th, m, fso);
  CHECK(v1 == v2);
}

TEST_CASE("outage monotone in allowance and optical SNR", "[perf]") {
  auto s = ref_scenario(1, 0.998, 0.1, 1.0);
  double prev = 2.0;
  for (double pa_db = 0.0; pa_db <= 38.0; pa_db += 2.0) {
    for (auto& v : s.p_a) v = std::pow(10.0, pa_db / 10.0);
    const double o = perf::outage_avg(s);
    CHECK(o <= prev + 1e-12);
    prev = o;
  }
  prev = 2.0;
  for (double mu_db = 5.0; mu_db <= 45.0; mu_db += 5.0) {
    auto s2 = ref_scenario(1, 0.998, 0.1, 10.0);
    s2.fso.mu = std::pow(10.0, mu_db / 10.0);
    const double o = perf::outage_avg(s2);
    CHECK(o <= prev + 1e-12);
    prev = o;
  }
}

TEST_CASE("outage floors are the parameter limits", "[perf]") {
  auto s = ref_scenario(1, 0.998, 0.05, 12.0);
  // the optical-limit floor is the (j,k) average of the RF CDF by definition
  const double floor_mu = perf::outage_floor(s, FloorKind::mu_inf);
  double manual = 0.0;
  for (int k = 1; k <= s.rf[0].frame_len; ++k) {
    const auto m = linkstats::make_sr_model(s.rf[0], s.p_a[0], s.p_m[0], s.eta0, k);
    manual += linkstats::sr_snr_cdf(m, s.gamma_th);
  }
  manual /= s.rf[0].frame_len;
  CHECK_THAT(floor_mu, Catch::Matchers::WithinRel(manual, 1e-14));

  auto s_mu = s;
  s_mu.fso.mu = 1e12;
  CHECK_THAT(perf::outage_avg(s_mu), Catch::Matchers::WithinRel(floor_mu, 0.01));

  const double floor_pa = perf::outage_floor(s, FloorKind::pa_inf);
  auto s_pa = s;
  for (auto& v : s_pa.p_a) v = 1e12;
  CHECK_THAT(perf::outage_avg(s_pa), Catch::Matchers::WithinRel(floor_pa, 0.01));
}

TEST_CASE("error integrals: closed matches quadrature", "[perf]") {
  FsoDistribution fso(kModerate);
  auto cfg = ref_rf(0.9975566394859053, 0.1);
  for (int k : {1, 25}) {
    const auto m = linkstats::make_sr_model(cfg, 10.0, kPm27dbw, 1.0, k);
    for (auto mc : {ModulationConstants::bpsk(), ModulationConstants::dbpsk()}) {
      const auto c1 = perf::ber_l1(m, mc, BerMethod::closed);
      const auto q1 = perf::ber_l1(m, mc, BerMethod::quadrature);
      REQUIRE(c1.converged);
      REQUIRE(q1.converged);
      CHECK_THAT(c1.value, Catch::Matchers::WithinRel(q1.value, 1e-6));
    }
  }
  for (auto mc : {ModulationConstants::bpsk(), ModulationConstants::dbpsk()}) {
    const auto c2 = perf::ber_l2(fso, mc, BerMethod::closed);
    const auto q2 = perf::ber_l2(fso, mc, BerMethod::quadrature);
    REQUIRE(c2.converged);
    REQUIRE(q2.converged);
    CHECK_THAT(c2.value, Catch::Matchers::WithinRel(q2.value, 1e-6));
  }
}

TEST_CASE("backend equivalence on randomized scenarios", "[perf]") {
  std::mt19937_64 eng(31337);
  std::uniform_real_distribution<double> urho(0.97, 1.0), uerr(0.0, 0.15),
      upa(2.0, 60.0), umu(30.0, 300.0);
  std::uniform_int_distribution<int> uk(1, 50);
  int checked = 0;
  for (int trial = 0; trial < 20; ++trial) {
    auto cfg = ref_rf(urho(eng), uerr(eng));
    FsoParams p = kModerate;
    p.mu = umu(eng);
    FsoDistribution fso(p);
    const auto m = linkstats::make_sr_model(cfg, upa(eng), kPm27dbw, 1.0, uk(eng));
    const auto mc = (trial % 2 == 0) ? ModulationConstants::bpsk() : ModulationConstants::dbpsk();
    const auto closed = perf::ber_symbol(m, fso, mc, BerMethod::closed);
    const auto quadr = perf::ber_symbol(m, fso, mc, BerMethod::quadrature);
    REQUIRE(quadr.converged);
    if (!closed.converged) continue;
    ++checked;
    CHECK(std::abs(closed.value - quadr.value) / quadr.value < 1e-4);
  }
  CHECK(checked >= 18);
}

TEST_CASE("degenerate RF hop leaves only the optical integral", "[perf]") {
  FsoDistribution fso(kModerate);
  auto cfg = ref_rf();
  const auto m = linkstats::make_sr_model(cfg, 1e12, 1e12, 1.0, 1);
  const auto mc = ModulationConstants::bpsk();
  const auto full = perf::ber_symbol(m, fso, mc, BerMethod::quadrature);
  const auto l2 = perf::ber_l2(fso, mc, BerMethod::quadrature);
  const double expect = std::pow(mc.b, mc.a) / (2.0 * std::tgamma(mc.a)) * l2.value;
  CHECK_THAT(full.value, Catch::Matchers::WithinRel(expect, 1e-7));
}

TEST_CASE("ber_avg reduction and allowance sweep", "[perf]") {
  auto s = ref_scenario(1, 0.99, 0.05, 10.0);
  s.rf[0].frame_len = 1;
  FsoDistribution fso(s.fso);
  const auto m = linkstats::make_sr_model(s.rf[0], s.p_a[0], s.p_m[0], s.eta0, 1);
  const auto mc = ModulationConstants::bpsk();
  const auto avg = perf::ber_avg(s, mc, BerMethod::closed);
  const auto single = perf::ber_symbol(m, fso, mc, BerMethod::closed);
  CHECK_THAT(avg.value, Catch::Matchers::WithinRel(single.value, 1e-12));

  auto sweep = ref_scenario(1, 0.998, 0.05, 1.0);
  double prev = 1.0;
  for (double pa_db = 0.0; pa_db <= 40.0; pa_db += 4.0) {
    for (auto& v : sweep.p_a) v = std::pow(10.0, pa_db / 10.0);
    const auto r = perf::ber_avg(sweep, mc, BerMethod::closed);
    CHECK(r.value <= prev + 1e-10);
    prev = r.value;
  }
}

TEST_CASE("error floors", "[perf]") {
  auto s = ref_scenario(1, 0.998, 0.05, 12.0);
  const auto mc = ModulationConstants::bpsk();
  // optical-limit floor is definitionally the prefactor times the L1 average
  const double floor_mu = perf::ber_floor(s, mc, FloorKind::mu_inf);
  perf::detail::GCache cache;
  double manual = 0.0;
  for (int k = 1; k <= s.rf[0].frame_len; ++k) {
    const auto m = linkstats::make_sr_model(s.rf[0], s.p_a[0], s.p_m[0], s.eta0, k);
    manual += perf::ber_l1(m, mc, BerMethod::closed, &cache).value;
  }
  manual *= std::pow(mc.b, mc.a) / (2.0 * std::tgamma(mc.a)) / s.rf[0].frame_len;
  CHECK_THAT(floor_mu, Catch::Matchers::WithinRel(manual, 1e-12));

  auto s_mu = s;
  s_mu.fso.mu = 1e12;
  const auto at_mu = perf::ber_avg(s_mu, mc, BerMethod::closed);
  CHECK_THAT(at_mu.value, Catch::Matchers::WithinRel(floor_mu, 0.01));

  const double floor_pa = perf::ber_floor(s, mc, FloorKind::pa_inf);
  auto s_pa = s;
  for (auto& v : s_pa.p_a) v = 1e12;
  const auto at_pa = perf::ber_avg(s_pa, mc, BerMethod::quadrature);
  CHECK_THAT(at_pa.value, Catch::Matchers::WithinRel(floor_pa, 0.01));
}

TEST_CASE("bivariate backend for the product integral", "[perf]") {
  FsoDistribution fso(kModerate);
  auto cfg = ref_rf(0.9975566394859053, 0.05);
  const auto m = linkstats::make_sr_model(cfg, 10.0, kPm27dbw, 1.0, 1);
  const auto mc = ModulationConstants::bpsk();
  const auto quadr = perf::ber_l3(m, fso, mc, perf::L3Backend::quadrature);
  REQUIRE(quadr.converged);
  const auto biv = perf::ber_l3(m, fso, mc, perf::L3Backend::bivariate);
  if (biv.converged && !biv.used_fallback) {
    CHECK(std::abs(biv.value - quadr.value) / quadr.value < 1e-4);
    // scaling sanity: more optical SNR moves both backends the same way
    FsoParams p2 = kModerate;
    p2.mu *= 2.0;
    FsoDistribution fso2(p2);
    const auto q2 = perf::ber_l3(m, fso2, mc, perf::L3Backend::quadrature);
    const auto b2 = perf::ber_l3(m, fso2, mc, perf::L3Backend::bivariate);
    REQUIRE(q2.converged);
    if (b2.converged && !b2.used_fallback) {
      CHECK((q2.value - quadr.value) * (b2.value - biv.value) > 0.0);
    }
  } else {
    // fallback must deliver the quadrature value
    CHECK_THAT(biv.value, Catch::Matchers::WithinRel(quadr.value, 1e-7));
  }
}
