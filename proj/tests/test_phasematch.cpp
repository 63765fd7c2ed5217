#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "spdc/phasematch.hpp"
#include "spdc/scenarios.hpp"

using namespace spdc;

namespace {

// Independently coded Delta evaluators, kept deliberately separate from the
// library implementation.
double ref_index(const Config& c, bool pump, double lambda, double theta) {
  const double no2 = c.crystal.ordinary.n_squared(lambda);
  if (!pump) return std::sqrt(no2);
  const double ne2 = c.crystal.extraordinary.n_squared(lambda);
  const double ct = std::cos(theta), st = std::sin(theta);
  return 1.0 / std::sqrt(ct * ct / no2 + st * st / ne2);
}

double ref_k(const Config& c, bool pump, double omega, double qx, double qy,
             double theta) {
  const double lambda = 2.0 * pi * speed_of_light / omega;
  const double k0 = omega * ref_index(c, pump, lambda, theta) / speed_of_light;
  return std::sqrt(k0 * k0 - qx * qx - qy * qy);
}

double ref_delta0(const Config& c, const Vec6& x) {
  const double ws = angular_frequency(c.lambda_s_um) + x[OMS];
  const double wi = angular_frequency(c.lambda_i_um) + x[OMI];
  const double ks = ref_k(c, false, ws, x[QSX], x[QSY], 0.0);
  const double ki = ref_k(c, false, wi, x[QIX], x[QIY], 0.0);
  return x[QSY] * std::cos(c.phi_s_rad) + x[QIY] * std::cos(c.phi_i_rad) +
         ks * std::sin(c.phi_s_rad) - ki * std::sin(c.phi_i_rad);
}

double ref_deltak(const Config& c, const Vec6& x, double theta) {
  const double ws = angular_frequency(c.lambda_s_um) + x[OMS];
  const double wi = angular_frequency(c.lambda_i_um) + x[OMI];
  const double wp = angular_frequency(c.lambda_p_um) + x[OMS] + x[OMI];
  const double ks = ref_k(c, false, ws, x[QSX], x[QSY], 0.0);
  const double ki = ref_k(c, false, wi, x[QIX], x[QIY], 0.0);
  const double kp = ref_k(c, true, wp, 0.0, 0.0, theta);
  const double rho = c.walkoff_rad.value_or(0.0);
  return kp - ks * std::cos(c.phi_s_rad) - ki * std::cos(c.phi_i_rad) -
         x[QSY] * std::sin(c.phi_s_rad) + x[QIY] * std::sin(c.phi_i_rad) +
         (x[QSX] + x[QIX]) * std::tan(rho) * std::cos(c.alpha_rad) +
         ref_delta0(c, x) * std::tan(rho) * std::sin(c.alpha_rad);
}

Vec6 random_excursion(std::mt19937_64& rng, double q_scale, double omega_scale) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vec6 x;
  x << u(rng) * q_scale, u(rng) * q_scale, u(rng) * omega_scale, u(rng) * q_scale,
      u(rng) * q_scale, u(rng) * omega_scale;
  return x;
}

}  // namespace

TEST_CASE("delta0: trivial cancellations") {
  Config c = preset("fig2").config;
  CHECK(delta0_exact(c, Vec6::Zero()) == doctest::Approx(0.0).epsilon(1e-15));

  c.phi_s_rad = c.phi_i_rad = 0.0;
  Vec6 x = Vec6::Zero();
  x[QSY] = 1.0;
  CHECK(delta0_exact(c, x) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("delta evaluators match the independent duplicates") {
  for (const char* name : {"fig2", "teich", "altman"}) {
    Config c = preset(name).config;
    const double theta = solve_cut_angle(c);
    c.theta_cut_rad = theta;  // pin so both sides use the same pump axis
    std::mt19937_64 rng(7);
    for (int i = 0; i < 50; ++i) {
      const Vec6 x = random_excursion(rng, 0.3, 0.02);
      CHECK(delta0_exact(c, x) == doctest::Approx(ref_delta0(c, x)).epsilon(1e-12));
      CHECK(deltak_exact(c, x) == doctest::Approx(ref_deltak(c, x, theta)).epsilon(1e-12));
    }
  }
}

TEST_CASE("delta evaluators match the duplicates with walk-off") {
  Config c = preset("fig2").config;
  c.walkoff_rad = 0.06;
  c.alpha_rad = 0.4;
  c.theta_cut_rad = solve_cut_angle(c);
  std::mt19937_64 rng(13);
  for (int i = 0; i < 30; ++i) {
    const Vec6 x = random_excursion(rng, 0.3, 0.02);
    CHECK(deltak_exact(c, x) ==
          doctest::Approx(ref_deltak(c, x, *c.theta_cut_rad)).epsilon(1e-12));
  }
}

TEST_CASE("delta0 is odd under the mirrored signal-idler swap") {
  Config c = preset("fig2").config;  // symmetric degenerate preset
  std::mt19937_64 rng(11);
  for (int i = 0; i < 20; ++i) {
    const Vec6 x = random_excursion(rng, 0.3, 0.02);
    Vec6 swapped;
    swapped << x[QIX], -x[QIY], x[OMI], x[QSX], -x[QSY], x[OMS];
    CHECK(delta0_exact(c, swapped) ==
          doctest::Approx(-delta0_exact(c, x)).epsilon(1e-10));
  }
}

TEST_CASE("deltak: phase matched preset has vanishing central mismatch") {
  for (const char* name : {"fig2", "teich", "altman", "valencia_w30"}) {
    const Config c = preset(name).config;
    CHECK(std::abs(deltak_exact(c, Vec6::Zero())) < 1e-6);
  }
}

TEST_CASE("deltak: independent of x-momenta when walk-off vanishes") {
  Config c = preset("fig2").config;
  c.theta_cut_rad = solve_cut_angle(c);
  Vec6 x = Vec6::Zero();
  x[OMS] = 0.01;
  const double base = deltak_exact(c, x);
  x[QSX] = 0.02;
  x[QIX] = -0.01;
  // only the |q|^2 correction inside k_s, k_i remains, which is second order
  CHECK(deltak_exact(c, x) == doctest::Approx(base).epsilon(1e-3));
  x[QSX] = x[QIX] = 0.0;
  CHECK(deltak_exact(c, x) == doctest::Approx(base).epsilon(1e-15));
}

TEST_CASE("linearize: gradients match finite differences of the exact deltas") {
  const double q_scale = 10.0;    // rad/um, order of the central wave numbers
  const double omega_scale = 2.0; // rad/fs, order of the central frequencies
  for (const auto& p : all_presets()) {
    CAPTURE(p.name);
    Config c = p.config;
    c.theta_cut_rad = solve_cut_angle(c);
    const Linearization lin = linearize(c);
    CHECK(lin.d0_const == doctest::Approx(delta0_exact(c, Vec6::Zero())).epsilon(1e-10));
    CHECK(lin.dk_const == doctest::Approx(deltak_exact(c, Vec6::Zero())).scale(1.0).epsilon(1e-10));
    for (int j = 0; j < 6; ++j) {
      const double h = 1e-4 * (j == OMS || j == OMI ? omega_scale : q_scale);
      Vec6 plus = Vec6::Zero(), minus = Vec6::Zero();
      plus[j] = h;
      minus[j] = -h;
      const double fd0 = (delta0_exact(c, plus) - delta0_exact(c, minus)) / (2.0 * h);
      const double fdk = (deltak_exact(c, plus) - deltak_exact(c, minus)) / (2.0 * h);
      CHECK(lin.d0_grad[j] == doctest::Approx(fd0).scale(1.0).epsilon(1e-6));
      CHECK(lin.dk_grad[j] == doctest::Approx(fdk).scale(1.0).epsilon(1e-6));
    }
  }
}

TEST_CASE("linearize: structure of the gradients") {
  {
    Config c = preset("teich").config;  // collinear, no walk-off
    const Linearization lin = linearize(c);
    CHECK(lin.dk_grad[QSX] == 0.0);
    CHECK(lin.dk_grad[QSY] == 0.0);
    CHECK(lin.dk_grad[QIX] == 0.0);
    CHECK(lin.dk_grad[QIY] == 0.0);
    CHECK(lin.dk_grad[OMS] != 0.0);
  }
  {
    const Linearization lin = linearize(preset("fig2").config);
    CHECK(lin.d0_grad[QSX] == 0.0);
    CHECK(lin.d0_grad[QIX] == 0.0);
    CHECK(lin.d0_grad[QSY] == doctest::Approx(std::cos(deg_to_rad(10.0))).epsilon(1e-14));
  }
}

TEST_CASE("solve_cut_angle: pinned angles") {
  {
    Config c;  // BBO collinear degenerate type I at 405 nm
    c.crystal = make_bbo();
    c.lambda_p_um = 0.405;
    c.lambda_s_um = c.lambda_i_um = 0.810;
    c.phi_s_rad = c.phi_i_rad = 0.0;
    // Pinned by an independent bisection over the published Sellmeier curves.
    CHECK(solve_cut_angle(c) == doctest::Approx(0.500393).epsilon(1e-6));
    CHECK(solve_cut_angle(c) > 0.4);
    CHECK(solve_cut_angle(c) < 0.6);
  }
  {
    const Config c = preset("fig2").config;  // LiIO3, 10 deg degenerate
    CHECK(solve_cut_angle(c) == doctest::Approx(0.904758).epsilon(1e-6));
    CHECK(std::abs(central_mismatch(c, solve_cut_angle(c))) < 1e-9);
  }
}

TEST_CASE("solve_cut_angle: no phase-matching angle exists") {
  // n_e > n_o everywhere, so the pump index always exceeds the value type I
  // matching would need and Delta_k(0) never changes sign.
  Config c;
  c.crystal.ordinary = {2.25, 0.01, 0.02, 0.0};
  c.crystal.extraordinary = {3.0, 0.01, 0.02, 0.0};
  c.crystal.lambda_min_um = 0.2;
  c.crystal.lambda_max_um = 2.0;
  c.lambda_p_um = 0.405;
  c.lambda_s_um = c.lambda_i_um = 0.810;
  CHECK_THROWS_AS(solve_cut_angle(c), numerical_error);
}

TEST_CASE("config validation") {
  Config c = preset("fig2").config;
  c.lambda_s_um = 0.8;  // breaks energy conservation
  CHECK_THROWS_AS(c.validate(), validation_error);
  c = preset("fig2").config;
  c.length_um = 0.0;
  CHECK_THROWS_AS(c.validate(), validation_error);
  c = preset("fig2").config;
  c.filter_s_nm = -1.0;
  CHECK_THROWS_AS(c.validate(), validation_error);
}
