#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "spdc/config.hpp"
#include "spdc/dispersion.hpp"
#include "spdc/errors.hpp"
#include "spdc/units.hpp"

namespace spdc {

using Vec6 = Eigen::Matrix<double, 6, 1>;

// Coordinate order, fixed everywhere: x = (q_s^x, q_s^y, Omega_s, q_i^x, q_i^y, Omega_i).
enum Coord { QSX = 0, QSY = 1, OMS = 2, QIX = 3, QIY = 4, OMI = 5 };

// First-order expansion of the Delta factors around q = 0, Omega = 0.
struct Linearization {
  double d0_const = 0.0;  // rad/um
  Vec6 d0_grad = Vec6::Zero();
  double dk_const = 0.0;  // rad/um
  Vec6 dk_grad = Vec6::Zero();
};

namespace detail {

// Longitudinal wave number of photon n at frequency omega with transverse
// momentum q: k = sqrt((omega n(omega)/c)^2 - |q|^2).
inline double longitudinal_k(const CrystalModel& crystal, const OpticalAxis& axis,
                             double omega, double qx, double qy) {
  const double lambda = 2.0 * pi * speed_of_light / omega;
  const double n = refractive_index(crystal, axis, lambda);
  const double k0 = omega * n / speed_of_light;
  const double q2 = qx * qx + qy * qy;
  if (q2 >= k0 * k0) {
    throw numerical_error("evanescent wave: |q|^2 >= (omega n / c)^2");
  }
  return std::sqrt(k0 * k0 - q2);
}

inline double resolved_theta(const Config& config);

}  // namespace detail

// Transverse phase mismatch along y:
// Delta_0 = q_s^y cos(phi_s) + q_i^y cos(phi_i) + k_s sin(phi_s) - k_i sin(phi_i).
inline double delta0_exact(const Config& config, const Vec6& x) {
  const OpticalAxis ord = OpticalAxis::ordinary();
  const double ws = angular_frequency(config.lambda_s_um) + x[OMS];
  const double wi = angular_frequency(config.lambda_i_um) + x[OMI];
  const double ks = detail::longitudinal_k(config.crystal, ord, ws, x[QSX], x[QSY]);
  const double ki = detail::longitudinal_k(config.crystal, ord, wi, x[QIX], x[QIY]);
  return x[QSY] * std::cos(config.phi_s_rad) + x[QIY] * std::cos(config.phi_i_rad) +
         ks * std::sin(config.phi_s_rad) - ki * std::sin(config.phi_i_rad);
}

// Longitudinal phase mismatch:
// Delta_k = k_p - k_s cos(phi_s) - k_i cos(phi_i) - q_s^y sin(phi_s)
//           + q_i^y sin(phi_i) + (q_s^x + q_i^x) tan(rho_0) cos(alpha)
//           + Delta_0 tan(rho_0) sin(alpha),
// with k_p at omega_p^0 + Omega_s + Omega_i on the pump's extraordinary axis.
inline double deltak_exact(const Config& config, const Vec6& x) {
  const double theta = detail::resolved_theta(config);
  const OpticalAxis ord = OpticalAxis::ordinary();
  const OpticalAxis pump = OpticalAxis::extraordinary(theta);
  const double ws = angular_frequency(config.lambda_s_um) + x[OMS];
  const double wi = angular_frequency(config.lambda_i_um) + x[OMI];
  const double wp = angular_frequency(config.lambda_p_um) + x[OMS] + x[OMI];
  const double ks = detail::longitudinal_k(config.crystal, ord, ws, x[QSX], x[QSY]);
  const double ki = detail::longitudinal_k(config.crystal, ord, wi, x[QIX], x[QIY]);
  const double kp = detail::longitudinal_k(config.crystal, pump, wp, 0.0, 0.0);
  const double rho0 = config.walkoff_rad
                          ? *config.walkoff_rad
                          : walkoff_angle(config.crystal, theta, config.lambda_p_um);
  double dk = kp - ks * std::cos(config.phi_s_rad) - ki * std::cos(config.phi_i_rad) -
              x[QSY] * std::sin(config.phi_s_rad) + x[QIY] * std::sin(config.phi_i_rad);
  if (rho0 != 0.0) {
    dk += (x[QSX] + x[QIX]) * std::tan(rho0) * std::cos(config.alpha_rad) +
          delta0_exact(config, x) * std::tan(rho0) * std::sin(config.alpha_rad);
  }
  return dk;
}

// Central phase mismatch as a function of the pump cut angle, at x = 0.
inline double central_mismatch(const Config& config, double theta) {
  const OpticalAxis ord = OpticalAxis::ordinary();
  const double ks = wave_number(refractive_index(config.crystal, ord, config.lambda_s_um),
                                config.lambda_s_um);
  const double ki = wave_number(refractive_index(config.crystal, ord, config.lambda_i_um),
                                config.lambda_i_um);
  const double np = refractive_index(config.crystal, OpticalAxis::extraordinary(theta),
                                     config.lambda_p_um);
  const double kp = wave_number(np, config.lambda_p_um);
  return kp - ks * std::cos(config.phi_s_rad) - ki * std::cos(config.phi_i_rad);
}

// Pump cut angle theta with |Delta_k(0)| < 1e-9 rad/um, found by bisection.
inline double solve_cut_angle(const Config& config) {
  double lo = 1e-9;
  double hi = pi / 2.0 - 1e-9;
  double flo = central_mismatch(config, lo);
  double fhi = central_mismatch(config, hi);
  if (flo * fhi > 0.0) {
    throw numerical_error(
        "no phase-matching angle for " + config.crystal.display_name() +
        " at lambda_p = " + std::to_string(config.lambda_p_um) +
        " um: Delta_k(0) spans [" + std::to_string(std::min(flo, fhi)) + ", " +
        std::to_string(std::max(flo, fhi)) + "] rad/um without sign change");
  }
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = central_mismatch(config, mid);
    if (std::abs(fmid) < 1e-9 && hi - lo < 1e-12) return mid;
    if (flo * fmid <= 0.0) {
      hi = mid;
      fhi = fmid;
    } else {
      lo = mid;
      flo = fmid;
    }
  }
  return 0.5 * (lo + hi);
}

namespace detail {

inline double resolved_theta(const Config& config) {
  return config.theta_cut_rad ? *config.theta_cut_rad : solve_cut_angle(config);
}

}  // namespace detail

// First-order expansion of Delta_0 and Delta_k in all six coordinates.
// dk/dOmega = N_g/c per wave, dk/dq = 0 at q = 0.
inline Linearization linearize(const Config& config) {
  config.validate();
  const double theta = detail::resolved_theta(config);
  const OpticalAxis ord = OpticalAxis::ordinary();
  const OpticalAxis pump = OpticalAxis::extraordinary(theta);
  const double ngs = group_index(config.crystal, ord, config.lambda_s_um) / speed_of_light;
  const double ngi = group_index(config.crystal, ord, config.lambda_i_um) / speed_of_light;
  const double ngp = group_index(config.crystal, pump, config.lambda_p_um) / speed_of_light;
  const double cs = std::cos(config.phi_s_rad), ss = std::sin(config.phi_s_rad);
  const double ci = std::cos(config.phi_i_rad), si = std::sin(config.phi_i_rad);
  const double ks0 = wave_number(refractive_index(config.crystal, ord, config.lambda_s_um),
                                 config.lambda_s_um);
  const double ki0 = wave_number(refractive_index(config.crystal, ord, config.lambda_i_um),
                                 config.lambda_i_um);
  const double rho0 = config.walkoff_rad
                          ? *config.walkoff_rad
                          : walkoff_angle(config.crystal, theta, config.lambda_p_um);

  Linearization lin;
  lin.d0_grad << 0.0, cs, ss * ngs, 0.0, ci, -si * ngi;
  lin.d0_const = ks0 * ss - ki0 * si;

  lin.dk_grad << 0.0, -ss, ngp - cs * ngs, 0.0, si, ngp - ci * ngi;
  lin.dk_const = central_mismatch(config, theta);
  if (rho0 != 0.0) {
    const double tr = std::tan(rho0);
    lin.dk_grad[QSX] += tr * std::cos(config.alpha_rad);
    lin.dk_grad[QIX] += tr * std::cos(config.alpha_rad);
    lin.dk_grad += tr * std::sin(config.alpha_rad) * lin.d0_grad;
    lin.dk_const += tr * std::sin(config.alpha_rad) * lin.d0_const;
  }
  return lin;
}

}  // namespace spdc
