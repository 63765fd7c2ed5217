#pragma once

#include <cmath>
#include <string>

#include "spdc/errors.hpp"
#include "spdc/units.hpp"

namespace spdc {

enum class CrystalName { LiIO3, BBO };

enum class Polarization { Ordinary, Extraordinary };

// Sellmeier form n^2 = a + b / (lambda^2 - c) + d * lambda^2, lambda in um.
struct SellmeierSet {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;

  double n_squared(double lambda_um) const {
    const double l2 = lambda_um * lambda_um;
    return a + b / (l2 - c) + d * l2;
  }
  double index(double lambda_um) const { return std::sqrt(n_squared(lambda_um)); }
  // d(n)/d(lambda), analytic.
  double index_derivative(double lambda_um) const {
    const double l2 = lambda_um * lambda_um;
    const double denom = l2 - c;
    const double dn2 = -2.0 * b * lambda_um / (denom * denom) + 2.0 * d * lambda_um;
    return dn2 / (2.0 * index(lambda_um));
  }
};

struct CrystalModel {
  CrystalName name = CrystalName::BBO;
  SellmeierSet ordinary;
  SellmeierSet extraordinary;
  double lambda_min_um = 0.0;
  double lambda_max_um = 0.0;

  std::string display_name() const {
    return name == CrystalName::LiIO3 ? "LiIO3" : "BBO";
  }
};

// Beta barium borate, Eimerl et al., J. Appl. Phys. 62, 1968 (1987).
inline CrystalModel make_bbo() {
  CrystalModel m;
  m.name = CrystalName::BBO;
  m.ordinary = {2.7405, 0.0184, 0.0179, -0.0155};
  m.extraordinary = {2.3730, 0.0128, 0.0156, -0.0044};
  m.lambda_min_um = 0.21;
  m.lambda_max_um = 1.06;
  return m;
}

// Lithium iodate, two-term fit from Handbook of Optics (OSA), Vol. II.
inline CrystalModel make_liio3() {
  CrystalModel m;
  m.name = CrystalName::LiIO3;
  m.ordinary = {3.4095, 0.047664, 0.033991, 0.0};
  m.extraordinary = {2.9163, 0.034514, 0.031034, 0.0};
  m.lambda_min_um = 0.35;
  m.lambda_max_um = 2.2;
  return m;
}

inline CrystalModel make_crystal(CrystalName name) {
  return name == CrystalName::LiIO3 ? make_liio3() : make_bbo();
}

// Propagation axis of a wave: its polarization and, for extraordinary waves,
// the angle theta between the wave vector and the optic axis.
struct OpticalAxis {
  Polarization polarization = Polarization::Ordinary;
  double theta = 0.0;  // rad, in [0, pi/2], used only for Extraordinary

  static OpticalAxis ordinary() { return {Polarization::Ordinary, 0.0}; }
  static OpticalAxis extraordinary(double theta) {
    return {Polarization::Extraordinary, theta};
  }
};

namespace detail {

inline void check_range(const CrystalModel& crystal, double lambda_um,
                        bool strict_interior = false) {
  const bool bad = strict_interior
                       ? (lambda_um <= crystal.lambda_min_um ||
                          lambda_um >= crystal.lambda_max_um)
                       : (lambda_um < crystal.lambda_min_um ||
                          lambda_um > crystal.lambda_max_um);
  if (bad) {
    throw validation_error("wavelength " + std::to_string(lambda_um) +
                           " um outside valid range [" +
                           std::to_string(crystal.lambda_min_um) + ", " +
                           std::to_string(crystal.lambda_max_um) + "] um of " +
                           crystal.display_name());
  }
}

}  // namespace detail

// Refractive index along the given axis. For the extraordinary wave the
// angle-dependent index 1/n(theta)^2 = cos^2(theta)/n_o^2 + sin^2(theta)/n_e^2.
inline double refractive_index(const CrystalModel& crystal, const OpticalAxis& axis,
                               double lambda_um) {
  detail::check_range(crystal, lambda_um);
  if (axis.polarization == Polarization::Ordinary) {
    return crystal.ordinary.index(lambda_um);
  }
  if (axis.theta < 0.0 || axis.theta > pi / 2.0) {
    throw validation_error("propagation angle theta must lie in [0, pi/2]");
  }
  const double ct = std::cos(axis.theta);
  const double st = std::sin(axis.theta);
  const double inv_n2 = ct * ct / crystal.ordinary.n_squared(lambda_um) +
                        st * st / crystal.extraordinary.n_squared(lambda_um);
  return 1.0 / std::sqrt(inv_n2);
}

namespace detail {

inline double index_derivative(const CrystalModel& crystal, const OpticalAxis& axis,
                               double lambda_um) {
  if (axis.polarization == Polarization::Ordinary) {
    return crystal.ordinary.index_derivative(lambda_um);
  }
  // d/dl of [cos^2/n_o^2 + sin^2/n_e^2]^(-1/2)
  const double ct2 = std::cos(axis.theta) * std::cos(axis.theta);
  const double st2 = std::sin(axis.theta) * std::sin(axis.theta);
  const double no = crystal.ordinary.index(lambda_um);
  const double ne = crystal.extraordinary.index(lambda_um);
  const double dno = crystal.ordinary.index_derivative(lambda_um);
  const double dne = crystal.extraordinary.index_derivative(lambda_um);
  const double n = refractive_index(crystal, axis, lambda_um);
  const double d_inv_n2 = ct2 * (-2.0 / (no * no * no)) * dno +
                          st2 * (-2.0 / (ne * ne * ne)) * dne;
  return -0.5 * n * n * n * d_inv_n2;
}

}  // namespace detail

// Group index N_g = n - lambda * dn/dlambda. The derivative is analytic from
// the Sellmeier form; a central finite-difference path (step 1e-4 um) is kept
// for cross-checking.
inline double group_index(const CrystalModel& crystal, const OpticalAxis& axis,
                          double lambda_um) {
  detail::check_range(crystal, lambda_um, /*strict_interior=*/true);
  return refractive_index(crystal, axis, lambda_um) -
         lambda_um * detail::index_derivative(crystal, axis, lambda_um);
}

inline double group_index_fd(const CrystalModel& crystal, const OpticalAxis& axis,
                             double lambda_um, double step_um = 1e-4) {
  detail::check_range(crystal, lambda_um, /*strict_interior=*/true);
  const double dn = (refractive_index(crystal, axis, lambda_um + step_um) -
                     refractive_index(crystal, axis, lambda_um - step_um)) /
                    (2.0 * step_um);
  return refractive_index(crystal, axis, lambda_um) - lambda_um * dn;
}

// k = 2 pi n / lambda, rad/um.
inline double wave_number(double index, double lambda_vacuum_um) {
  if (index <= 0.0 || lambda_vacuum_um <= 0.0) {
    throw validation_error("wave_number requires positive index and wavelength");
  }
  return 2.0 * pi * index / lambda_vacuum_um;
}

// Poynting-vector walk-off of the extraordinary wave:
// tan(rho) = (n(theta)^2 / 2) |1/n_e^2 - 1/n_o^2| sin(2 theta), rho >= 0.
inline double walkoff_angle(const CrystalModel& crystal, double theta,
                            double lambda_um) {
  if (theta < 0.0 || theta > pi / 2.0) {
    throw validation_error("walkoff_angle requires theta in [0, pi/2]");
  }
  const double n = refractive_index(crystal, OpticalAxis::extraordinary(theta),
                                    lambda_um);
  const double inv_ne2 = 1.0 / crystal.extraordinary.n_squared(lambda_um);
  const double inv_no2 = 1.0 / crystal.ordinary.n_squared(lambda_um);
  const double t = 0.5 * n * n * std::abs(inv_ne2 - inv_no2) * std::sin(2.0 * theta);
  return std::atan(t);
}

}  // namespace spdc
