#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "spdc/dispersion.hpp"
#include "spdc/errors.hpp"
#include "spdc/units.hpp"

namespace spdc {

inline constexpr double infinity = std::numeric_limits<double>::infinity();

// Full physical description of one SPDC setup. Signal and idler propagate as
// ordinary waves, the pump as an extraordinary wave at the cut angle (type I
// phase matching in a negative uniaxial crystal). All angles are internal.
struct Config {
  CrystalModel crystal = make_liio3();
  double length_um = 1000.0;      // crystal length L
  double lambda_p_um = 0.405;     // central pump vacuum wavelength
  double lambda_s_um = 0.810;     // central signal vacuum wavelength
  double lambda_i_um = 0.810;     // central idler vacuum wavelength
  double pump_waist_um = 400.0;   // w_p
  double pump_duration_fs = infinity;   // T0; infinity = CW pump
  double collection_s_um = 400.0;       // w_s; 0 = none, infinity allowed
  double collection_i_um = 400.0;       // w_i
  double filter_s_nm = 1.0;       // half width at 1/e in wavelength; 0 and inf allowed
  double filter_i_nm = 1.0;
  double phi_s_rad = 0.0;         // internal emission angle, signal
  double phi_i_rad = 0.0;         // internal emission angle, idler
  double alpha_rad = 0.0;         // azimuthal walk-off orientation
  std::optional<double> walkoff_rad = 0.0;  // rho_0; nullopt = computed from theta
  std::optional<double> theta_cut_rad;      // nullopt = solved for phase matching
  double beta = 0.455;            // sinc -> Gaussian approximation constant

  void validate() const {
    const double closure =
        std::abs(1.0 / lambda_p_um - 1.0 / lambda_s_um - 1.0 / lambda_i_um) *
        lambda_p_um;
    if (!(closure < 1e-9)) {
      throw validation_error(
          "energy conservation violated: 1/lambda_p != 1/lambda_s + 1/lambda_i "
          "(relative mismatch " + std::to_string(closure) + ")");
    }
    if (!(length_um > 0.0)) throw validation_error("crystal length must be > 0");
    if (!(pump_waist_um > 0.0)) throw validation_error("pump waist must be > 0");
    if (!(pump_duration_fs > 0.0))
      throw validation_error("pump duration must be > 0 (inf = CW)");
    if (collection_s_um < 0.0 || collection_i_um < 0.0)
      throw validation_error("collection widths must be >= 0");
    if (filter_s_nm < 0.0 || filter_i_nm < 0.0)
      throw validation_error("filter widths must be >= 0");
    if (!(beta > 0.0)) throw validation_error("beta must be > 0");
    if (walkoff_rad && (*walkoff_rad < 0.0 || *walkoff_rad >= pi / 2.0))
      throw validation_error("walk-off angle must lie in [0, pi/2)");
  }

  bool cw_pump() const { return std::isinf(pump_duration_fs); }
};

}  // namespace spdc
