#pragma once

#include <numbers>

// Unit system used throughout: lengths in um, time in fs, angular frequency
// in rad/fs, transverse momentum and wave numbers in rad/um, angles in rad.

namespace spdc {

inline constexpr double speed_of_light = 0.299792458;  // um/fs

inline constexpr double pi = std::numbers::pi;

inline constexpr double deg_to_rad(double deg) { return deg * pi / 180.0; }

// Vacuum wavelength (um) -> angular frequency (rad/fs).
inline constexpr double angular_frequency(double lambda_um) {
  return 2.0 * pi * speed_of_light / lambda_um;
}

}  // namespace spdc
