#pragma once

// Unit system used throughout the library:
//   length            μm
//   time              ps
//   angular frequency rad/ps
//   wave vector       rad/μm
//   temperature       °C

#include <numbers>

namespace qpic {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Vacuum speed of light in μm/ps.
inline constexpr double kSpeedOfLight = 299.792458;

/// λ [μm] -> ω [rad/ps]
constexpr double wavelength_to_omega(double lambda_um) {
  return kTwoPi * kSpeedOfLight / lambda_um;
}

/// ω [rad/ps] -> λ [μm]
constexpr double omega_to_wavelength(double omega) {
  return kTwoPi * kSpeedOfLight / omega;
}

enum class Polarisation { H, V };

constexpr const char* to_string(Polarisation p) {
  return p == Polarisation::H ? "H" : "V";
}

}  // namespace qpic
