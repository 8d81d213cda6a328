#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "qpic/units.hpp"

namespace qpic {

/// Temperature-dependent Sellmeier law
///
///   n^2 = a1 + b1 f + (a2 + b2 f) / (λ^2 - (a3 + b3 f)^2)
///            + (a4 + b4 f) / (λ^2 - a5^2) - a6 λ^2
///
/// with f = (T - T0)(T + T0 + 546.32), λ in μm and T in °C. Both the
/// Edwards-Lawrence and the Jundt forms for LiNbO3 are special cases.
struct SellmeierCoefficients {
  std::array<double, 6> a{};
  std::array<double, 4> b{};

  double index_squared(double lambda_um, double f) const;
};

struct ValidityRange {
  double wavelength_min = 0.4;
  double wavelength_max = 2.0;
  double temperature_min = 0.0;
  double temperature_max = 200.0;
};

/// Dispersion of a waveguide in a uniaxial crystal. H (TE) follows the
/// ordinary axis, V (TM) the extraordinary axis, each shifted by a waveguide
/// index increment.
struct MaterialModel {
  std::string name;
  SellmeierCoefficients ordinary;
  SellmeierCoefficients extraordinary;
  double reference_temperature = 24.5;
  double delta_n_h = 0.01;
  double delta_n_v = 0.01;
  /// Optional linear correction of the increments, d(δn)/dλ around 1.55 μm.
  double delta_n_h_slope = 0.0;
  double delta_n_v_slope = 0.0;
  /// Operating temperature used by frequency-domain queries.
  double temperature = 24.5;
  ValidityRange validity;

  MaterialModel at_temperature(double temperature_c) const;

  /// Throws ValidationError if the increments or the temperature are out of
  /// range.
  void validate() const;
};

/// The bundled congruent LiNbO3 set: Edwards-Lawrence ordinary index, Jundt
/// extraordinary index, δn_H = δn_V = 0.01.
MaterialModel default_material();

/// Parses the key-value material format documented in docs/material-format.md.
MaterialModel parse_material(std::string_view text,
                             const std::string& source_name = "<material>");
MaterialModel load_material(const std::filesystem::path& path);

/// Bulk crystal index (no waveguide increment).
double bulk_index(const MaterialModel& model, Polarisation pol,
                  double lambda_um, double temperature_c);

/// Effective waveguide index n(λ, T) = n_bulk + δn.
double index(const MaterialModel& model, Polarisation pol, double lambda_um,
             double temperature_c);
double index(const MaterialModel& model, Polarisation pol, double lambda_um);

/// k = n(λ(ω)) ω / c at the model temperature, in rad/μm.
double wavevector(const MaterialModel& model, Polarisation pol, double omega);

/// (dk/dω)^-1 in μm/ps by central difference with relative step 1e-6.
double group_velocity(const MaterialModel& model, Polarisation pol,
                      double omega);

/// c / v_g
double group_index(const MaterialModel& model, Polarisation pol, double omega);

enum class Process { TypeIIPdc, PolarisationConversion };

struct PhaseMatchSpec {
  double poling_period = 9.0;       ///< Λ, μm
  double pdc_length = 20700.0;      ///< L_PDC, μm
  double pump_wavelength = 0.7644;  ///< λ_p, μm
  Process process = Process::TypeIIPdc;

  void validate() const;
};

/// Type-II mismatch with an ordinary (H) pump, H signal and V idler:
/// Δk = k_H(ω_s + ω_i) - k_H(ω_s) - k_V(ω_i) - 2π/Λ.
double pdc_mismatch(const MaterialModel& model, const PhaseMatchSpec& spec,
                    double omega_s, double omega_i);

/// Δk_PC = 2π/λ (n_H - n_V) - 2π/Λ_PC.
double pc_mismatch(const MaterialModel& model, double pc_period_um,
                   double lambda_um, double temperature_c);

/// Poling period that phase-matches polarisation conversion at λ.
double pc_matched_period(const MaterialModel& model, double lambda_um,
                         double temperature_c);

struct RootResult {
  double wavelength = 0.0;  ///< μm
  double residual = 0.0;    ///< |Δk| at the root, rad/μm
  std::size_t root_count = 0;
  bool multiple() const { return root_count > 1; }
};

/// Degenerate signal/idler wavelength (λ_s = λ_i = 2 λ_p) for which
/// type-II PDC is phase-matched, searched in [1.4, 1.7] μm. With several
/// roots, returns the one closest to 1.55 μm and reports the count.
RootResult degenerate_wavelength(const MaterialModel& model,
                                 double poling_period_um,
                                 double temperature_c);

/// Wavelength in [1.4, 1.7] μm at which Δk_PC = 0.
RootResult pc_phase_matched_wavelength(const MaterialModel& model,
                                       double pc_period_um,
                                       double temperature_c);

struct TuningRow {
  double pump_wavelength;
  double signal_wavelength;
  double idler_wavelength;
};

struct TuningCurve {
  std::vector<TuningRow> rows;
  /// Pump wavelengths for which no phase-matched pair was found.
  std::vector<double> unmatched_pump_wavelengths;
};

/// Phase-matched (λ_s, λ_i) versus pump wavelength on `points` samples of
/// [pump_min, pump_max]. The signal and idler columns are the two branches
/// of the tuning cross.
TuningCurve tuning_curve(const MaterialModel& model, double poling_period_um,
                         double temperature_c, double pump_min_um,
                         double pump_max_um, std::size_t points);

/// Tolerance on |Δk| accepted from every root finder, rad/μm.
inline constexpr double kMismatchTolerance = 1e-10;

}  // namespace qpic
