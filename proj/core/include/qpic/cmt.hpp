#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "qpic/dispersion.hpp"
#include "qpic/numeric.hpp"

namespace qpic {

struct CmtState {
  std::complex<double> te{1.0, 0.0};
  std::complex<double> tm{0.0, 0.0};
  double z = 0.0;  ///< μm

  double power() const { return std::norm(te) + std::norm(tm); }
};

/// Closed-form TE/TM coupled-mode evolution over a distance z, taking the
/// input state as the amplitudes at the start of the section:
///   A_TE(z) = {A_TE [cos sz - i Δβ/(2s) sin sz] - i κ/s A_TM sin sz} e^{iΔβz/2}
///   A_TM(z) = {A_TM [cos sz + i Δβ/(2s) sin sz] - i κ/s A_TE sin sz} e^{-iΔβz/2}
/// with s = sqrt(κ^2 + (Δβ/2)^2). The returned z is state.z + z.
CmtState cmt_evolve(const CmtState& state, double kappa, double delta_beta,
                    double z);

/// Fraction converted out of the launched polarisation after a section of
/// length L: (κ/s)^2 sin^2(sL).
double conversion_fraction(double kappa, double delta_beta, double length);

struct SpectrumRow {
  double wavelength;  ///< μm
  double converted;   ///< fraction in [0, 1]
};

/// Converter response with Δβ = Δk_PC(λ) on `points` samples of
/// [lambda_min, lambda_max].
std::vector<SpectrumRow> pc_spectrum(const MaterialModel& model,
                                     double pc_period, double pc_length,
                                     double kappa, double temperature_c,
                                     double lambda_min, double lambda_max,
                                     std::size_t points);

/// FWHM of a sampled converter response, nm-free (same unit as wavelength).
std::optional<WidthInfo> spectrum_fwhm(const std::vector<SpectrumRow>& rows);

struct SwitchMapSpec {
  double kappa_c = kPi / 16000;   ///< rad/μm
  double half_length = 4000.0;    ///< μm
  double gain = 3.5e-5;           ///< Δβ per volt, rad/(μm V)
  double u1_min = -30, u1_max = 30;
  double u2_min = -30, u2_max = 30;
  std::size_t u1_points = 121;
  std::size_t u2_points = 121;
};

/// Bar-state power of the two-section Δβ-reversal coupler on a (U1, U2)
/// grid. bar[a][b] belongs to (u1[a], u2[b]).
struct SwitchMap {
  std::vector<double> u1;
  std::vector<double> u2;
  std::vector<std::vector<double>> bar;

  double min() const;
  double max() const;
};

SwitchMap switch_map(const SwitchMapSpec& spec);

/// Bar-state power for one pair of voltages.
double bar_transmission(double kappa_c, double half_length, double delta_beta_1,
                        double delta_beta_2);

/// sin^2 model of a zero-gap coupler: unwanted-port fraction
/// sin^2(π (L_c - L_opt) / (2 B)) for beat length B.
struct CouplerPolFit {
  double beat_length = 700.0;     ///< μm
  double optimum_length = 500.0;  ///< μm
  double rms_residual = 0.0;
};

struct CouplerFit {
  CouplerPolFit te;
  CouplerPolFit tm;
};

double splitting_ratio(const CouplerFit& fit, double coupler_length,
                       Polarisation pol);

/// PBS angles for a coupler length: α = acos(sqrt(ratio_TE)),
/// β = acos(sqrt(ratio_TM)), so a zero ratio gives the ideal π/2.
struct PbsAngles {
  double alpha;
  double beta;
};
PbsAngles pbs_angles(const CouplerFit& fit, double coupler_length);

struct CouplerSample {
  double length;  ///< μm
  double ratio;   ///< unwanted-port fraction
};

/// Least-squares sin^2 fit of one polarisation. A coarse grid search over
/// (B, L_opt) seeds a Levenberg-Marquardt refinement.
CouplerPolFit fit_coupler_polarisation(const std::vector<CouplerSample>& data);
CouplerFit fit_coupler(const std::vector<CouplerSample>& te,
                       const std::vector<CouplerSample>& tm);

/// Reads (length, ratio) pairs from CSV text with a header row. `column`
/// names the ratio column (`ratio`, `ratio_te`, ...); the length column is
/// `length`. Empty ratio cells are skipped.
std::vector<CouplerSample> read_coupler_samples(const std::string& text,
                                                const std::string& source,
                                                const std::string& column);

/// Key-value text with a [te] and [tm] section.
std::string format_coupler_fit(const CouplerFit& fit);

}  // namespace qpic
