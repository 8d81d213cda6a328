#pragma once

#include <complex>
#include <memory>
#include <string>
#include <variant>

#include <Eigen/Dense>

#include "qpic/dispersion.hpp"

namespace qpic {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix<cplx, 2, 2>;
using Mat4 = Eigen::Matrix<cplx, 4, 4>;
using Vec4 = Eigen::Matrix<cplx, 4, 1>;

/// Position of a mode in the global basis (1H, 1V, 2H, 2V).
constexpr int mode_index(int channel, Polarisation pol) {
  return 2 * (channel - 1) + (pol == Polarisation::V ? 1 : 0);
}

struct PbsParams {
  double alpha = kPi / 2;
  double beta = kPi / 2;
};

struct BsParams {
  double theta = kPi / 4;
  double xi = kPi / 4;
};

struct PmParams {
  double phi_h = 0.0;
  double phi_v = 0.0;
  int channel = 1;
};

/// Periodically poled TE/TM converter. With `ideal` set the mismatch is
/// forced to zero and the conversion angle is `phi` instead of κ L_PC.
struct PcParams {
  double period = 21.4;   ///< Λ_PC, μm
  double length = 7620;   ///< L_PC, μm
  double kappa = kPi / (2 * 7620);
  int channel = 1;
  bool ideal = false;
  double phi = kPi / 2;
};

struct FpParams {
  double l1 = 0.0;
  double l2 = 0.0;
};

/// Coupling and detuning of one polarisation in a two-section coupler.
struct EobsBranch {
  double kappa_c = kPi / 16000;  ///< rad/μm
  double delta_beta_1 = 0.0;     ///< rad/μm, first half
  double delta_beta_2 = 0.0;     ///< rad/μm, second half
};

/// Directional coupler with Δβ-reversal electrodes.
struct EobsParams {
  double half_length = 4000.0;  ///< μm
  EobsBranch h;
  EobsBranch v;
};

using ElementParams =
    std::variant<PbsParams, BsParams, PmParams, PcParams, FpParams, EobsParams>;

std::string kind_name(const ElementParams& p);

/// A circuit element evaluated per angular frequency.
class ElementMatrix {
 public:
  ElementMatrix(ElementParams params, std::shared_ptr<const MaterialModel> model);

  Mat4 evaluate(double omega) const;
  std::string label() const;
  const ElementParams& params() const { return params_; }

 private:
  ElementParams params_;
  std::shared_ptr<const MaterialModel> model_;
};

Mat4 pbs_matrix(double alpha, double beta);
Mat4 bs_matrix(double theta, double xi);
Mat4 pm_matrix(double phi_h, double phi_v, int channel = 1);
Mat4 pc_matrix(const MaterialModel& model, const PcParams& p, double omega);
Mat4 fp_matrix(const MaterialModel& model, double l1, double l2, double omega);
Mat4 eo_bs_matrix(const EobsParams& p);

/// Frequency-independent diagonal of an FP section split into its
/// per-length wave numbers: entry m is ω n_m(ω) / c.
Eigen::Vector4d fp_wavenumbers(const MaterialModel& model, double omega);

/// 2x2 field transfer of one coupled-mode section of length z, symmetric
/// form exp(-i z [[Δβ/2, κ], [κ, -Δβ/2]]).
Mat2 coupler_section(double kappa, double delta_beta, double z);

/// Evaluates a parameter set at ω (model needed for PC and FP only).
Mat4 element_matrix(const ElementParams& p, const MaterialModel& model,
                    double omega);

/// Validates parameter ranges. Returns a non-empty note for values outside
/// the nominal splitter range, which are allowed.
std::string validate_params(const ElementParams& p);

/// Basis permutation exchanging channels 1 and 2.
Mat4 channel_swap();

double max_unitarity_defect(const Mat4& u);

/// Voltage calibration layers.
struct VoltageCalibration {
  double pm_u_pi = 5.0;                           ///< V, π shift on V
  double pc_kappa_per_volt = kPi / (2 * 7600 * 20.0);  ///< rad/(μm V)
  double pc_offset = 5.5;                         ///< V, internal field
  double eobs_gain = 3.5e-5;                      ///< rad/(μm V)
};

/// Φ_V = π U / U_π, Φ_H = Φ_V / 3.
PmParams pm_from_voltage(double u, const VoltageCalibration& cal = {});

/// κ = κ_V (U - U0).
double pc_kappa_from_voltage(double u, const VoltageCalibration& cal = {});

double eobs_delta_beta(double u, const VoltageCalibration& cal = {});

}  // namespace qpic
