#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "qpic/dispersion.hpp"

namespace qpic {

/// Gaussian pump pulse on a monochromatic carrier.
struct PumpSpec {
  double wavelength = 0.7644;  ///< λ_p, μm
  double tau = 1000.0;         ///< pulse duration, ps

  double omega() const { return wavelength_to_omega(wavelength); }
  double bandwidth() const { return 1.0 / tau; }  ///< Ω, rad/ps
  void validate() const;
};

/// Discretisation of the two-photon amplitude. The grid is rectangular in
/// the sum detuning σ = ω_s + ω_i - ω_p and the difference δ = ω_s - ω_i,
/// centred on ω_p/2 and mirror symmetric in δ.
struct GridSpec {
  std::size_t points = 512;            ///< samples per axis
  std::optional<double> sum_span;      ///< half-width in σ, rad/ps
  std::optional<double> diff_span;     ///< half-width in δ, rad/ps
  bool check_support = true;
};

class JointSpectralAmplitude {
 public:
  std::size_t size() const { return n_; }
  double centre() const { return omega0_; }  ///< ω_p / 2
  double sigma(std::size_t i) const { return sigma_[i]; }
  double delta(std::size_t j) const { return delta_[j]; }
  const std::vector<double>& sigma_axis() const { return sigma_; }
  const std::vector<double>& delta_axis() const { return delta_; }

  double omega_s(std::size_t i, std::size_t j) const {
    return omega0_ + 0.5 * (sigma_[i] + delta_[j]);
  }
  double omega_i(std::size_t i, std::size_t j) const {
    return omega0_ + 0.5 * (sigma_[i] - delta_[j]);
  }
  /// Index of the point with ω_s and ω_i exchanged.
  std::size_t mirror(std::size_t j) const { return n_ - 1 - j; }

  /// F[i, j] at (σ_i, δ_j).
  const Eigen::MatrixXcd& amplitude() const { return f_; }
  /// Quadrature weight dω_s dω_i of sample (i, j), Jacobian included.
  double weight(std::size_t i, std::size_t j) const {
    return jacobian_ * ws_[i] * wd_[j];
  }
  double normalisation() const { return c_; }

  const PumpSpec& pump() const { return pump_; }
  const PhaseMatchSpec& phase_match() const { return spec_; }
  const MaterialModel& material() const { return model_; }
  /// Difference detuning at which the σ = 0 line is phase-matched.
  double phase_matched_offset() const { return delta0_; }

  /// ∫∫ |F|^2 on the grid.
  double norm_squared() const;

  /// Replaces F by (F + F_exchanged) / 2 and renormalises.
  void symmetrise();

  /// Builds a JSA from explicit axes and amplitude, then normalises.
  /// Axes must be equally spaced; delta must be symmetric about 0.
  static JointSpectralAmplitude from_samples(double omega0,
                                             std::vector<double> sigma,
                                             std::vector<double> delta,
                                             Eigen::MatrixXcd amplitude);

 private:
  friend JointSpectralAmplitude build_jsa(const MaterialModel&, const PumpSpec&,
                                          const PhaseMatchSpec&, const GridSpec&);
  void normalise();

  std::size_t n_ = 0;
  double omega0_ = 0.0;
  std::vector<double> sigma_, delta_;
  std::vector<double> ws_, wd_;
  double jacobian_ = 0.5;
  Eigen::MatrixXcd f_;
  double c_ = 1.0;
  double delta0_ = 0.0;
  PumpSpec pump_;
  PhaseMatchSpec spec_;
  MaterialModel model_;
};

/// Grid half-widths chosen when GridSpec leaves them unset.
struct GridSpans {
  double sum_span;
  double diff_span;
  double delta0;
};
GridSpans default_spans(const MaterialModel& model, const PumpSpec& pump,
                        const PhaseMatchSpec& spec);

/// F = C exp(-σ^2 / 2Ω^2) sinc(Δk L/2) exp(iΔk L/2), normalised to unit
/// norm. Uses model.temperature.
JointSpectralAmplitude build_jsa(const MaterialModel& model,
                                 const PumpSpec& pump,
                                 const PhaseMatchSpec& spec,
                                 const GridSpec& grid = {});

enum class ExchangeReference {
  Literal,           ///< compare F with F^T as is
  DelayCompensated,  ///< allow a relative signal/idler delay first
};

/// ||F - F^T|| / ||F|| with the transpose exchanging ω_s and ω_i. The
/// delay-compensated form minimises over G = F exp(-i δ t / 2), i.e. over a
/// relative delay t between the photons, which the interferometer arm
/// difference removes anyway.
double jsa_exchange_asymmetry(const JointSpectralAmplitude& jsa,
                              ExchangeReference ref = ExchangeReference::DelayCompensated);

/// Relative delay t (ps) minimising the compensated asymmetry.
double jsa_exchange_delay(const JointSpectralAmplitude& jsa);

struct MarginalRow {
  double omega;        ///< bin centre, rad/ps
  double wavelength;   ///< μm
  double density;      ///< ∫ |F|^2 over the partner photon, per rad/ps
  double normalised;   ///< density / max density
};

struct Marginals {
  std::vector<MarginalRow> signal;
  std::vector<MarginalRow> idler;
};

/// Single-photon spectra, histogrammed on `bins` equal ω bins.
Marginals marginal_spectra(const JointSpectralAmplitude& jsa,
                           std::size_t bins = 256);

/// ω of the maximum of a marginal.
double marginal_peak(const std::vector<MarginalRow>& rows);

}  // namespace qpic
