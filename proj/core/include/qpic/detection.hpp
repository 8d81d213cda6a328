#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "qpic/circuit.hpp"
#include "qpic/numeric.hpp"
#include "qpic/source.hpp"

namespace qpic {

/// Detector b watches channel 1, detector c channel 2.
struct CoincidenceQuery {
  Polarisation b = Polarisation::V;
  Polarisation c = Polarisation::V;
};

/// Routing coefficients cached on the signal frequencies of a JSA grid.
/// The idler frequency of sample (i, j) is the signal frequency of sample
/// (i, mirror(j)), so one table serves both photons.
class RoutingTable {
 public:
  RoutingTable(const JointSpectralAmplitude& jsa, const CircuitSpec& spec);

  std::size_t size() const { return n_; }
  const RoutingCoefficients& at(std::size_t i, std::size_t j) const {
    return data_[j * n_ + i];
  }

 private:
  std::size_t n_;
  std::vector<RoutingCoefficients> data_;
};

/// P = ∫∫ |F(b,c) A_1λ(b) B_2λ'(c) + F(c,b) B_1λ(b) A_2λ'(c)|^2 db dc on the
/// trapezoid rule of the JSA grid.
double coincidence(const JointSpectralAmplitude& jsa, const RoutingTable& table,
                   const CoincidenceQuery& q);
double coincidence(const JointSpectralAmplitude& jsa, const CircuitSpec& spec,
                   const CoincidenceQuery& q);

/// Sum over (H,H), (H,V), (V,H), (V,V), in that order.
double coincidence_insensitive(const JointSpectralAmplitude& jsa,
                               const RoutingTable& table);
double coincidence_insensitive(const JointSpectralAmplitude& jsa,
                               const CircuitSpec& spec);

struct ScanSample {
  double value;
  double probability;
};

struct ScanResult {
  std::string parameter;
  std::string unit;
  std::vector<ScanSample> samples;
  double asymptote = 0.0;  ///< P(∞): mean of the outer 10% of samples
  double minimum = 0.0;
  double maximum = 0.0;
  double visibility = 0.0;    ///< (P(∞) - P_min) / P(∞)
  double dip_position = 0.0;  ///< parameter at the minimum
  double peak_position = 0.0; ///< parameter at the maximum
  std::optional<WidthInfo> dip_width;
  bool boundary_minimum = false;  ///< minimum on the first or last sample
};

/// Derives the summary fields from samples.
ScanResult summarise_scan(std::string parameter, std::string unit,
                          std::vector<ScanSample> samples);

struct HomScanSpec {
  double start = -1500.0;  ///< Δl, μm
  double stop = 1500.0;
  std::size_t points = 61;
  CoincidenceQuery query;
  bool insensitive = false;
  /// Scanned free-propagation element. Default: the element named "fp2",
  /// else the second fp element.
  std::optional<std::size_t> element;
  std::optional<std::string> element_name;
};

/// Coincidence versus Δl, with the scanned element's lower-channel length set
/// to l2 = l1 + Δl. Only that element is re-evaluated per sample.
ScanResult hom_scan(const JointSpectralAmplitude& jsa, const CircuitSpec& spec,
                    const HomScanSpec& scan);

/// Index of the element a HOM scan would vary.
std::size_t scan_target(const CircuitSpec& spec, const HomScanSpec& scan);

/// Δl that equalises the H and V group delays from the centre of the PDC
/// section to the converter: (L_PDC/2 + y + l)(n_gH - n_gV) / n_gV.
double compensating_delay(const MaterialModel& model, double omega,
                          double pdc_length, double y, double l);

enum class ImperfectElement { BS, PBS, PBSOnePol, PC };

ImperfectElement parse_imperfect_element(const std::string& name);
std::string to_string(ImperfectElement e);

/// Copy of `base` with every PBS, BS and PC ideal (PC phase matched with
/// φ = π/2), then the selected kind degraded by fraction f of its angle
/// range: BS θ = ξ = π/4 (1-f); PBS α = β = π/2 (1-f); PBS-one-pol α only;
/// PC φ = π/2 (1-f).
CircuitSpec with_imperfection(const CircuitSpec& base, ImperfectElement which,
                              double fraction);

struct SweepRow {
  double fraction;
  ScanResult scan;
};

std::vector<SweepRow> imperfection_sweep(const JointSpectralAmplitude& jsa,
                                         const CircuitSpec& base,
                                         ImperfectElement which,
                                         const std::vector<double>& fractions,
                                         const HomScanSpec& scan);

struct TemperatureRow {
  double temperature;
  ScanResult scan;
  double signal_peak_wavelength;  ///< μm
  double idler_peak_wavelength;   ///< μm
  /// Wavelength of the first converter's phase matching, NaN if none in band.
  double pc_wavelength;
  Marginals marginals;
};

/// Rebuilds the JSA and every element at each temperature and runs a HOM
/// scan. Source parameters come from spec.source.
std::vector<TemperatureRow> temperature_scan(const CircuitSpec& spec,
                                             const std::vector<double>& temperatures,
                                             const HomScanSpec& scan,
                                             const GridSpec& grid = {});

}  // namespace qpic
