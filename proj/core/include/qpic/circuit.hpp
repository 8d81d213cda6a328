#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qpic/elements.hpp"
#include "qpic/source.hpp"

namespace qpic {

struct CircuitElement {
  std::string name;  ///< optional user label
  ElementParams params;
  std::size_t line = 0;  ///< netlist line of the `element` header
};

/// Pump and poling parameters of the on-chip PDC section.
struct SourceSection {
  PumpSpec pump;
  PhaseMatchSpec phase_match;
};

/// Ordered element list. The first element acts first; photons are
/// injected in channel 1 with the signal H and the idler V.
struct CircuitSpec {
  MaterialModel material = default_material();
  std::string material_file;  ///< empty for the bundled set
  SourceSection source;
  std::vector<CircuitElement> elements;
  std::vector<std::string> warnings;

  /// Index of the element named `name`; throws ValidationError if absent.
  std::size_t find(std::string_view name) const;
  /// Indices of all elements of a kind ("fp", "pc", ...), in order.
  std::vector<std::size_t> indices_of(std::string_view kind) const;
  /// Same circuit at another temperature.
  CircuitSpec at_temperature(double temperature_c) const;
};

/// Parses the netlist format documented in docs/netlist-format.md.
/// Material files are resolved relative to `base_dir`.
CircuitSpec parse_netlist(std::string_view text,
                          const std::string& source_name = "<netlist>",
                          const std::filesystem::path& base_dir = {});
CircuitSpec load_netlist(const std::filesystem::path& path);

/// Serialises a circuit back to netlist text.
std::string to_netlist(const CircuitSpec& spec);

/// U_total(ω) = E_n ... E_2 E_1.
Mat4 compose(const CircuitSpec& spec, double omega);

/// Rows of U_total^† for the two injected modes: a(m) multiplies the output
/// creation operator of mode m for the signal (1H), b(m) for the idler (1V).
struct RoutingCoefficients {
  Vec4 a = Vec4::Zero();
  Vec4 b = Vec4::Zero();

  cplx A(int channel, Polarisation pol) const { return a[mode_index(channel, pol)]; }
  cplx B(int channel, Polarisation pol) const { return b[mode_index(channel, pol)]; }
};

RoutingCoefficients routing_coefficients(const CircuitSpec& spec, double omega);
RoutingCoefficients routing_from_matrix(const Mat4& u_total);

/// Parameters of the interferometer chip: PDC, FP1, PBS, FP2, PC, FP3, BS.
struct ChipParameters {
  double temperature = 24.5;
  double poling_period = 9.0;
  double pdc_length = 20700.0;
  double tau = 1000.0;
  std::optional<double> pump_wavelength;  ///< default: degenerate at T
  double y = 5000.0;
  double l = 15000.0;
  double delta_l = 0.0;
  double z = 10000.0;
  double pc_length = 2540.0;
  std::optional<double> pc_period;  ///< default: matched at 2 λ_p
  std::optional<double> pc_kappa;   ///< default: π / (2 L_PC)
};

/// Builds the reference chip on the bundled material set.
CircuitSpec reference_chip(const ChipParameters& p = {});

}  // namespace qpic
