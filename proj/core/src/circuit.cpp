#include "qpic/circuit.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "kv_text.hpp"
#include "qpic/error.hpp"

namespace qpic {
namespace {

using detail::KvLine;

struct Block {
  std::string kind;  // section name or element kind
  bool element = false;
  std::size_t line = 0;
  std::size_t column = 0;
  std::vector<KvLine> entries;
};

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"material", {"file", "temperature"}},
      {"source", {"lambda_p", "tau", "period", "length"}},
      {"pbs", {"name", "alpha", "beta"}},
      {"bs", {"name", "theta", "xi"}},
      {"pm", {"name", "phi_h", "phi_v", "voltage", "u_pi", "channel"}},
      {"pc",
       {"name", "period", "length", "kappa", "voltage", "kappa_per_volt",
        "offset", "channel", "ideal", "phi"}},
      {"fp", {"name", "l1", "l2"}},
      {"eobs",
       {"name", "half_length", "kappa_c", "delta_beta_1", "delta_beta_2",
        "u1", "u2", "gain", "kappa_c_v", "delta_beta_1_v", "delta_beta_2_v"}},
  };
  return keys;
}

class BlockReader {
 public:
  BlockReader(const Block& b, const std::string& source) : block_(b), source_(source) {
    for (const KvLine& e : b.entries) by_key_.emplace(e.name, &e);
  }

  bool has(const std::string& key) const { return by_key_.count(key) != 0; }

  double number(const std::string& key, double fallback) const {
    const auto it = by_key_.find(key);
    return it == by_key_.end() ? fallback : detail::parse_number(*it->second, source_);
  }

  std::optional<double> maybe(const std::string& key) const {
    const auto it = by_key_.find(key);
    if (it == by_key_.end()) return std::nullopt;
    return detail::parse_number(*it->second, source_);
  }

  double required(const std::string& key) const {
    const auto v = maybe(key);
    if (!v) semantic(key, "missing required parameter");
    return *v;
  }

  bool flag(const std::string& key, bool fallback) const {
    const auto it = by_key_.find(key);
    return it == by_key_.end() ? fallback : detail::parse_bool(*it->second, source_);
  }

  std::string text(const std::string& key) const {
    const auto it = by_key_.find(key);
    return it == by_key_.end() ? std::string() : it->second->value;
  }

  int channel() const {
    const double c = number("channel", 1.0);
    if (c != 1.0 && c != 2.0) semantic("channel", "must be 1 or 2");
    return static_cast<int>(c);
  }

  [[noreturn]] void semantic(const std::string& key, const std::string& msg) const {
    const auto it = by_key_.find(key);
    const std::size_t line = it == by_key_.end() ? block_.line : it->second->line;
    const std::size_t col = it == by_key_.end() ? block_.column : it->second->column;
    std::string where = (block_.element ? "element " : "section ") + block_.kind +
                        " (line " + std::to_string(block_.line) + ")";
    if (!key.empty()) where += ", parameter '" + key + "'";
    throw ParseError(source_, line, col, where + ": " + msg);
  }

  void exclusive(const std::string& a, const std::string& b) const {
    if (has(a) && has(b)) semantic(b, "cannot be combined with '" + a + "'");
  }

 private:
  const Block& block_;
  const std::string& source_;
  std::map<std::string, const KvLine*> by_key_;
};

ElementParams read_element(const BlockReader& r, const std::string& kind,
                           std::string* warning) {
  ElementParams params;
  if (kind == "pbs") {
    params = PbsParams{r.number("alpha", kPi / 2), r.number("beta", kPi / 2)};
  } else if (kind == "bs") {
    params = BsParams{r.number("theta", kPi / 4), r.number("xi", kPi / 4)};
  } else if (kind == "pm") {
    r.exclusive("voltage", "phi_h");
    r.exclusive("voltage", "phi_v");
    PmParams p;
    if (r.has("voltage")) {
      VoltageCalibration cal;
      cal.pm_u_pi = r.number("u_pi", cal.pm_u_pi);
      if (!(cal.pm_u_pi > 0.0)) r.semantic("u_pi", "must be > 0");
      p = pm_from_voltage(r.required("voltage"), cal);
    } else {
      if (r.has("u_pi")) r.semantic("u_pi", "only meaningful with 'voltage'");
      p.phi_h = r.number("phi_h", 0.0);
      p.phi_v = r.number("phi_v", 0.0);
    }
    p.channel = r.channel();
    params = p;
  } else if (kind == "pc") {
    r.exclusive("kappa", "voltage");
    PcParams p;
    p.ideal = r.flag("ideal", false);
    p.length = r.number("length", p.length);
    if (!(p.length > 0.0)) r.semantic("length", "must be > 0");
    if (p.ideal) {
      for (const char* k : {"period", "kappa", "voltage"}) {
        if (r.has(k)) r.semantic(k, "not used by an ideal converter");
      }
      p.phi = r.number("phi", kPi / 2);
    } else {
      if (r.has("phi")) r.semantic("phi", "only meaningful with 'ideal = true'");
      p.period = r.required("period");
      if (r.has("voltage")) {
        VoltageCalibration cal;
        cal.pc_kappa_per_volt = r.number("kappa_per_volt", cal.pc_kappa_per_volt);
        cal.pc_offset = r.number("offset", cal.pc_offset);
        p.kappa = std::abs(pc_kappa_from_voltage(r.required("voltage"), cal));
      } else {
        if (r.has("kappa_per_volt") || r.has("offset")) {
          r.semantic(r.has("offset") ? "offset" : "kappa_per_volt",
                     "only meaningful with 'voltage'");
        }
        p.kappa = r.number("kappa", kPi / (2.0 * p.length));
      }
    }
    p.channel = r.channel();
    params = p;
  } else if (kind == "fp") {
    params = FpParams{r.required("l1"), r.required("l2")};
  } else if (kind == "eobs") {
    EobsParams p;
    p.half_length = r.number("half_length", p.half_length);
    r.exclusive("delta_beta_1", "u1");
    r.exclusive("delta_beta_2", "u2");
    VoltageCalibration cal;
    cal.eobs_gain = r.number("gain", cal.eobs_gain);
    if (r.has("gain") && !r.has("u1") && !r.has("u2")) {
      r.semantic("gain", "only meaningful with 'u1' or 'u2'");
    }
    p.h.kappa_c = r.number("kappa_c", p.h.kappa_c);
    p.h.delta_beta_1 = r.has("u1") ? eobs_delta_beta(r.required("u1"), cal)
                                   : r.number("delta_beta_1", 0.0);
    p.h.delta_beta_2 = r.has("u2") ? eobs_delta_beta(r.required("u2"), cal)
                                   : r.number("delta_beta_2", 0.0);
    p.v.kappa_c = r.number("kappa_c_v", p.h.kappa_c);
    p.v.delta_beta_1 = r.number("delta_beta_1_v", p.h.delta_beta_1);
    p.v.delta_beta_2 = r.number("delta_beta_2_v", p.h.delta_beta_2);
    params = p;
  }
  try {
    *warning = validate_params(params);
  } catch (const ValidationError& e) {
    r.semantic("", e.what());
  }
  return params;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

std::size_t CircuitSpec::find(std::string_view name) const {
  for (std::size_t i = 0; i < elements.size(); ++i) {
    if (elements[i].name == name) return i;
  }
  throw ValidationError("no element named '" + std::string(name) + "'");
}

std::vector<std::size_t> CircuitSpec::indices_of(std::string_view kind) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < elements.size(); ++i) {
    if (kind_name(elements[i].params) == kind) out.push_back(i);
  }
  return out;
}

CircuitSpec CircuitSpec::at_temperature(double temperature_c) const {
  CircuitSpec copy = *this;
  copy.material.temperature = temperature_c;
  copy.material.validate();
  return copy;
}

CircuitSpec parse_netlist(std::string_view text, const std::string& source_name,
                          const std::filesystem::path& base_dir) {
  std::vector<Block> blocks;
  for (const KvLine& line : detail::lex_kv(text, source_name)) {
    if (line.kind == KvLine::Kind::Assignment) {
      if (blocks.empty()) {
        throw ParseError(source_name, line.line, line.column,
                         "parameter '" + line.name + "' outside any section or element");
      }
      Block& b = blocks.back();
      for (const KvLine& prev : b.entries) {
        if (prev.name == line.name) {
          throw ParseError(source_name, line.line, line.column,
                           "duplicate parameter '" + line.name + "' (first set on line " +
                               std::to_string(prev.line) + ")");
        }
      }
      const auto& keys = allowed_keys().at(b.kind);
      if (!keys.count(line.name)) {
        throw ParseError(source_name, line.line, line.column,
                         "unknown parameter '" + line.name + "' for " +
                             (b.element ? "element " : "section ") + b.kind);
      }
      b.entries.push_back(line);
      continue;
    }
    const bool element = line.kind == KvLine::Kind::Element;
    if (!allowed_keys().count(line.name) ||
        element == (line.name == "material" || line.name == "source")) {
      throw ParseError(source_name, line.line, line.column,
                       std::string(element ? "unknown element kind '" : "unknown section '") +
                           line.name + "'");
    }
    if (!element) {
      for (const Block& b : blocks) {
        if (!b.element && b.kind == line.name) {
          throw ParseError(source_name, line.line, line.column,
                           "duplicate section [" + line.name + "]");
        }
      }
    }
    blocks.push_back({line.name, element, line.line, line.column, {}});
  }

  CircuitSpec spec;
  std::set<std::string> names;
  for (const Block& b : blocks) {
    BlockReader r(b, source_name);
    if (!b.element && b.kind == "material") {
      if (r.has("file")) {
        spec.material_file = r.text("file");
        std::filesystem::path p(spec.material_file);
        if (p.is_relative()) p = base_dir / p;
        spec.material = load_material(p);
      }
      spec.material.temperature = r.number("temperature", spec.material.temperature);
      try {
        spec.material.validate();
      } catch (const ValidationError& e) {
        r.semantic("temperature", e.what());
      }
    } else if (!b.element && b.kind == "source") {
      auto& s = spec.source;
      s.pump.wavelength = r.number("lambda_p", s.pump.wavelength);
      s.pump.tau = r.number("tau", s.pump.tau);
      s.phase_match.poling_period = r.number("period", s.phase_match.poling_period);
      s.phase_match.pdc_length = r.number("length", s.phase_match.pdc_length);
      s.phase_match.pump_wavelength = s.pump.wavelength;
      if (!(s.pump.tau > 0.0)) r.semantic("tau", "must be > 0");
      if (!(s.phase_match.poling_period > 0.0)) r.semantic("period", "must be > 0");
      if (!(s.phase_match.pdc_length > 0.0)) r.semantic("length", "must be > 0");
      if (!(s.pump.wavelength >= 0.6 && s.pump.wavelength <= 0.9)) {
        r.semantic("lambda_p", "must lie in [0.6, 0.9] um");
      }
    } else {
      CircuitElement e;
      e.name = r.text("name");
      e.line = b.line;
      if (!e.name.empty() && !names.insert(e.name).second) {
        r.semantic("name", "duplicate element name '" + e.name + "'");
      }
      std::string warning;
      e.params = read_element(r, b.kind, &warning);
      if (!warning.empty()) {
        spec.warnings.push_back(source_name + ":" + std::to_string(b.line) + ": " + warning);
      }
      spec.elements.push_back(std::move(e));
    }
  }
  return spec;
}

CircuitSpec load_netlist(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open netlist " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_netlist(buf.str(), path.string(), path.parent_path());
}

std::string to_netlist(const CircuitSpec& spec) {
  std::ostringstream os;
  os << "[material]\n";
  if (!spec.material_file.empty()) os << "file = " << spec.material_file << "\n";
  os << "temperature = " << fmt(spec.material.temperature) << "\n\n";
  os << "[source]\n"
     << "lambda_p = " << fmt(spec.source.pump.wavelength) << "\n"
     << "tau = " << fmt(spec.source.pump.tau) << "\n"
     << "period = " << fmt(spec.source.phase_match.poling_period) << "\n"
     << "length = " << fmt(spec.source.phase_match.pdc_length) << "\n";
  for (const CircuitElement& e : spec.elements) {
    os << "\nelement " << kind_name(e.params) << "\n";
    if (!e.name.empty()) os << "name = " << e.name << "\n";
    std::visit(
        [&](const auto& p) {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, PbsParams>) {
            os << "alpha = " << fmt(p.alpha) << "\nbeta = " << fmt(p.beta) << "\n";
          } else if constexpr (std::is_same_v<T, BsParams>) {
            os << "theta = " << fmt(p.theta) << "\nxi = " << fmt(p.xi) << "\n";
          } else if constexpr (std::is_same_v<T, PmParams>) {
            os << "phi_h = " << fmt(p.phi_h) << "\nphi_v = " << fmt(p.phi_v)
               << "\nchannel = " << p.channel << "\n";
          } else if constexpr (std::is_same_v<T, PcParams>) {
            os << "length = " << fmt(p.length) << "\n";
            if (p.ideal) {
              os << "ideal = true\nphi = " << fmt(p.phi) << "\n";
            } else {
              os << "period = " << fmt(p.period) << "\nkappa = " << fmt(p.kappa) << "\n";
            }
            os << "channel = " << p.channel << "\n";
          } else if constexpr (std::is_same_v<T, FpParams>) {
            os << "l1 = " << fmt(p.l1) << "\nl2 = " << fmt(p.l2) << "\n";
          } else {
            os << "half_length = " << fmt(p.half_length) << "\nkappa_c = " << fmt(p.h.kappa_c)
               << "\ndelta_beta_1 = " << fmt(p.h.delta_beta_1)
               << "\ndelta_beta_2 = " << fmt(p.h.delta_beta_2)
               << "\nkappa_c_v = " << fmt(p.v.kappa_c)
               << "\ndelta_beta_1_v = " << fmt(p.v.delta_beta_1)
               << "\ndelta_beta_2_v = " << fmt(p.v.delta_beta_2) << "\n";
          }
        },
        e.params);
  }
  return os.str();
}

Mat4 compose(const CircuitSpec& spec, double omega) {
  Mat4 u = Mat4::Identity();
  for (const CircuitElement& e : spec.elements) {
    u = element_matrix(e.params, spec.material, omega) * u;
  }
  return u;
}

RoutingCoefficients routing_from_matrix(const Mat4& u) {
  RoutingCoefficients r;
  r.a = u.col(0).conjugate();
  r.b = u.col(1).conjugate();
  return r;
}

RoutingCoefficients routing_coefficients(const CircuitSpec& spec, double omega) {
  return routing_from_matrix(compose(spec, omega));
}

CircuitSpec reference_chip(const ChipParameters& p) {
  CircuitSpec spec;
  spec.material = default_material().at_temperature(p.temperature);
  spec.material.validate();

  double lambda_p = 0.0;
  if (p.pump_wavelength) {
    lambda_p = *p.pump_wavelength;
  } else {
    lambda_p = 0.5 * degenerate_wavelength(spec.material, p.poling_period,
                                           p.temperature).wavelength;
  }
  spec.source.pump.wavelength = lambda_p;
  spec.source.pump.tau = p.tau;
  spec.source.phase_match.poling_period = p.poling_period;
  spec.source.phase_match.pdc_length = p.pdc_length;
  spec.source.phase_match.pump_wavelength = lambda_p;

  PcParams pc;
  pc.length = p.pc_length;
  pc.period = p.pc_period.value_or(
      pc_matched_period(spec.material, 2.0 * lambda_p, p.temperature));
  pc.kappa = p.pc_kappa.value_or(kPi / (2.0 * p.pc_length));

  spec.elements = {
      {"fp1", FpParams{p.y, p.y}, 0},
      {"pbs", PbsParams{}, 0},
      {"fp2", FpParams{p.l, p.l + p.delta_l}, 0},
      {"pc", pc, 0},
      {"fp3", FpParams{p.z, p.z}, 0},
      {"bs", BsParams{}, 0},
  };
  for (const auto& e : spec.elements) validate_params(e.params);
  return spec;
}

}  // namespace qpic
