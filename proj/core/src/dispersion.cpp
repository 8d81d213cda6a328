#include "qpic/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "kv_text.hpp"
#include "qpic/error.hpp"
#include "qpic/numeric.hpp"

namespace qpic {
namespace {

constexpr double kKelvinOffset = 273.16;
constexpr double kIncrementReference = 1.55;  // μm

std::string fmt_value(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

void check_range(const MaterialModel& m, double lambda_um, double temperature_c) {
  const auto& r = m.validity;
  if (!(lambda_um >= r.wavelength_min && lambda_um <= r.wavelength_max)) {
    throw RangeError("wavelength " + fmt_value(lambda_um) +
                     " um outside Sellmeier validity range [" +
                     fmt_value(r.wavelength_min) + ", " +
                     fmt_value(r.wavelength_max) + "] um");
  }
  if (!(temperature_c >= r.temperature_min && temperature_c <= r.temperature_max)) {
    throw RangeError("temperature " + fmt_value(temperature_c) +
                     " C outside Sellmeier validity range [" +
                     fmt_value(r.temperature_min) + ", " +
                     fmt_value(r.temperature_max) + "] C");
  }
}

double temperature_term(const MaterialModel& m, double temperature_c) {
  const double t0 = m.reference_temperature;
  return (temperature_c - t0) * (temperature_c + t0 + 2.0 * kKelvinOffset);
}

}  // namespace

double SellmeierCoefficients::index_squared(double lambda_um, double f) const {
  const double l2 = lambda_um * lambda_um;
  const double pole1 = a[2] + b[2] * f;
  return a[0] + b[0] * f + (a[1] + b[1] * f) / (l2 - pole1 * pole1) +
         (a[3] + b[3] * f) / (l2 - a[4] * a[4]) - a[5] * l2;
}

MaterialModel MaterialModel::at_temperature(double temperature_c) const {
  MaterialModel copy = *this;
  copy.temperature = temperature_c;
  return copy;
}

void MaterialModel::validate() const {
  auto in_band = [](double v) { return v >= 0.0 && v <= 0.05; };
  if (!in_band(delta_n_h) || !in_band(delta_n_v)) {
    throw ValidationError("waveguide index increments must lie in [0, 0.05]");
  }
  if (!(temperature >= validity.temperature_min &&
        temperature <= validity.temperature_max)) {
    throw RangeError("temperature " + fmt_value(temperature) +
                     " C outside Sellmeier validity range");
  }
}

MaterialModel default_material() {
  MaterialModel m;
  m.name = "LiNbO3 congruent (Edwards-Lawrence ordinary, Jundt extraordinary)";
  m.ordinary.a = {4.9048, 0.11775, 0.21802, 0.0, 0.0, 0.027153};
  m.ordinary.b = {2.1429e-8, 2.2314e-8, -2.9671e-8, 0.0};
  m.extraordinary.a = {5.35583, 0.100473, 0.20692, 100.0, 11.34927, 1.5334e-2};
  m.extraordinary.b = {4.629e-7, 3.862e-8, -0.89e-8, 2.657e-5};
  m.reference_temperature = 24.5;
  m.delta_n_h = 0.01;
  m.delta_n_v = 0.01;
  m.temperature = 24.5;
  return m;
}

MaterialModel parse_material(std::string_view text, const std::string& source) {
  using detail::KvLine;
  MaterialModel m;
  m.ordinary = {};
  m.extraordinary = {};
  std::string section;
  std::set<std::string> seen;
  bool have_format = false;

  auto set_coefficients = [&](SellmeierCoefficients& c, const KvLine& line) {
    const auto values = detail::parse_number_list(line, source);
    if (line.name == "a") {
      if (values.size() != c.a.size()) {
        throw ParseError(source, line.line, line.value_column,
                         "coefficient array 'a' needs 6 entries");
      }
      std::copy(values.begin(), values.end(), c.a.begin());
    } else if (line.name == "b") {
      if (values.size() != c.b.size()) {
        throw ParseError(source, line.line, line.value_column,
                         "coefficient array 'b' needs 4 entries");
      }
      std::copy(values.begin(), values.end(), c.b.begin());
    } else {
      throw ParseError(source, line.line, line.column,
                       "unknown key '" + line.name + "' in [" + section + "]");
    }
  };

  for (const KvLine& line : detail::lex_kv(text, source)) {
    if (line.kind == KvLine::Kind::Section) {
      section = line.name;
      if (section != "ordinary" && section != "extraordinary" &&
          section != "waveguide" && section != "validity") {
        throw ParseError(source, line.line, line.column,
                         "unknown section [" + section + "]");
      }
      continue;
    }
    if (line.kind == KvLine::Kind::Element) {
      throw ParseError(source, line.line, line.column,
                       "element headers are not allowed in material files");
    }
    const std::string qualified = section + "." + line.name;
    if (!seen.insert(qualified).second) {
      throw ParseError(source, line.line, line.column,
                       "duplicate key '" + line.name + "'");
    }
    if (section.empty()) {
      if (line.name == "format") {
        if (line.value != "qpic-material-1") {
          throw ParseError(source, line.line, line.value_column,
                           "unsupported material format '" + line.value + "'");
        }
        have_format = true;
      } else if (line.name == "name") {
        m.name = line.value;
      } else if (line.name == "reference_temperature") {
        m.reference_temperature = detail::parse_number(line, source);
      } else if (line.name == "temperature") {
        m.temperature = detail::parse_number(line, source);
      } else {
        throw ParseError(source, line.line, line.column,
                         "unknown key '" + line.name + "'");
      }
    } else if (section == "ordinary") {
      set_coefficients(m.ordinary, line);
    } else if (section == "extraordinary") {
      set_coefficients(m.extraordinary, line);
    } else if (section == "waveguide") {
      const double v = detail::parse_number(line, source);
      if (line.name == "delta_n_h") m.delta_n_h = v;
      else if (line.name == "delta_n_v") m.delta_n_v = v;
      else if (line.name == "delta_n_h_slope") m.delta_n_h_slope = v;
      else if (line.name == "delta_n_v_slope") m.delta_n_v_slope = v;
      else {
        throw ParseError(source, line.line, line.column,
                         "unknown key '" + line.name + "' in [waveguide]");
      }
    } else if (section == "validity") {
      const double v = detail::parse_number(line, source);
      if (line.name == "wavelength_min") m.validity.wavelength_min = v;
      else if (line.name == "wavelength_max") m.validity.wavelength_max = v;
      else if (line.name == "temperature_min") m.validity.temperature_min = v;
      else if (line.name == "temperature_max") m.validity.temperature_max = v;
      else {
        throw ParseError(source, line.line, line.column,
                         "unknown key '" + line.name + "' in [validity]");
      }
    }
  }
  if (!have_format) {
    throw ParseError(source, 1, 1, "missing 'format = qpic-material-1'");
  }
  for (const char* required : {"ordinary.a", "ordinary.b", "extraordinary.a",
                               "extraordinary.b"}) {
    if (!seen.count(required)) {
      throw ValidationError(source + ": missing coefficient array " + required);
    }
  }
  m.validate();
  return m;
}

MaterialModel load_material(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open material file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_material(buf.str(), path.string());
}

double bulk_index(const MaterialModel& model, Polarisation pol,
                  double lambda_um, double temperature_c) {
  check_range(model, lambda_um, temperature_c);
  const auto& c = pol == Polarisation::H ? model.ordinary : model.extraordinary;
  const double n2 = c.index_squared(lambda_um, temperature_term(model, temperature_c));
  if (!(n2 > 1.0)) {
    throw NumericalError("Sellmeier law gives n^2 = " + fmt_value(n2) +
                         " at " + fmt_value(lambda_um) + " um");
  }
  return std::sqrt(n2);
}

double index(const MaterialModel& model, Polarisation pol, double lambda_um,
             double temperature_c) {
  const double bulk = bulk_index(model, pol, lambda_um, temperature_c);
  const double dlambda = lambda_um - kIncrementReference;
  if (pol == Polarisation::H) {
    return bulk + model.delta_n_h + model.delta_n_h_slope * dlambda;
  }
  return bulk + model.delta_n_v + model.delta_n_v_slope * dlambda;
}

double index(const MaterialModel& model, Polarisation pol, double lambda_um) {
  return index(model, pol, lambda_um, model.temperature);
}

double wavevector(const MaterialModel& model, Polarisation pol, double omega) {
  if (!(omega > 0.0) || !std::isfinite(omega)) {
    throw RangeError("angular frequency must be positive and finite");
  }
  return index(model, pol, omega_to_wavelength(omega)) * omega / kSpeedOfLight;
}

double group_velocity(const MaterialModel& model, Polarisation pol,
                      double omega) {
  const double h = 1e-6 * omega;
  const double dk = (wavevector(model, pol, omega + h) -
                     wavevector(model, pol, omega - h)) /
                    (2.0 * h);
  const double vg = 1.0 / dk;
  if (!std::isfinite(vg) || !(vg > 0.0)) {
    throw NumericalError("group velocity is not finite and positive");
  }
  return vg;
}

double group_index(const MaterialModel& model, Polarisation pol, double omega) {
  return kSpeedOfLight / group_velocity(model, pol, omega);
}

void PhaseMatchSpec::validate() const {
  if (!(poling_period > 0.0)) throw ValidationError("poling period must be > 0");
  if (!(pdc_length > 0.0)) throw ValidationError("PDC length must be > 0");
  if (process == Process::TypeIIPdc &&
      !(pump_wavelength >= 0.6 && pump_wavelength <= 0.9)) {
    throw RangeError("pump wavelength " + fmt_value(pump_wavelength) +
                     " um outside [0.6, 0.9] um");
  }
}

double pdc_mismatch(const MaterialModel& model, const PhaseMatchSpec& spec,
                    double omega_s, double omega_i) {
  const double kp = wavevector(model, Polarisation::H, omega_s + omega_i);
  const double ks = wavevector(model, Polarisation::H, omega_s);
  const double ki = wavevector(model, Polarisation::V, omega_i);
  return kp - ks - ki - kTwoPi / spec.poling_period;
}

double pc_mismatch(const MaterialModel& model, double pc_period_um,
                   double lambda_um, double temperature_c) {
  const double nh = index(model, Polarisation::H, lambda_um, temperature_c);
  const double nv = index(model, Polarisation::V, lambda_um, temperature_c);
  return kTwoPi / lambda_um * (nh - nv) - kTwoPi / pc_period_um;
}

double pc_matched_period(const MaterialModel& model, double lambda_um,
                         double temperature_c) {
  const double nh = index(model, Polarisation::H, lambda_um, temperature_c);
  const double nv = index(model, Polarisation::V, lambda_um, temperature_c);
  return lambda_um / (nh - nv);
}

namespace {

constexpr double kSearchMin = 1.4;
constexpr double kSearchMax = 1.7;
constexpr double kPreferred = 1.55;
constexpr std::size_t kScanPoints = 301;

RootResult closest_root(const std::function<double(double)>& f,
                        const char* what) {
  const auto roots = find_roots(f, kSearchMin, kSearchMax, kScanPoints);
  if (roots.empty()) {
    throw NumericalError(std::string("no phase-matching in band: ") + what +
                         " has no root in [1.4, 1.7] um");
  }
  RootResult r;
  r.root_count = roots.size();
  r.wavelength = *std::min_element(roots.begin(), roots.end(), [](double a, double b) {
    return std::abs(a - kPreferred) < std::abs(b - kPreferred);
  });
  r.residual = std::abs(f(r.wavelength));
  if (!(r.residual < kMismatchTolerance)) {
    throw NumericalError(std::string(what) + ": root residual " +
                         fmt_value(r.residual) + " rad/um exceeds tolerance");
  }
  return r;
}

}  // namespace

RootResult degenerate_wavelength(const MaterialModel& model,
                                 double poling_period_um,
                                 double temperature_c) {
  const MaterialModel at_t = model.at_temperature(temperature_c);
  PhaseMatchSpec spec;
  spec.poling_period = poling_period_um;
  auto mismatch = [&](double lambda) {
    const double w = wavelength_to_omega(lambda);
    return pdc_mismatch(at_t, spec, w, w);
  };
  return closest_root(mismatch, "degenerate PDC mismatch");
}

RootResult pc_phase_matched_wavelength(const MaterialModel& model,
                                       double pc_period_um,
                                       double temperature_c) {
  auto mismatch = [&](double lambda) {
    return pc_mismatch(model, pc_period_um, lambda, temperature_c);
  };
  return closest_root(mismatch, "polarisation-conversion mismatch");
}

TuningCurve tuning_curve(const MaterialModel& model, double poling_period_um,
                         double temperature_c, double pump_min_um,
                         double pump_max_um, std::size_t points) {
  if (!(pump_max_um > pump_min_um) || points < 2) {
    throw ValidationError("tuning curve needs a non-degenerate pump range");
  }
  const MaterialModel at_t = model.at_temperature(temperature_c);
  PhaseMatchSpec spec;
  spec.poling_period = poling_period_um;
  // Signal and idler must both stay inside this window.
  const double w_lo = wavelength_to_omega(1.8);
  const double w_hi = wavelength_to_omega(1.3);

  TuningCurve curve;
  for (double lp : linspace(pump_min_um, pump_max_um, points)) {
    const double wp = wavelength_to_omega(lp);
    const double lo = std::max(w_lo, wp - w_hi);
    const double hi = std::min(w_hi, wp - w_lo);
    std::vector<double> roots;
    if (hi > lo) {
      auto f = [&](double ws) { return pdc_mismatch(at_t, spec, ws, wp - ws); };
      roots = find_roots(f, lo, hi, 401);
    }
    if (roots.empty()) {
      curve.unmatched_pump_wavelengths.push_back(lp);
      continue;
    }
    const double ws = *std::min_element(roots.begin(), roots.end(), [&](double a, double b) {
      return std::abs(a - 0.5 * wp) < std::abs(b - 0.5 * wp);
    });
    curve.rows.push_back({lp, omega_to_wavelength(ws), omega_to_wavelength(wp - ws)});
  }
  return curve;
}

}  // namespace qpic
