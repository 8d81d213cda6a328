#include "qpic/cmt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>
#include <unsupported/Eigen/NonLinearOptimization>

#include "qpic/elements.hpp"
#include "qpic/error.hpp"

namespace qpic {
namespace {

using cplx = std::complex<double>;
constexpr cplx kI{0.0, 1.0};

}  // namespace

CmtState cmt_evolve(const CmtState& state, double kappa, double delta_beta,
                    double z) {
  if (!(z >= 0.0)) throw ValidationError("evolution distance must be >= 0");
  const double half = 0.5 * delta_beta;
  const double s = std::hypot(kappa, half);
  double cs = 1.0, sn_over_s = z;  // limits for s -> 0
  if (s > 0.0) {
    cs = std::cos(s * z);
    sn_over_s = std::sin(s * z) / s;
  }
  const cplx rot = std::exp(kI * (half * z));
  CmtState out;
  out.te = (state.te * (cs - kI * half * sn_over_s) - kI * kappa * sn_over_s * state.tm) * rot;
  out.tm = (state.tm * (cs + kI * half * sn_over_s) - kI * kappa * sn_over_s * state.te) /
           rot;
  out.z = state.z + z;
  return out;
}

double conversion_fraction(double kappa, double delta_beta, double length) {
  const double s = std::hypot(kappa, 0.5 * delta_beta);
  if (s == 0.0) return 0.0;
  const double amp = kappa / s * std::sin(s * length);
  return amp * amp;
}

std::vector<SpectrumRow> pc_spectrum(const MaterialModel& model,
                                     double pc_period, double pc_length,
                                     double kappa, double temperature_c,
                                     double lambda_min, double lambda_max,
                                     std::size_t points) {
  if (!(pc_length > 0.0)) throw ValidationError("converter length must be > 0");
  if (!(kappa >= 0.0)) throw ValidationError("kappa must be >= 0");
  if (!(lambda_max > lambda_min) || points < 2) {
    throw ValidationError("wavelength range must be non-degenerate");
  }
  std::vector<SpectrumRow> rows;
  rows.reserve(points);
  for (double lambda : linspace(lambda_min, lambda_max, points)) {
    const double dk = pc_mismatch(model, pc_period, lambda, temperature_c);
    rows.push_back({lambda, conversion_fraction(kappa, dk, pc_length)});
  }
  return rows;
}

std::optional<WidthInfo> spectrum_fwhm(const std::vector<SpectrumRow>& rows) {
  std::vector<double> x, y;
  x.reserve(rows.size());
  y.reserve(rows.size());
  for (const auto& r : rows) {
    x.push_back(r.wavelength);
    y.push_back(r.converted);
  }
  return peak_fwhm(x, y);
}

double bar_transmission(double kappa_c, double half_length, double delta_beta_1,
                        double delta_beta_2) {
  // Field-frame sections so that the cascade is phase consistent.
  const Mat2 m = coupler_section(kappa_c, delta_beta_2, half_length) *
                 coupler_section(kappa_c, delta_beta_1, half_length);
  return std::norm(m(0, 0));
}

double SwitchMap::min() const {
  double m = 1.0;
  for (const auto& row : bar) m = std::min(m, *std::min_element(row.begin(), row.end()));
  return m;
}

double SwitchMap::max() const {
  double m = 0.0;
  for (const auto& row : bar) m = std::max(m, *std::max_element(row.begin(), row.end()));
  return m;
}

SwitchMap switch_map(const SwitchMapSpec& spec) {
  if (spec.u1_points < 2 || spec.u2_points < 2 || !(spec.u1_max > spec.u1_min) ||
      !(spec.u2_max > spec.u2_min)) {
    throw ValidationError("voltage grids must be non-degenerate");
  }
  if (!(spec.half_length > 0.0) || !(spec.kappa_c >= 0.0) || !std::isfinite(spec.gain)) {
    throw ValidationError("invalid coupler parameters");
  }
  SwitchMap map;
  map.u1 = linspace(spec.u1_min, spec.u1_max, spec.u1_points);
  map.u2 = linspace(spec.u2_min, spec.u2_max, spec.u2_points);
  map.bar.assign(map.u1.size(), std::vector<double>(map.u2.size()));
  for (std::size_t a = 0; a < map.u1.size(); ++a) {
    for (std::size_t b = 0; b < map.u2.size(); ++b) {
      map.bar[a][b] = bar_transmission(spec.kappa_c, spec.half_length,
                                       spec.gain * map.u1[a], spec.gain * map.u2[b]);
    }
  }
  return map;
}

double splitting_ratio(const CouplerFit& fit, double coupler_length,
                       Polarisation pol) {
  if (!(coupler_length >= 0.0)) throw ValidationError("coupler length must be >= 0");
  const CouplerPolFit& p = pol == Polarisation::H ? fit.te : fit.tm;
  if (!(p.beat_length > 0.0)) throw ValidationError("beat length must be > 0");
  const double s = std::sin(kPi * (coupler_length - p.optimum_length) / (2.0 * p.beat_length));
  return s * s;
}

PbsAngles pbs_angles(const CouplerFit& fit, double coupler_length) {
  return {std::acos(std::sqrt(splitting_ratio(fit, coupler_length, Polarisation::H))),
          std::acos(std::sqrt(splitting_ratio(fit, coupler_length, Polarisation::V)))};
}

namespace {

double model_ratio(double length, double beat, double optimum) {
  const double s = std::sin(kPi * (length - optimum) / (2.0 * beat));
  return s * s;
}

struct Sin2Functor {
  using Scalar = double;
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

  const std::vector<CouplerSample>* data;

  int inputs() const { return 2; }
  int values() const { return static_cast<int>(data->size()); }

  int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& f) const {
    for (std::size_t k = 0; k < data->size(); ++k) {
      f[k] = model_ratio((*data)[k].length, x[0], x[1]) - (*data)[k].ratio;
    }
    return 0;
  }

  int df(const Eigen::VectorXd& x, Eigen::MatrixXd& j) const {
    for (std::size_t k = 0; k < data->size(); ++k) {
      const double u = kPi * ((*data)[k].length - x[1]) / (2.0 * x[0]);
      const double d = std::sin(2.0 * u);  // d sin^2(u) / du
      j(k, 0) = d * (-u / x[0]);
      j(k, 1) = d * (-kPi / (2.0 * x[0]));
    }
    return 0;
  }
};

double sum_squares(const std::vector<CouplerSample>& data, double beat, double optimum) {
  double acc = 0.0;
  for (const auto& s : data) {
    const double r = model_ratio(s.length, beat, optimum) - s.ratio;
    acc += r * r;
  }
  return acc;
}

}  // namespace

CouplerPolFit fit_coupler_polarisation(const std::vector<CouplerSample>& data) {
  if (data.size() < 3) throw ValidationError("coupler fit needs at least 3 samples");
  double lmin = data.front().length, lmax = lmin;
  for (const auto& s : data) {
    if (!std::isfinite(s.length) || !std::isfinite(s.ratio) || s.ratio < 0.0 || s.ratio > 1.0) {
      throw ValidationError("coupler samples need finite lengths and ratios in [0, 1]");
    }
    lmin = std::min(lmin, s.length);
    lmax = std::max(lmax, s.length);
  }
  const double span = std::max(lmax - lmin, 1.0);

  double best_b = span, best_o = 0.5 * (lmin + lmax);
  double best = std::numeric_limits<double>::infinity();
  for (int ib = 0; ib < 200; ++ib) {
    const double beat = 0.05 * span * std::pow(400.0, ib / 199.0);
    for (int io = 0; io < 200; ++io) {
      const double optimum = lmin - beat + (span + 2.0 * beat) * io / 199.0;
      const double ss = sum_squares(data, beat, optimum);
      if (ss < best) {
        best = ss;
        best_b = beat;
        best_o = optimum;
      }
    }
  }

  Sin2Functor functor{&data};
  Eigen::LevenbergMarquardt<Sin2Functor> lm(functor);
  lm.parameters.xtol = 1e-14;
  lm.parameters.ftol = 1e-14;
  Eigen::VectorXd x(2);
  x << best_b, best_o;
  lm.minimize(x);
  if (!std::isfinite(x[0]) || !std::isfinite(x[1]) || x[0] == 0.0) {
    throw NumericalError("coupler fit diverged");
  }

  CouplerPolFit fit;
  fit.beat_length = std::abs(x[0]);
  // The model repeats with period 2B; keep the optimum nearest the data.
  const double period = 2.0 * fit.beat_length;
  const double centre = 0.5 * (lmin + lmax);
  fit.optimum_length = x[1] - period * std::round((x[1] - centre) / period);
  fit.rms_residual =
      std::sqrt(sum_squares(data, fit.beat_length, fit.optimum_length) / data.size());
  return fit;
}

CouplerFit fit_coupler(const std::vector<CouplerSample>& te,
                       const std::vector<CouplerSample>& tm) {
  return {fit_coupler_polarisation(te), fit_coupler_polarisation(tm)};
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char ch = line[k];
    if (quoted) {
      if (ch == '"' && k + 1 < line.size() && line[k + 1] == '"') {
        cell += '"';
        ++k;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cell += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      cells.push_back(cell);
      cell.clear();
    } else if (ch != '\r') {
      cell += ch;
    }
  }
  cells.push_back(cell);
  for (auto& c : cells) {
    const auto b = c.find_first_not_of(" \t");
    const auto e = c.find_last_not_of(" \t");
    c = b == std::string::npos ? std::string() : c.substr(b, e - b + 1);
  }
  return cells;
}

}  // namespace

std::vector<CouplerSample> read_coupler_samples(const std::string& text,
                                                const std::string& source,
                                                const std::string& column) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  int length_col = -1, ratio_col = -1;
  std::vector<CouplerSample> out;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv_line(line);
    if (length_col < 0) {
      for (std::size_t c = 0; c < cells.size(); ++c) {
        if (cells[c] == "length") length_col = static_cast<int>(c);
        if (cells[c] == column) ratio_col = static_cast<int>(c);
      }
      if (length_col < 0 || ratio_col < 0) {
        throw ParseError(source, line_no, 1,
                         "header must name columns 'length' and '" + column + "'");
      }
      continue;
    }
    if (static_cast<int>(cells.size()) <= std::max(length_col, ratio_col)) {
      throw ParseError(source, line_no, 1, "row has too few cells");
    }
    if (cells[ratio_col].empty()) continue;
    try {
      std::size_t used = 0;
      const double l = std::stod(cells[length_col], &used);
      if (used != cells[length_col].size()) throw std::invalid_argument("trailing");
      const double r = std::stod(cells[ratio_col], &used);
      if (used != cells[ratio_col].size()) throw std::invalid_argument("trailing");
      out.push_back({l, r});
    } catch (const std::logic_error&) {
      throw ParseError(source, line_no, 1, "malformed number");
    }
  }
  if (length_col < 0) throw ParseError(source, 1, 1, "empty CSV");
  return out;
}

std::string format_coupler_fit(const CouplerFit& fit) {
  std::ostringstream os;
  os.precision(12);
  for (const auto& [name, p] : {std::pair{"te", fit.te}, std::pair{"tm", fit.tm}}) {
    os << "[" << name << "]\n"
       << "beat_length = " << p.beat_length << "\n"
       << "optimum_length = " << p.optimum_length << "\n"
       << "rms_residual = " << p.rms_residual << "\n";
  }
  return os.str();
}

}  // namespace qpic
