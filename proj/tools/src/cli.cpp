#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>

#include "qpic/qpic.hpp"
#include "run_context.hpp"

namespace qpic::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Common {
  std::string out = ".";
  bool gnuplot = false;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--out", c.out, "Output directory")->capture_default_str();
  app->add_flag("--gnuplot-script", c.gnuplot, "Also write a gnuplot script");
}

json optional_json(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

json width_json(const std::optional<WidthInfo>& w) {
  if (!w) return nullptr;
  return {{"left", w->left}, {"right", w->right}, {"width", w->width()}, {"centre", w->centre()}};
}

// Least-squares slope of y(x).
double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sx += x[k];
    sy += y[k];
    sxx += x[k] * x[k];
    sxy += x[k] * y[k];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::vector<double> stepped(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo)) throw ValidationError("range needs step > 0 and max >= min");
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  if (count > 100000) throw ValidationError("range has too many points");
  std::vector<double> v(count);
  for (std::size_t k = 0; k < count; ++k) v[k] = lo + step * static_cast<double>(k);
  return v;
}

MaterialModel load_material_option(const std::string& path, RunContext& ctx) {
  if (path.empty()) return default_material();
  ctx.input(path);
  return load_material(path);
}

// ---------------------------------------------------------------- chip

struct ChipOptions {
  std::string netlist;
  std::optional<double> tau, length, temperature, pc_length;
  std::size_t grid = 512;
};

void add_chip(CLI::App* app, ChipOptions& c) {
  app->add_option("--netlist", c.netlist, "Circuit netlist (default: built-in reference chip)");
  app->add_option("--tau", c.tau, "Pump pulse duration, ps");
  app->add_option("--length", c.length, "PDC section length, um");
  app->add_option("--temperature", c.temperature, "Chip temperature, degC");
  app->add_option("--pc-length", c.pc_length,
                  "Converter length, um (kappa follows as pi/(2 L))");
  app->add_option("--grid", c.grid, "JSA samples per axis")->capture_default_str();
}

CircuitSpec load_chip(const ChipOptions& o, RunContext& ctx) {
  CircuitSpec spec;
  if (o.netlist.empty()) {
    spec = reference_chip();
  } else {
    ctx.input(o.netlist);
    spec = load_netlist(o.netlist);
    if (!spec.material_file.empty()) {
      fs::path p(spec.material_file);
      if (p.is_relative()) p = fs::path(o.netlist).parent_path() / p;
      ctx.input(p);
    }
  }
  if (o.tau) spec.source.pump.tau = *o.tau;
  if (o.length) spec.source.phase_match.pdc_length = *o.length;
  if (o.temperature) spec = spec.at_temperature(*o.temperature);
  if (o.pc_length) {
    const auto pcs = spec.indices_of("pc");
    if (pcs.empty()) throw ValidationError("--pc-length given but the circuit has no pc");
    for (std::size_t k : pcs) {
      auto& pc = std::get<PcParams>(spec.elements[k].params);
      pc.length = *o.pc_length;
      pc.kappa = kPi / (2.0 * pc.length);
      validate_params(pc);
    }
  }
  spec.source.pump.validate();
  spec.source.phase_match.validate();
  if (o.grid < 3 || o.grid > 8192) throw ValidationError("--grid must lie in [3, 8192]");
  ctx.argument("netlist", o.netlist.empty() ? json("<reference chip>") : json(o.netlist));
  ctx.argument("tau_ps", spec.source.pump.tau);
  ctx.argument("pdc_length_um", spec.source.phase_match.pdc_length);
  ctx.argument("temperature_c", spec.material.temperature);
  ctx.argument("grid", o.grid);
  return spec;
}

JointSpectralAmplitude chip_jsa(const CircuitSpec& spec, std::size_t points) {
  GridSpec g;
  g.points = points;
  return build_jsa(spec.material, spec.source.pump, spec.source.phase_match, g);
}

// ---------------------------------------------------------------- scans

struct ScanOptions {
  std::optional<double> start, stop;
  std::size_t points = 61;
  std::string pol = "VV";
  bool insensitive = false;
  std::string element;
  double half_range = 1500.0;
};

void add_scan(CLI::App* app, ScanOptions& s) {
  app->add_option("--dl-start", s.start, "First delta_l, um (default: centre - range)");
  app->add_option("--dl-stop", s.stop, "Last delta_l, um (default: centre + range)");
  app->add_option("--dl-range", s.half_range, "Half-width around the group-delay centre, um")
      ->capture_default_str();
  app->add_option("--points", s.points, "Scan samples")->capture_default_str();
  app->add_option("--pol", s.pol, "Detector polarisations b,c: HH, HV, VH or VV")
      ->capture_default_str();
  app->add_flag("--insensitive", s.insensitive, "Sum over all detector polarisations");
  app->add_option("--element", s.element, "Name of the scanned fp element");
}

Polarisation pol_from(char c) {
  if (c == 'H' || c == 'h') return Polarisation::H;
  if (c == 'V' || c == 'v') return Polarisation::V;
  throw ValidationError("--pol must be two letters from {H, V}");
}

// Group-delay compensation estimate: H and V share every fp up to and
// including the scanned one.
double default_centre(const CircuitSpec& spec, std::size_t target) {
  double shared = 0.0;
  for (std::size_t k = 0; k <= target; ++k) {
    if (const auto* fp = std::get_if<FpParams>(&spec.elements[k].params)) shared += fp->l1;
  }
  return compensating_delay(spec.material, 0.5 * spec.source.pump.omega(),
                            spec.source.phase_match.pdc_length, 0.0, shared);
}

HomScanSpec make_scan(const ScanOptions& o, const CircuitSpec& spec, RunContext& ctx) {
  HomScanSpec s;
  if (o.pol.size() != 2) throw ValidationError("--pol must be two letters from {H, V}");
  s.query = {pol_from(o.pol[0]), pol_from(o.pol[1])};
  s.insensitive = o.insensitive;
  if (!o.element.empty()) s.element_name = o.element;
  s.points = o.points;
  const std::size_t target = scan_target(spec, s);
  const double centre = default_centre(spec, target);
  s.start = o.start.value_or(centre - o.half_range);
  s.stop = o.stop.value_or(centre + o.half_range);
  if (s.points < 2 || !(s.stop > s.start)) {
    throw ValidationError("scan range must be non-degenerate with >= 2 points");
  }
  const double l1 = std::get<FpParams>(spec.elements[target].params).l1;
  if (l1 + s.start < 0.0) throw ValidationError("scan start makes the fp length negative");
  ctx.argument("dl_start_um", s.start);
  ctx.argument("dl_stop_um", s.stop);
  ctx.argument("points", s.points);
  ctx.argument("pol", o.insensitive ? "insensitive" : o.pol);
  ctx.argument("scan_element", target);
  ctx.summary("group_delay_centre_um", centre);
  return s;
}

json scan_json(const ScanResult& r) {
  return {{"visibility", r.visibility},       {"minimum", r.minimum},
          {"maximum", r.maximum},             {"asymptote", r.asymptote},
          {"dip_position_um", r.dip_position}, {"dip_width", width_json(r.dip_width)},
          {"boundary_minimum", r.boundary_minimum}};
}

// ---------------------------------------------------------------- commands

struct TuningOptions {
  Common common;
  std::string material;
  double poling = 9.0;
  double t_min = 15.0, t_max = 40.0, t_step = 1.0;
  double temperature = 24.5;
  double pump_min = 0.760, pump_max = 0.770;
  std::size_t pump_points = 201;
};

int cmd_tuning(const TuningOptions& o, std::ostream& out) {
  RunContext ctx("tuning", o.common.out, o.common.gnuplot);
  const MaterialModel model = load_material_option(o.material, ctx);
  const auto temps = stepped(o.t_min, o.t_max, o.t_step);
  if (o.pump_points < 2 || !(o.pump_max > o.pump_min)) {
    throw ValidationError("pump range must be non-degenerate");
  }
  model.at_temperature(o.temperature).validate();
  for (double t : temps) model.at_temperature(t).validate();
  ctx.argument("material", o.material.empty() ? json("<bundled>") : json(o.material));
  ctx.argument("poling_um", o.poling);
  ctx.argument("t_min_c", o.t_min);
  ctx.argument("t_max_c", o.t_max);
  ctx.argument("t_step_c", o.t_step);
  ctx.argument("temperature_c", o.temperature);
  ctx.argument("pump_min_um", o.pump_min);
  ctx.argument("pump_max_um", o.pump_max);
  ctx.argument("pump_points", o.pump_points);

  CsvTable deg{{"temperature_c", "degenerate_wavelength_um", "pump_wavelength_um",
                "residual_rad_per_um", "root_count"}, {}};
  std::vector<double> tx, ly;
  for (double t : temps) {
    const RootResult r = degenerate_wavelength(model, o.poling, t);
    deg.add({t, r.wavelength, 0.5 * r.wavelength, r.residual, static_cast<double>(r.root_count)});
    tx.push_back(t);
    ly.push_back(r.wavelength * 1000.0);
  }
  ctx.write_csv("tuning_temperature.csv", deg);
  ctx.plot("tuning_temperature.csv", "temperature_c", "degenerate_wavelength_um",
           "degenerate wavelength");

  const TuningCurve curve =
      tuning_curve(model, o.poling, o.temperature, o.pump_min, o.pump_max, o.pump_points);
  CsvTable cross{{"pump_wavelength_um", "signal_wavelength_um", "idler_wavelength_um"}, {}};
  for (const auto& r : curve.rows) {
    cross.add({r.pump_wavelength, r.signal_wavelength, r.idler_wavelength});
  }
  ctx.write_csv("tuning_pump.csv", cross);
  ctx.plot("tuning_pump.csv", "pump_wavelength_um", "signal_wavelength_um", "tuning cross");

  // Split ratio |λs - λi| / δλp a little off degeneracy.
  const double lp0 = 0.5 * degenerate_wavelength(model, o.poling, o.temperature).wavelength;
  const double dlp = 1e-4;
  const TuningCurve near = tuning_curve(model, o.poling, o.temperature, lp0 + dlp, lp0 + 2 * dlp, 2);
  json split = nullptr;
  if (!near.rows.empty()) {
    const auto& r = near.rows.front();
    split = std::abs(r.signal_wavelength - r.idler_wavelength) / dlp;
  }
  const double s = slope(tx, ly);
  ctx.summary("degenerate_slope_nm_per_c", s);
  ctx.summary("split_ratio", split);
  json unmatched = json::array();
  for (double v : curve.unmatched_pump_wavelengths) unmatched.push_back(v);
  ctx.summary("unmatched_pump_wavelengths_um", unmatched);
  ctx.finish();
  out << "degenerate wavelength slope: " << s << " nm/C\n";
  if (!split.is_null()) out << "signal/idler split ratio: " << split.get<double>() << "\n";
  return 0;
}

struct JsaOptions {
  Common common;
  ChipOptions chip;
  std::size_t stride = 4;
  std::size_t bins = 256;
};

int cmd_jsa(const JsaOptions& o, std::ostream& out) {
  RunContext ctx("jsa", o.common.out, o.common.gnuplot);
  const CircuitSpec spec = load_chip(o.chip, ctx);
  if (o.stride < 1) throw ValidationError("--stride must be >= 1");
  if (o.bins < 2) throw ValidationError("--bins must be >= 2");
  ctx.argument("stride", o.stride);
  ctx.argument("bins", o.bins);
  const JointSpectralAmplitude jsa = chip_jsa(spec, o.chip.grid);

  CsvTable grid{{"sigma_rad_per_ps", "delta_rad_per_ps", "omega_s_rad_per_ps",
                 "omega_i_rad_per_ps", "abs", "real", "imag"}, {}};
  const auto& f = jsa.amplitude();
  for (std::size_t i = 0; i < jsa.size(); i += o.stride) {
    for (std::size_t j = 0; j < jsa.size(); j += o.stride) {
      grid.add({jsa.sigma(i), jsa.delta(j), jsa.omega_s(i, j), jsa.omega_i(i, j),
                std::abs(f(i, j)), f(i, j).real(), f(i, j).imag()});
    }
  }
  ctx.write_csv("jsa.csv", grid);

  const Marginals m = marginal_spectra(jsa, o.bins);
  CsvTable marg{{"omega_rad_per_ps", "wavelength_um", "signal_density", "signal_normalised",
                 "idler_density", "idler_normalised"}, {}};
  for (std::size_t b = 0; b < m.signal.size(); ++b) {
    marg.add({m.signal[b].omega, m.signal[b].wavelength, m.signal[b].density,
              m.signal[b].normalised, m.idler[b].density, m.idler[b].normalised});
  }
  ctx.write_csv("marginals.csv", marg);
  ctx.plot("marginals.csv", "wavelength_um", "signal_normalised", "signal marginal");
  ctx.plot("marginals.csv", "wavelength_um", "idler_normalised", "idler marginal");

  const double asym = jsa_exchange_asymmetry(jsa);
  ctx.summary("exchange_asymmetry", asym);
  ctx.summary("exchange_asymmetry_literal",
              jsa_exchange_asymmetry(jsa, ExchangeReference::Literal));
  ctx.summary("exchange_delay_ps", jsa_exchange_delay(jsa));
  ctx.summary("sum_span_rad_per_ps", jsa.sigma_axis().back());
  ctx.summary("diff_span_rad_per_ps", jsa.delta_axis().back());
  ctx.summary("normalisation_constant", jsa.normalisation());
  ctx.summary("signal_peak_um", omega_to_wavelength(marginal_peak(m.signal)));
  ctx.summary("idler_peak_um", omega_to_wavelength(marginal_peak(m.idler)));
  ctx.finish();
  out << "exchange asymmetry: " << asym << "\n";
  return 0;
}

struct HomOptions {
  Common common;
  ChipOptions chip;
  ScanOptions scan;
};

void write_scan(RunContext& ctx, const std::string& name, const ScanResult& r) {
  CsvTable t{{"delta_l_um", "probability"}, {}};
  for (const auto& s : r.samples) t.add({s.value, s.probability});
  ctx.write_csv(name, t);
}

int cmd_hom(const HomOptions& o, std::ostream& out) {
  RunContext ctx("hom", o.common.out, o.common.gnuplot);
  const CircuitSpec spec = load_chip(o.chip, ctx);
  const HomScanSpec scan = make_scan(o.scan, spec, ctx);
  const JointSpectralAmplitude jsa = chip_jsa(spec, o.chip.grid);
  const ScanResult r = hom_scan(jsa, spec, scan);
  write_scan(ctx, "hom.csv", r);
  ctx.plot("hom.csv", "delta_l_um", "probability", "HOM scan");
  const json sj = scan_json(r);
  for (const auto& [k, v] : sj.items()) ctx.summary(k, v);
  ctx.finish();
  out << "visibility " << r.visibility << ", minimum " << r.minimum << " at "
      << r.dip_position << " um, asymptote " << r.asymptote << "\n";
  if (r.boundary_minimum) out << "warning: minimum on the scan boundary\n";
  return 0;
}

struct SweepOptions {
  Common common;
  ChipOptions chip;
  ScanOptions scan;
  std::string element = "bs";
  std::vector<double> fractions{0.0, 0.25, 0.5, 0.75, 1.0};
};

int cmd_sweep(const SweepOptions& o, std::ostream& out) {
  RunContext ctx("sweep", o.common.out, o.common.gnuplot);
  const ImperfectElement which = parse_imperfect_element(o.element);
  const CircuitSpec spec = load_chip(o.chip, ctx);
  const HomScanSpec scan = make_scan(o.scan, spec, ctx);
  for (double f : o.fractions) {
    if (!(f >= 0.0 && f <= 1.0)) throw ValidationError("fractions must lie in [0, 1]");
  }
  if (o.fractions.empty()) throw ValidationError("no fractions given");
  ctx.argument("element", o.element);
  ctx.argument("fractions", o.fractions);
  const JointSpectralAmplitude jsa = chip_jsa(spec, o.chip.grid);
  const auto rows = imperfection_sweep(jsa, spec, which, o.fractions, scan);

  CsvTable summary{{"fraction", "visibility", "minimum", "maximum", "asymptote",
                    "dip_position_um"}, {}};
  CsvTable scans{{"fraction", "delta_l_um", "probability"}, {}};
  json table = json::array();
  for (const auto& row : rows) {
    const ScanResult& r = row.scan;
    summary.add({row.fraction, r.visibility, r.minimum, r.maximum, r.asymptote, r.dip_position});
    for (const auto& s : r.samples) scans.add({row.fraction, s.value, s.probability});
    json j = scan_json(r);
    j["fraction"] = row.fraction;
    table.push_back(j);
    out << "f=" << row.fraction << ": visibility " << r.visibility << ", min " << r.minimum
        << ", max " << r.maximum << "\n";
  }
  ctx.write_csv("sweep_summary.csv", summary);
  ctx.write_csv("sweep_scans.csv", scans);
  ctx.plot("sweep_summary.csv", "fraction", "visibility", "visibility vs imperfection");
  ctx.plot("sweep_summary.csv", "fraction", "maximum", "maximum coincidence vs imperfection");
  ctx.summary("rows", table);
  ctx.finish();
  return 0;
}

struct PcWindowOptions {
  Common common;
  std::string material;
  double period = 21.4;
  double length = 7600.0;
  std::optional<double> kappa, voltage;
  double temperature = 24.5;
  std::optional<double> lambda_min, lambda_max;
  std::size_t points = 2001;
};

int cmd_pc_window(const PcWindowOptions& o, std::ostream& out) {
  RunContext ctx("pc-window", o.common.out, o.common.gnuplot);
  const MaterialModel model = load_material_option(o.material, ctx);
  if (o.kappa && o.voltage) throw ValidationError("give --kappa or --voltage, not both");
  if (!(o.length > 0.0) || !(o.period > 0.0)) throw ValidationError("period and length must be > 0");
  model.at_temperature(o.temperature).validate();
  double kappa = kPi / (2.0 * o.length);
  if (o.kappa) kappa = *o.kappa;
  if (o.voltage) kappa = std::abs(pc_kappa_from_voltage(*o.voltage));
  if (!(kappa >= 0.0)) throw ValidationError("kappa must be >= 0");

  const RootResult pm = pc_phase_matched_wavelength(model, o.period, o.temperature);
  const double lo = o.lambda_min.value_or(pm.wavelength - 0.015);
  const double hi = o.lambda_max.value_or(pm.wavelength + 0.015);
  ctx.argument("material", o.material.empty() ? json("<bundled>") : json(o.material));
  ctx.argument("period_um", o.period);
  ctx.argument("length_um", o.length);
  ctx.argument("kappa_rad_per_um", kappa);
  ctx.argument("temperature_c", o.temperature);
  ctx.argument("lambda_min_um", lo);
  ctx.argument("lambda_max_um", hi);
  ctx.argument("points", o.points);

  const auto rows = pc_spectrum(model, o.period, o.length, kappa, o.temperature, lo, hi, o.points);
  CsvTable t{{"wavelength_um", "converted"}, {}};
  for (const auto& r : rows) t.add({r.wavelength, r.converted});
  ctx.write_csv("pc_window.csv", t);
  ctx.plot("pc_window.csv", "wavelength_um", "converted", "conversion window");

  const auto w = spectrum_fwhm(rows);
  const double dt = 1.0;
  const double up = pc_phase_matched_wavelength(model, o.period, o.temperature + dt).wavelength;
  const double down = pc_phase_matched_wavelength(model, o.period, o.temperature - dt).wavelength;
  const double pm_slope = (up - down) / (2.0 * dt) * 1000.0;
  ctx.summary("phase_matched_wavelength_um", pm.wavelength);
  ctx.summary("fwhm_nm", w ? json(w->width() * 1000.0) : json(nullptr));
  ctx.summary("phase_match_slope_nm_per_c", pm_slope);
  double peak = 0.0;
  for (const auto& r : rows) peak = std::max(peak, r.converted);
  ctx.summary("peak_conversion", peak);
  ctx.finish();
  out << "phase matched at " << pm.wavelength << " um";
  if (w) out << ", FWHM " << w->width() * 1000.0 << " nm";
  out << ", slope " << pm_slope << " nm/C\n";
  return 0;
}

struct SwitchOptions {
  Common common;
  SwitchMapSpec spec;
};

int cmd_switch_map(const SwitchOptions& o, std::ostream& out) {
  RunContext ctx("switch-map", o.common.out, o.common.gnuplot);
  const SwitchMapSpec& s = o.spec;
  ctx.argument("kappa_c_rad_per_um", s.kappa_c);
  ctx.argument("half_length_um", s.half_length);
  ctx.argument("gain_rad_per_um_v", s.gain);
  ctx.argument("u1_v", {s.u1_min, s.u1_max, s.u1_points});
  ctx.argument("u2_v", {s.u2_min, s.u2_max, s.u2_points});
  const SwitchMap map = switch_map(s);
  CsvTable t{{"u1_v", "u2_v", "bar"}, {}};
  for (std::size_t a = 0; a < map.u1.size(); ++a) {
    for (std::size_t b = 0; b < map.u2.size(); ++b) t.add({map.u1[a], map.u2[b], map.bar[a][b]});
  }
  ctx.write_csv("switch_map.csv", t);
  ctx.summary("bar_min", map.min());
  ctx.summary("bar_max", map.max());
  ctx.finish();
  out << "bar transmission spans [" << map.min() << ", " << map.max() << "]\n";
  return 0;
}

struct CouplerOptions {
  Common common;
  std::string data;
  std::string te_column = "ratio_te";
  std::string tm_column = "ratio_tm";
  double length = 500.0;
};

int cmd_coupler_fit(const CouplerOptions& o, std::ostream& out) {
  RunContext ctx("coupler-fit", o.common.out, o.common.gnuplot);
  if (!(o.length >= 0.0)) throw ValidationError("--length must be >= 0");
  ctx.input(o.data);
  std::ifstream in(o.data, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  const auto te = read_coupler_samples(buf.str(), o.data, o.te_column);
  const auto tm = read_coupler_samples(buf.str(), o.data, o.tm_column);
  ctx.argument("data", o.data);
  ctx.argument("length_um", o.length);
  const CouplerFit fit = fit_coupler(te, tm);
  const PbsAngles angles = pbs_angles(fit, o.length);

  std::ostringstream kv;
  kv.precision(12);
  kv << "# sin^2 coupler fit of " << fs::path(o.data).filename().string() << "\n"
     << format_coupler_fit(fit);
  ctx.write_text("coupler_fit.txt", kv.str());

  std::ostringstream pbs;
  pbs.precision(17);
  pbs << "# pbs from a " << o.length << " um coupler\n"
      << "element pbs\nalpha = " << angles.alpha << "\nbeta = " << angles.beta << "\n";
  ctx.write_text("coupler_pbs.qnl", pbs.str());

  CsvTable t{{"length_um", "model_te", "model_tm"}, {}};
  double lmin = std::numeric_limits<double>::infinity(), lmax = -lmin;
  for (const auto* set : {&te, &tm}) {
    for (const auto& s : *set) {
      lmin = std::min(lmin, s.length);
      lmax = std::max(lmax, s.length);
    }
  }
  for (double l : linspace(lmin, lmax, 201)) {
    t.add({l, splitting_ratio(fit, l, Polarisation::H), splitting_ratio(fit, l, Polarisation::V)});
  }
  ctx.write_csv("coupler_model.csv", t);
  ctx.plot("coupler_model.csv", "length_um", "model_te", "TE splitting");
  ctx.summary("te", {{"beat_length_um", fit.te.beat_length},
                     {"optimum_length_um", fit.te.optimum_length},
                     {"rms_residual", fit.te.rms_residual}});
  ctx.summary("tm", {{"beat_length_um", fit.tm.beat_length},
                     {"optimum_length_um", fit.tm.optimum_length},
                     {"rms_residual", fit.tm.rms_residual}});
  ctx.summary("ratio_te_at_length", splitting_ratio(fit, o.length, Polarisation::H));
  ctx.summary("ratio_tm_at_length", splitting_ratio(fit, o.length, Polarisation::V));
  ctx.summary("pbs_alpha", angles.alpha);
  ctx.summary("pbs_beta", angles.beta);
  ctx.finish();
  out << "TE optimum " << fit.te.optimum_length << " um, TM optimum " << fit.tm.optimum_length
      << " um\n";
  return 0;
}

struct TempOptions {
  Common common;
  ChipOptions chip;
  ScanOptions scan;
  std::vector<double> temperatures;
  double t_min = 24.5, t_max = 29.5, t_step = 0.5;
  std::size_t bins = 256;
};

int cmd_temp_scan(const TempOptions& o, std::ostream& out) {
  RunContext ctx("temp-scan", o.common.out, o.common.gnuplot);
  const CircuitSpec spec = load_chip(o.chip, ctx);
  const HomScanSpec scan = make_scan(o.scan, spec, ctx);
  const std::vector<double> temps =
      o.temperatures.empty() ? stepped(o.t_min, o.t_max, o.t_step) : o.temperatures;
  for (double t : temps) spec.at_temperature(t);
  ctx.argument("temperatures_c", temps);
  GridSpec grid;
  grid.points = o.chip.grid;
  const auto rows = temperature_scan(spec, temps, scan, grid);

  const auto pcs = spec.indices_of("pc");
  CsvTable summary{{"temperature_c", "visibility", "minimum", "maximum", "asymptote",
                    "dip_position_um", "signal_peak_um", "idler_peak_um", "pc_peak_um"}, {}};
  CsvTable marg{{"temperature_c", "wavelength_um", "signal_normalised", "idler_normalised",
                 "pc_conversion"}, {}};
  CsvTable scans{{"temperature_c", "delta_l_um", "probability"}, {}};
  json table = json::array();
  for (const auto& row : rows) {
    const ScanResult& r = row.scan;
    summary.add({row.temperature, r.visibility, r.minimum, r.maximum, r.asymptote,
                 r.dip_position, row.signal_peak_wavelength, row.idler_peak_wavelength,
                 row.pc_wavelength});
    for (const auto& s : r.samples) scans.add({row.temperature, s.value, s.probability});
    const CircuitSpec at_t = spec.at_temperature(row.temperature);
    for (std::size_t b = 0; b < row.marginals.signal.size(); ++b) {
      const auto& sig = row.marginals.signal[b];
      double conv = std::numeric_limits<double>::quiet_NaN();
      if (!pcs.empty()) {
        const auto& pc = std::get<PcParams>(at_t.elements[pcs.front()].params);
        const Mat4 m = pc_matrix(at_t.material, pc, sig.omega);
        conv = std::norm(m(mode_index(pc.channel, Polarisation::V),
                           mode_index(pc.channel, Polarisation::H)));
      }
      marg.add({row.temperature, sig.wavelength, sig.normalised,
                row.marginals.idler[b].normalised, conv});
    }
    json j = scan_json(r);
    j["temperature_c"] = row.temperature;
    table.push_back(j);
    out << "T=" << row.temperature << " C: visibility " << r.visibility << "\n";
  }
  ctx.write_csv("temp_scan.csv", summary);
  ctx.write_csv("temp_marginals.csv", marg);
  ctx.write_csv("temp_scans.csv", scans);
  ctx.plot("temp_scan.csv", "temperature_c", "visibility", "visibility vs temperature");
  ctx.summary("rows", table);
  ctx.finish();
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantum photonic circuit simulator for periodically poled LiNbO3 chips", "qpic"};
  app.require_subcommand(1);

  TuningOptions tuning;
  auto* c_tuning = app.add_subcommand("tuning", "Degenerate wavelength vs temperature and tuning cross");
  add_common(c_tuning, tuning.common);
  c_tuning->add_option("--material", tuning.material, "Material coefficient file");
  c_tuning->add_option("--poling", tuning.poling, "Poling period, um")->capture_default_str();
  c_tuning->add_option("--t-min", tuning.t_min)->capture_default_str();
  c_tuning->add_option("--t-max", tuning.t_max)->capture_default_str();
  c_tuning->add_option("--t-step", tuning.t_step)->capture_default_str();
  c_tuning->add_option("--temperature", tuning.temperature, "Temperature of the tuning cross")
      ->capture_default_str();
  c_tuning->add_option("--pump-min", tuning.pump_min)->capture_default_str();
  c_tuning->add_option("--pump-max", tuning.pump_max)->capture_default_str();
  c_tuning->add_option("--pump-points", tuning.pump_points)->capture_default_str();

  JsaOptions jsa;
  auto* c_jsa = app.add_subcommand("jsa", "Two-photon amplitude and marginal spectra");
  add_common(c_jsa, jsa.common);
  add_chip(c_jsa, jsa.chip);
  c_jsa->add_option("--stride", jsa.stride, "Write every n-th grid sample")->capture_default_str();
  c_jsa->add_option("--bins", jsa.bins, "Marginal histogram bins")->capture_default_str();

  HomOptions hom;
  auto* c_hom = app.add_subcommand("hom", "Coincidence probability vs arm length difference");
  add_common(c_hom, hom.common);
  add_chip(c_hom, hom.chip);
  add_scan(c_hom, hom.scan);

  SweepOptions sweep;
  auto* c_sweep = app.add_subcommand("sweep", "HOM scans with one degraded element");
  add_common(c_sweep, sweep.common);
  add_chip(c_sweep, sweep.chip);
  add_scan(c_sweep, sweep.scan);
  c_sweep->add_option("--imperfect", sweep.element, "bs, pbs, pbs-one-pol or pc")
      ->capture_default_str();
  c_sweep->add_option("--fractions", sweep.fractions, "Imperfection fractions in [0, 1]")
      ->delimiter(',');

  PcWindowOptions pcw;
  auto* c_pc = app.add_subcommand("pc-window", "Polarisation converter conversion window");
  add_common(c_pc, pcw.common);
  c_pc->add_option("--material", pcw.material, "Material coefficient file");
  c_pc->add_option("--period", pcw.period, "Converter poling period, um")->capture_default_str();
  c_pc->add_option("--pc-length", pcw.length, "Converter length, um")->capture_default_str();
  c_pc->add_option("--kappa", pcw.kappa, "Coupling, rad/um (default pi/(2 L))");
  c_pc->add_option("--voltage", pcw.voltage, "Drive voltage, V");
  c_pc->add_option("--temperature", pcw.temperature)->capture_default_str();
  c_pc->add_option("--lambda-min", pcw.lambda_min, "um");
  c_pc->add_option("--lambda-max", pcw.lambda_max, "um");
  c_pc->add_option("--points", pcw.points)->capture_default_str();

  SwitchOptions sw;
  auto* c_sw = app.add_subcommand("switch-map", "Bar-state map of a delta-beta reversal coupler");
  add_common(c_sw, sw.common);
  c_sw->add_option("--kappa-c", sw.spec.kappa_c, "rad/um")->capture_default_str();
  c_sw->add_option("--half-length", sw.spec.half_length, "um")->capture_default_str();
  c_sw->add_option("--gain", sw.spec.gain, "delta beta per volt, rad/(um V)")->capture_default_str();
  c_sw->add_option("--u1-min", sw.spec.u1_min)->capture_default_str();
  c_sw->add_option("--u1-max", sw.spec.u1_max)->capture_default_str();
  c_sw->add_option("--u2-min", sw.spec.u2_min)->capture_default_str();
  c_sw->add_option("--u2-max", sw.spec.u2_max)->capture_default_str();
  c_sw->add_option("--u1-points", sw.spec.u1_points)->capture_default_str();
  c_sw->add_option("--u2-points", sw.spec.u2_points)->capture_default_str();

  CouplerOptions cf;
  auto* c_cf = app.add_subcommand("coupler-fit", "sin^2 fit of coupler splitting ratios");
  add_common(c_cf, cf.common);
  c_cf->add_option("--data", cf.data, "CSV with a length column and ratio columns")->required();
  c_cf->add_option("--te-column", cf.te_column)->capture_default_str();
  c_cf->add_option("--tm-column", cf.tm_column)->capture_default_str();
  c_cf->add_option("--length", cf.length, "Coupler length for the PBS angles, um")
      ->capture_default_str();

  TempOptions temp;
  auto* c_temp = app.add_subcommand("temp-scan", "HOM visibility vs chip temperature");
  add_common(c_temp, temp.common);
  add_chip(c_temp, temp.chip);
  add_scan(c_temp, temp.scan);
  c_temp->add_option("--temperatures", temp.temperatures, "Explicit list, degC")->delimiter(',');
  c_temp->add_option("--t-min", temp.t_min)->capture_default_str();
  c_temp->add_option("--t-max", temp.t_max)->capture_default_str();
  c_temp->add_option("--t-step", temp.t_step)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "qpic: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (c_tuning->parsed()) return cmd_tuning(tuning, out);
    if (c_jsa->parsed()) return cmd_jsa(jsa, out);
    if (c_hom->parsed()) return cmd_hom(hom, out);
    if (c_sweep->parsed()) return cmd_sweep(sweep, out);
    if (c_pc->parsed()) return cmd_pc_window(pcw, out);
    if (c_sw->parsed()) return cmd_switch_map(sw, out);
    if (c_cf->parsed()) return cmd_coupler_fit(cf, out);
    if (c_temp->parsed()) return cmd_temp_scan(temp, out);
  } catch (const ValidationError& e) {
    err << "qpic: error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    err << "qpic: numerical error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    err << "qpic: error: " << e.what() << "\n";
    return 3;
  }
  err << app.help();
  return 2;
}

}  // namespace qpic::cli
