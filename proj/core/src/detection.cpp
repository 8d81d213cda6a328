#include "qpic/detection.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "qpic/error.hpp"
#include "qpic/parallel.hpp"

namespace qpic {
namespace {

constexpr std::size_t kChunks = 64;
constexpr std::array<Polarisation, 2> kPols = {Polarisation::H, Polarisation::V};

// Splits columns [0, n) into contiguous chunks and sums the partial results in
// chunk order, so the total does not depend on the worker count.
template <class ColumnSum>
double chunked_sum(std::size_t n, ColumnSum&& column_sum) {
  const std::size_t chunks = std::min(kChunks, n);
  std::vector<double> partial(chunks, 0.0);
  parallel_for(chunks, [&](std::size_t c) {
    const std::size_t lo = c * n / chunks;
    const std::size_t hi = (c + 1) * n / chunks;
    double acc = 0.0;
    for (std::size_t j = lo; j < hi; ++j) acc += column_sum(j);
    partial[c] = acc;
  });
  return std::accumulate(partial.begin(), partial.end(), 0.0);
}

}  // namespace

RoutingTable::RoutingTable(const JointSpectralAmplitude& jsa, const CircuitSpec& spec)
    : n_(jsa.size()), data_(n_ * n_) {
  parallel_for(n_, [&](std::size_t j) {
    for (std::size_t i = 0; i < n_; ++i) {
      data_[j * n_ + i] = routing_coefficients(spec, jsa.omega_s(i, j));
    }
  });
}

double coincidence(const JointSpectralAmplitude& jsa, const RoutingTable& table,
                   const CoincidenceQuery& q) {
  const std::size_t n = jsa.size();
  if (table.size() != n) {
    throw ValidationError("routing table shape does not match the JSA grid");
  }
  const auto& f = jsa.amplitude();
  const int rb = mode_index(1, q.b);
  const int rc = mode_index(2, q.c);
  return chunked_sum(n, [&](std::size_t j) {
    const std::size_t jm = jsa.mirror(j);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const RoutingCoefficients& b = table.at(i, j);
      const RoutingCoefficients& c = table.at(i, jm);
      const cplx t = f(i, j) * b.a[rb] * c.b[rc] + f(i, jm) * b.b[rb] * c.a[rc];
      acc += jsa.weight(i, j) * std::norm(t);
    }
    return acc;
  });
}

double coincidence(const JointSpectralAmplitude& jsa, const CircuitSpec& spec,
                   const CoincidenceQuery& q) {
  return coincidence(jsa, RoutingTable(jsa, spec), q);
}

double coincidence_insensitive(const JointSpectralAmplitude& jsa,
                               const RoutingTable& table) {
  double total = 0.0;
  for (Polarisation b : kPols) {
    for (Polarisation c : kPols) total += coincidence(jsa, table, {b, c});
  }
  return total;
}

double coincidence_insensitive(const JointSpectralAmplitude& jsa,
                               const CircuitSpec& spec) {
  return coincidence_insensitive(jsa, RoutingTable(jsa, spec));
}

ScanResult summarise_scan(std::string parameter, std::string unit,
                          std::vector<ScanSample> samples) {
  if (samples.empty()) throw ValidationError("scan has no samples");
  ScanResult r;
  r.parameter = std::move(parameter);
  r.unit = std::move(unit);
  r.samples = std::move(samples);
  const auto& s = r.samples;
  const std::size_t n = s.size();

  auto by_p = [](const ScanSample& a, const ScanSample& b) {
    return a.probability < b.probability;
  };
  const auto lo = std::min_element(s.begin(), s.end(), by_p);
  const auto hi = std::max_element(s.begin(), s.end(), by_p);
  r.minimum = lo->probability;
  r.maximum = hi->probability;
  r.dip_position = lo->value;
  r.peak_position = hi->value;
  r.boundary_minimum = lo == s.begin() || lo == s.end() - 1;

  const std::size_t outer = std::max<std::size_t>(1, n / 20);
  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (k < outer || k >= n - outer) {
      acc += s[k].probability;
      ++count;
    }
  }
  r.asymptote = acc / static_cast<double>(count);
  if (r.asymptote > 1e-12) {
    r.visibility = std::clamp((r.asymptote - r.minimum) / r.asymptote, 0.0, 1.0);
  }

  std::vector<double> x(n), y(n);
  for (std::size_t k = 0; k < n; ++k) {
    x[k] = s[k].value;
    y[k] = s[k].probability;
  }
  r.dip_width = dip_fwhm(x, y, r.asymptote);
  return r;
}

std::size_t scan_target(const CircuitSpec& spec, const HomScanSpec& scan) {
  std::size_t k = 0;
  if (scan.element) {
    k = *scan.element;
    if (k >= spec.elements.size()) throw ValidationError("scan element index out of range");
  } else if (scan.element_name) {
    k = spec.find(*scan.element_name);
  } else {
    bool named = false;
    for (std::size_t e = 0; e < spec.elements.size(); ++e) {
      if (spec.elements[e].name == "fp2") {
        k = e;
        named = true;
      }
    }
    if (!named) {
      const auto fps = spec.indices_of("fp");
      if (fps.size() < 2) {
        throw ValidationError("HOM scan needs a second fp element (or an explicit target)");
      }
      k = fps[1];
    }
  }
  if (!std::holds_alternative<FpParams>(spec.elements[k].params)) {
    throw ValidationError("HOM scan target must be an fp element");
  }
  return k;
}

namespace {

// U(ω)[r, c] = konst + g2 exp(i k_H l2) + g3 exp(i k_V l2) for the scanned
// FP element; everything else is folded into the three coefficients.
struct Entry {
  cplx konst, g2, g3;
};

class ScanEngine {
 public:
  ScanEngine(const JointSpectralAmplitude& jsa, const CircuitSpec& spec,
             std::size_t target, std::vector<int> rows)
      : n_(jsa.size()), rows_(std::move(rows)), stride_(2 * rows_.size()),
        entries_(n_ * n_ * stride_), kh_(n_ * n_), kv_(n_ * n_) {
    const auto& fp = std::get<FpParams>(spec.elements[target].params);
    const double l1 = fp.l1;
    parallel_for(n_, [&](std::size_t j) {
      for (std::size_t i = 0; i < n_; ++i) {
        const double w = jsa.omega_s(i, j);
        Mat4 pre = Mat4::Identity();
        Mat4 post = Mat4::Identity();
        for (std::size_t e = 0; e < spec.elements.size(); ++e) {
          if (e == target) continue;
          const Mat4 m = element_matrix(spec.elements[e].params, spec.material, w);
          if (e < target) pre = m * pre;
          else post = m * post;
        }
        const Eigen::Vector4d k = fp_wavenumbers(spec.material, w);
        const std::size_t p = j * n_ + i;
        kh_[p] = k[2];
        kv_[p] = k[3];
        const cplx d0 = std::exp(cplx(0.0, k[0] * l1));
        const cplx d1 = std::exp(cplx(0.0, k[1] * l1));
        Entry* out = &entries_[p * stride_];
        for (int col = 0; col < 2; ++col) {
          for (std::size_t r = 0; r < rows_.size(); ++r) {
            const int row = rows_[r];
            Entry& en = out[col * rows_.size() + r];
            en.konst = post(row, 0) * d0 * pre(0, col) + post(row, 1) * d1 * pre(1, col);
            en.g2 = post(row, 2) * pre(2, col);
            en.g3 = post(row, 3) * pre(3, col);
          }
        }
      }
    });
  }

  /// conj(U[row, col]) at sample p for lower-channel length l2.
  cplx coefficient(std::size_t p, int col, std::size_t r, const cplx& eh,
                   const cplx& ev) const {
    const Entry& en = entries_[p * stride_ + col * rows_.size() + r];
    return std::conj(en.konst + en.g2 * eh + en.g3 * ev);
  }

  double probability(const JointSpectralAmplitude& jsa, double l2,
                     const std::vector<std::pair<std::size_t, std::size_t>>& pairs) const {
    const auto& f = jsa.amplitude();
    double total = 0.0;
    for (const auto& [rb, rc] : pairs) {
      total += chunked_sum(n_, [&](std::size_t j) {
        const std::size_t jm = jsa.mirror(j);
        double acc = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
          const std::size_t pb = j * n_ + i;
          const std::size_t pc = jm * n_ + i;
          const cplx ehb = std::exp(cplx(0.0, kh_[pb] * l2));
          const cplx evb = std::exp(cplx(0.0, kv_[pb] * l2));
          const cplx ehc = std::exp(cplx(0.0, kh_[pc] * l2));
          const cplx evc = std::exp(cplx(0.0, kv_[pc] * l2));
          const cplx a1 = coefficient(pb, 0, rb, ehb, evb);
          const cplx b1 = coefficient(pb, 1, rb, ehb, evb);
          const cplx a2 = coefficient(pc, 0, rc, ehc, evc);
          const cplx b2 = coefficient(pc, 1, rc, ehc, evc);
          const cplx t = f(i, j) * a1 * b2 + f(i, jm) * b1 * a2;
          acc += jsa.weight(i, j) * std::norm(t);
        }
        return acc;
      });
    }
    return total;
  }

 private:
  std::size_t n_;
  std::vector<int> rows_;
  std::size_t stride_;
  std::vector<Entry> entries_;
  std::vector<double> kh_, kv_;
};

}  // namespace

ScanResult hom_scan(const JointSpectralAmplitude& jsa, const CircuitSpec& spec,
                    const HomScanSpec& scan) {
  if (scan.points < 2 || !(scan.stop > scan.start)) {
    throw ValidationError("HOM scan range must be non-degenerate with >= 2 points");
  }
  const std::size_t target = scan_target(spec, scan);
  const double l1 = std::get<FpParams>(spec.elements[target].params).l1;
  if (l1 + scan.start < 0.0) {
    throw RangeError("HOM scan start gives a negative fp length");
  }

  // Row slots: detector b reads channel 1, detector c channel 2.
  std::vector<int> rows;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  if (scan.insensitive) {
    rows = {0, 1, 2, 3};
    for (Polarisation b : kPols) {
      for (Polarisation c : kPols) {
        pairs.emplace_back(mode_index(1, b), mode_index(2, c));
      }
    }
  } else {
    rows = {mode_index(1, scan.query.b), mode_index(2, scan.query.c)};
    pairs.emplace_back(0, 1);
  }
  const ScanEngine engine(jsa, spec, target, rows);

  std::vector<ScanSample> samples;
  samples.reserve(scan.points);
  for (double dl : linspace(scan.start, scan.stop, scan.points)) {
    samples.push_back({dl, engine.probability(jsa, l1 + dl, pairs)});
  }
  return summarise_scan("delta_l", "um", std::move(samples));
}

double compensating_delay(const MaterialModel& model, double omega,
                          double pdc_length, double y, double l) {
  const double ngh = group_index(model, Polarisation::H, omega);
  const double ngv = group_index(model, Polarisation::V, omega);
  return (0.5 * pdc_length + y + l) * (ngh - ngv) / ngv;
}

ImperfectElement parse_imperfect_element(const std::string& name) {
  if (name == "bs") return ImperfectElement::BS;
  if (name == "pbs") return ImperfectElement::PBS;
  if (name == "pbs-one-pol") return ImperfectElement::PBSOnePol;
  if (name == "pc") return ImperfectElement::PC;
  throw ValidationError("unknown element selector '" + name +
                        "' (expected bs, pbs, pbs-one-pol or pc)");
}

std::string to_string(ImperfectElement e) {
  switch (e) {
    case ImperfectElement::BS: return "bs";
    case ImperfectElement::PBS: return "pbs";
    case ImperfectElement::PBSOnePol: return "pbs-one-pol";
    case ImperfectElement::PC: return "pc";
  }
  return "?";
}

CircuitSpec with_imperfection(const CircuitSpec& base, ImperfectElement which,
                              double fraction) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw RangeError("imperfection fraction must lie in [0, 1]");
  }
  const double keep = 1.0 - fraction;
  CircuitSpec spec = base;
  for (CircuitElement& e : spec.elements) {
    if (auto* p = std::get_if<PbsParams>(&e.params)) {
      p->alpha = p->beta = kPi / 2;
      if (which == ImperfectElement::PBS) p->alpha = p->beta = kPi / 2 * keep;
      if (which == ImperfectElement::PBSOnePol) p->alpha = kPi / 2 * keep;
    } else if (auto* b = std::get_if<BsParams>(&e.params)) {
      b->theta = b->xi = kPi / 4;
      if (which == ImperfectElement::BS) b->theta = b->xi = kPi / 4 * keep;
    } else if (auto* c = std::get_if<PcParams>(&e.params)) {
      c->ideal = true;
      c->phi = kPi / 2;
      if (which == ImperfectElement::PC) c->phi = kPi / 2 * keep;
    }
  }
  return spec;
}

std::vector<SweepRow> imperfection_sweep(const JointSpectralAmplitude& jsa,
                                         const CircuitSpec& base,
                                         ImperfectElement which,
                                         const std::vector<double>& fractions,
                                         const HomScanSpec& scan) {
  for (double f : fractions) {
    if (!(f >= 0.0 && f <= 1.0)) throw RangeError("imperfection fraction must lie in [0, 1]");
  }
  std::vector<SweepRow> rows;
  rows.reserve(fractions.size());
  for (double f : fractions) {
    rows.push_back({f, hom_scan(jsa, with_imperfection(base, which, f), scan)});
  }
  return rows;
}

std::vector<TemperatureRow> temperature_scan(const CircuitSpec& spec,
                                             const std::vector<double>& temperatures,
                                             const HomScanSpec& scan,
                                             const GridSpec& grid) {
  if (temperatures.empty()) throw ValidationError("temperature list is empty");
  for (double t : temperatures) spec.at_temperature(t);  // validate up front
  const auto pcs = spec.indices_of("pc");

  std::vector<TemperatureRow> rows;
  rows.reserve(temperatures.size());
  for (double t : temperatures) {
    const CircuitSpec at_t = spec.at_temperature(t);
    const JointSpectralAmplitude jsa =
        build_jsa(at_t.material, at_t.source.pump, at_t.source.phase_match, grid);
    TemperatureRow row;
    row.temperature = t;
    row.scan = hom_scan(jsa, at_t, scan);
    row.marginals = marginal_spectra(jsa);
    row.signal_peak_wavelength = omega_to_wavelength(marginal_peak(row.marginals.signal));
    row.idler_peak_wavelength = omega_to_wavelength(marginal_peak(row.marginals.idler));
    row.pc_wavelength = std::numeric_limits<double>::quiet_NaN();
    if (!pcs.empty()) {
      const auto& pc = std::get<PcParams>(at_t.elements[pcs.front()].params);
      if (!pc.ideal) {
        try {
          row.pc_wavelength = pc_phase_matched_wavelength(at_t.material, pc.period, t).wavelength;
        } catch (const NumericalError&) {
        }
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace qpic
