#include <gtest/gtest.h>

#include <cmath>

#include "qpic/error.hpp"
#include "qpic/numeric.hpp"
#include "qpic/source.hpp"

namespace qpic {
namespace {

const MaterialModel& ln() {
  static const MaterialModel m = default_material();
  return m;
}

struct Source {
  PumpSpec pump;
  PhaseMatchSpec pm;
};

Source degenerate(double tau = 1000.0, double length = 20700.0) {
  Source s;
  s.pump.wavelength = 0.5 * degenerate_wavelength(ln(), 9.0, 24.5).wavelength;
  s.pump.tau = tau;
  s.pm.pump_wavelength = s.pump.wavelength;
  s.pm.pdc_length = length;
  return s;
}

JointSpectralAmplitude make(const Source& s, std::size_t n = 256) {
  GridSpec g;
  g.points = n;
  return build_jsa(ln(), s.pump, s.pm, g);
}

TEST(Jsa, NormalisedAndPeakOnPhaseMatchedLine) {
  const auto jsa = make(degenerate());
  EXPECT_NEAR(jsa.norm_squared(), 1.0, 1e-12);
  Eigen::Index pi, pj;
  jsa.amplitude().cwiseAbs().maxCoeff(&pi, &pj);
  // Sample closest to σ = 0, δ = δ0.
  EXPECT_NEAR(jsa.sigma(pi), 0.0, jsa.sigma(1) - jsa.sigma(0));
  EXPECT_NEAR(jsa.delta(pj), jsa.phase_matched_offset(), jsa.delta(1) - jsa.delta(0));
}

TEST(Jsa, NormalisationStableUnderRefinement) {
  const Source s = degenerate();
  const auto coarse = make(s, 257);
  const auto fine = make(s, 513);
  const double raw_coarse = 1.0 / (coarse.normalisation() * coarse.normalisation());
  const double raw_fine = 1.0 / (fine.normalisation() * fine.normalisation());
  EXPECT_LT(std::abs(raw_fine - raw_coarse) / raw_fine, 1e-4);
}

TEST(Jsa, PhaseFollowsHalfMismatch) {
  const Source s = degenerate();
  const auto jsa = make(s);
  const std::size_t i = jsa.size() / 2;
  std::size_t checked = 0;
  for (std::size_t j = 0; j < jsa.size(); ++j) {
    const double x = 0.5 * s.pm.pdc_length *
                     pdc_mismatch(ln(), s.pm, jsa.omega_s(i, j), jsa.omega_i(i, j));
    if (std::abs(x) > 0.9 * kPi) continue;  // main lobe only, sinc > 0
    const double d = std::remainder(std::arg(jsa.amplitude()(i, j)) - x, kTwoPi);
    EXPECT_LT(std::abs(d), 1e-6);
    ++checked;
  }
  EXPECT_GT(checked, 10u);
}

TEST(Jsa, GaussianEnvelopeAlongSum) {
  const Source s = degenerate(1.0);
  const auto jsa = make(s);
  const std::size_t j = jsa.size() / 2;
  // Remove the sinc factor, then fit log|F| against σ^2.
  std::vector<double> x, y;
  for (std::size_t i = 0; i < jsa.size(); ++i) {
    const double arg = 0.5 * s.pm.pdc_length *
                       pdc_mismatch(ln(), s.pm, jsa.omega_s(i, j), jsa.omega_i(i, j));
    const double sinc = arg == 0.0 ? 1.0 : std::sin(arg) / arg;
    if (std::abs(sinc) < 0.2) continue;
    x.push_back(jsa.sigma(i) * jsa.sigma(i));
    y.push_back(std::log(std::abs(jsa.amplitude()(i, j)) / std::abs(sinc)));
  }
  ASSERT_GT(x.size(), 20u);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    sx += x[k];
    sy += y[k];
    sxx += x[k] * x[k];
    sxy += x[k] * y[k];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double omega = s.pump.bandwidth();
  const double fitted = std::sqrt(-1.0 / (2.0 * slope));
  EXPECT_NEAR(fitted, omega, 0.01 * omega);
}

double sinc_width(double length) {
  const Source s = degenerate(1000.0, length);
  const auto jsa = make(s, 512);
  const std::size_t i = jsa.size() / 2;
  std::vector<double> y(jsa.size());
  for (std::size_t j = 0; j < jsa.size(); ++j) y[j] = std::abs(jsa.amplitude()(i, j));
  const auto w = peak_fwhm(jsa.delta_axis(), y);
  return w ? w->width() : NAN;
}

TEST(Jsa, SincWidthHalvesWithDoubleLength) {
  EXPECT_NEAR(sinc_width(21400) / sinc_width(10700), 0.5, 0.01);
}

TEST(Jsa, ExchangeAsymmetry) {
  const auto narrow = make(degenerate(1000.0));
  const auto wide = make(degenerate(1.0));
  const double a_ns = jsa_exchange_asymmetry(narrow);
  const double a_ps = jsa_exchange_asymmetry(wide);
  EXPECT_LT(a_ns, 0.05);
  EXPECT_GT(a_ps, a_ns);
  EXPECT_GE(a_ps, 0.0);
  EXPECT_LE(a_ps, 2.0);

  auto sym = wide;
  sym.symmetrise();
  EXPECT_LT(jsa_exchange_asymmetry(sym, ExchangeReference::Literal), 1e-14);
  EXPECT_LT(jsa_exchange_asymmetry(sym), 1e-12);
}

TEST(Jsa, TruncatedGridReported) {
  const Source s = degenerate(1.0);
  GridSpec g;
  g.points = 64;
  g.sum_span = 1.0 * s.pump.bandwidth();
  try {
    build_jsa(ln(), s.pump, s.pm, g);
    FAIL();
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("suggest"), std::string::npos);
  }
  g.check_support = false;
  EXPECT_NO_THROW(build_jsa(ln(), s.pump, s.pm, g));
}

TEST(Jsa, PumpValidation) {
  PumpSpec p;
  p.tau = 0.0;
  EXPECT_THROW(p.validate(), ValidationError);
  PhaseMatchSpec m;
  m.pdc_length = -5;
  EXPECT_THROW(m.validate(), ValidationError);
}

TEST(Marginals, DegeneratePeaksCoincide) {
  const auto jsa = make(degenerate());
  const Marginals m = marginal_spectra(jsa, 256);
  const double bin = m.signal[1].omega - m.signal[0].omega;
  EXPECT_LE(std::abs(marginal_peak(m.signal) - marginal_peak(m.idler)), bin);
}

TEST(Marginals, IntegrateToOne) {
  const auto jsa = make(degenerate(1.0));
  const Marginals m = marginal_spectra(jsa, 200);
  const double bin = m.signal[1].omega - m.signal[0].omega;
  double s = 0, i = 0;
  for (std::size_t k = 0; k < m.signal.size(); ++k) {
    s += m.signal[k].density * bin;
    i += m.idler[k].density * bin;
  }
  EXPECT_NEAR(s, 1.0, 1e-9);
  EXPECT_NEAR(i, 1.0, 1e-9);
}

TEST(Marginals, DetuningSplitsPeaks) {
  Source s = degenerate();
  GridSpec g;
  g.points = 256;
  const auto jsa = build_jsa(ln().at_temperature(27.0), s.pump, s.pm, g);
  const Marginals m = marginal_spectra(jsa, 256);
  const double split_nm = 1000.0 * (omega_to_wavelength(marginal_peak(m.signal)) -
                                    omega_to_wavelength(marginal_peak(m.idler)));
  EXPECT_GT(std::abs(split_nm), 1.0);
}

TEST(Marginals, LongSourceIsNarrowerThanOneNanometre) {
  const auto jsa = make(degenerate(1000.0, 30000.0), 512);
  const Marginals m = marginal_spectra(jsa, 512);
  std::vector<double> w, y;
  for (const auto& r : m.signal) {
    w.push_back(r.omega);
    y.push_back(r.normalised);
  }
  const auto width = peak_fwhm(w, y);
  ASSERT_TRUE(width.has_value());
  const double lam = omega_to_wavelength(width->centre());
  const double nm = 1000.0 * width->width() * lam * lam / (kTwoPi * kSpeedOfLight);
  EXPECT_LT(nm, 1.0);
}

}  // namespace
}  // namespace qpic
