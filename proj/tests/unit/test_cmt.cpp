#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "qpic/cmt.hpp"
#include "qpic/error.hpp"
#include "support/gen.hpp"
#include "support/oracles.hpp"

namespace qpic {
namespace {

using C = std::complex<double>;

const MaterialModel& ln() {
  static const MaterialModel m = default_material();
  return m;
}

TEST(Cmt, CompleteConversion) {
  const double kappa = 2e-4;
  const CmtState out = cmt_evolve({}, kappa, 0.0, kPi / (2 * kappa));
  EXPECT_NEAR(std::abs(out.te), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(out.tm - C(0, -1)), 0.0, 1e-12);
  EXPECT_NEAR(out.z, kPi / (2 * kappa), 1e-9);
}

TEST(Cmt, PowerConserved) {
  test::Gen g(10);
  for (int n = 0; n < 200; ++n) {
    CmtState in{C(g.uniform(-1, 1), g.uniform(-1, 1)), C(g.uniform(-1, 1), g.uniform(-1, 1))};
    const CmtState out =
        cmt_evolve(in, g.uniform(0, 1e-3), g.uniform(-2e-3, 2e-3), g.uniform(0, 20000));
    EXPECT_NEAR(out.power(), in.power(), 1e-12 * in.power());
  }
}

TEST(Cmt, UnconvertedFollowsCosSquared) {
  const double length = 7600;
  for (double kl = 0.0; kl <= kPi; kl += 0.1) {
    const CmtState out = cmt_evolve({}, kl / length, 0.0, length);
    EXPECT_NEAR(std::norm(out.te), std::pow(std::cos(kl), 2), 1e-12);
  }
}

TEST(Cmt, ClosedFormMatchesOdeIntegration) {
  test::Gen g(42);
  for (int n = 0; n < 12; ++n) {
    const double kappa = g.uniform(5e-5, 5e-4);
    const double db = g.uniform(-1e-3, 1e-3);
    const double s = std::hypot(kappa, 0.5 * db);
    const double beat = kPi / s;
    const CmtState in{C(g.uniform(-1, 1), g.uniform(-1, 1)), C(g.uniform(-1, 1), g.uniform(-1, 1))};
    for (double frac : {0.37, 1.0, 2.2, 3.0}) {
      const double z = frac * beat;
      const CmtState a = cmt_evolve(in, kappa, db, z);
      const CmtState b = test::rk4_cmt(in, kappa, db, z, 4000);
      EXPECT_LT(std::abs(a.te - b.te), 1e-8);
      EXPECT_LT(std::abs(a.tm - b.tm), 1e-8);
    }
  }
}

TEST(Cmt, ConversionFraction) {
  EXPECT_NEAR(conversion_fraction(1e-4, 0.0, kPi / 2e-4), 1.0, 1e-12);
  const CmtState out = cmt_evolve({}, 1.3e-4, 4e-4, 9000);
  EXPECT_NEAR(conversion_fraction(1.3e-4, 4e-4, 9000), std::norm(out.tm), 1e-12);
  EXPECT_THROW(cmt_evolve({}, 1e-4, 0.0, -1.0), ValidationError);
}

std::vector<SpectrumRow> window(double length, double period = 21.4, std::size_t points = 4001) {
  return pc_spectrum(ln(), period, length, kPi / (2 * length), 24.5, 1.548, 1.588, points);
}

TEST(PcSpectrum, FwhmNearThreeNanometres) {
  const auto w = spectrum_fwhm(window(7600));
  ASSERT_TRUE(w.has_value());
  EXPECT_NEAR(w->width() * 1000, 3.2, 0.3 * 3.2);
}

TEST(PcSpectrum, InverseLengthLaw) {
  const double a = spectrum_fwhm(window(7600))->width();
  const double b = spectrum_fwhm(window(15200))->width();
  EXPECT_NEAR(b / a, 0.5, 0.01);
}

TEST(PcSpectrum, PeakIsUnityAtZeroCrossing) {
  const auto rows = window(7600);
  auto best = rows.front();
  for (const auto& r : rows) {
    EXPECT_GE(r.converted, 0.0);
    EXPECT_LE(r.converted, 1.0 + 1e-12);
    if (r.converted > best.converted) best = r;
  }
  EXPECT_NEAR(best.converted, 1.0, 1e-4);
  const double step = rows[1].wavelength - rows[0].wavelength;
  const double zero = pc_phase_matched_wavelength(ln(), 21.4, 24.5).wavelength;
  EXPECT_LE(std::abs(best.wavelength - zero), step);
}

TEST(SwitchMap, CrossAtZeroVoltsAndFullRange) {
  const SwitchMapSpec spec;
  EXPECT_NEAR(spec.kappa_c * 2 * spec.half_length, kPi / 2, 1e-12);
  EXPECT_LT(bar_transmission(spec.kappa_c, spec.half_length, 0, 0), 1e-20);
  const SwitchMap m = switch_map(spec);
  EXPECT_LT(m.min(), 0.01);
  EXPECT_GT(m.max(), 0.99);
  for (const auto& row : m.bar) {
    for (double v : row) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0 + 1e-12);
    }
  }
}

TEST(SwitchMap, SymmetricInVoltages) {
  SwitchMapSpec spec;
  spec.u1_points = spec.u2_points = 41;
  const SwitchMap m = switch_map(spec);
  for (std::size_t a = 0; a < 41; ++a) {
    for (std::size_t b = 0; b < 41; ++b) EXPECT_NEAR(m.bar[a][b], m.bar[b][a], 1e-12);
  }
}

TEST(Coupler, FitRecoversSyntheticOptima) {
  const std::string path = QPIC_DATA_DIR "/coupler/synthetic_splitting.csv";
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  const auto te = read_coupler_samples(buf.str(), path, "ratio_te");
  const auto tm = read_coupler_samples(buf.str(), path, "ratio_tm");
  const CouplerFit fit = fit_coupler(te, tm);
  EXPECT_NEAR(fit.te.optimum_length, 450, 5);
  EXPECT_NEAR(fit.tm.optimum_length, 530, 5);
  EXPECT_LT(fit.te.rms_residual, 0.005);
  EXPECT_LE(splitting_ratio(fit, 500, Polarisation::H), std::pow(10.0, -1.7));
  EXPECT_LE(splitting_ratio(fit, 500, Polarisation::V), std::pow(10.0, -1.7));
  EXPECT_NEAR(splitting_ratio(fit, fit.te.optimum_length, Polarisation::H), 0.0, 1e-15);
}

TEST(Coupler, FitExactModel) {
  CouplerPolFit truth{640.0, 470.0, 0.0};
  std::vector<CouplerSample> data;
  for (double l = 250; l <= 750; l += 10) {
    data.push_back({l, std::pow(std::sin(kPi * (l - truth.optimum_length) / (2 * truth.beat_length)), 2)});
  }
  const CouplerPolFit fit = fit_coupler_polarisation(data);
  EXPECT_NEAR(fit.beat_length, 640.0, 1e-4);
  EXPECT_NEAR(fit.optimum_length, 470.0, 1e-4);
  EXPECT_LT(fit.rms_residual, 1e-8);
}

TEST(Coupler, PbsAngles) {
  CouplerFit fit;
  fit.te = {700, 500, 0};
  fit.tm = {700, 500, 0};
  const PbsAngles a = pbs_angles(fit, 500);
  EXPECT_NEAR(a.alpha, kPi / 2, 1e-12);
  EXPECT_NEAR(a.beta, kPi / 2, 1e-12);
  const PbsAngles b = pbs_angles(fit, 850);
  EXPECT_NEAR(std::pow(std::cos(b.alpha), 2), splitting_ratio(fit, 850, Polarisation::H), 1e-12);
}

TEST(Coupler, CsvErrors) {
  EXPECT_THROW(read_coupler_samples("length,ratio\n1,abc\n", "x", "ratio"), ValidationError);
  EXPECT_THROW(read_coupler_samples("len,ratio\n1,0.1\n", "x", "ratio"), ValidationError);
  EXPECT_THROW(read_coupler_samples("length,ratio\n1,0.1\n", "x", "ratio_te"), ValidationError);
  const auto s = read_coupler_samples("length,ratio\n1,0.1\n2,\n3,0.3\n", "x", "ratio");
  EXPECT_EQ(s.size(), 2u);
  EXPECT_THROW(fit_coupler_polarisation({{1, 0.1}, {2, 0.2}}), ValidationError);
}

TEST(Coupler, FormatIsKeyValue) {
  CouplerFit fit;
  const std::string text = format_coupler_fit(fit);
  EXPECT_NE(text.find("[te]"), std::string::npos);
  EXPECT_NE(text.find("[tm]"), std::string::npos);
  EXPECT_NE(text.find("beat_length = "), std::string::npos);
}

}  // namespace
}  // namespace qpic
