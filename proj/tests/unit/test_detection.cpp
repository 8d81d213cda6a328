#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>

#include "qpic/detection.hpp"
#include "qpic/error.hpp"
#include "qpic/parallel.hpp"
#include "support/gen.hpp"
#include "support/oracles.hpp"

namespace qpic {
namespace {

const CoincidenceQuery kVV{Polarisation::V, Polarisation::V};

JointSpectralAmplitude chip_jsa(const CircuitSpec& spec, std::size_t n = 256) {
  GridSpec g;
  g.points = n;
  return build_jsa(spec.material, spec.source.pump, spec.source.phase_match, g);
}

const CircuitSpec& chip() {
  static const CircuitSpec c = reference_chip();
  return c;
}

const JointSpectralAmplitude& chip_jsa256() {
  static const JointSpectralAmplitude j = chip_jsa(chip());
  return j;
}

double dl_star() {
  return compensating_delay(chip().material, chip_jsa256().centre(),
                            chip().source.phase_match.pdc_length, 5000.0, 15000.0);
}

CircuitSpec with_delta_l(CircuitSpec spec, double dl) {
  auto& fp = std::get<FpParams>(spec.elements[spec.find("fp2")].params);
  fp.l2 = fp.l1 + dl;
  return spec;
}

TEST(Coincidence, MatchesLiteralOracleOnTinyGrid) {
  test::Gen g(31);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXcd f(3, 3);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) f(i, j) = cplx(g.uniform(-1, 1), g.uniform(-1, 1));
    }
    const double w0 = g.omega();
    const double s = g.uniform(0.01, 0.5), d = g.uniform(0.01, 0.5);
    const auto jsa = JointSpectralAmplitude::from_samples(w0, {-s, 0, s}, {-d, 0, d}, f);
    CircuitSpec spec;
    const int count = g.integer(1, 6);
    for (int k = 0; k < count; ++k) spec.elements.push_back({"", g.element()});
    for (Polarisation lb : {Polarisation::H, Polarisation::V}) {
      for (Polarisation lc : {Polarisation::H, Polarisation::V}) {
        const double fast = coincidence(jsa, spec, {lb, lc});
        EXPECT_NEAR(fast, test::literal_coincidence_3x3(jsa, spec, lb, lc), 1e-12);
      }
    }
  }
}

TEST(Coincidence, IdentityCircuitIsZero) {
  const CircuitSpec empty;
  EXPECT_EQ(coincidence(chip_jsa256(), empty, kVV), 0.0);
  EXPECT_EQ(coincidence(chip_jsa256(), empty, {Polarisation::H, Polarisation::V}), 0.0);
  EXPECT_EQ(coincidence_insensitive(chip_jsa256(), empty), 0.0);
}

TEST(Coincidence, InsensitiveIsOrderedSum) {
  const RoutingTable t(chip_jsa256(), chip());
  double sum = 0.0;
  for (Polarisation b : {Polarisation::H, Polarisation::V}) {
    for (Polarisation c : {Polarisation::H, Polarisation::V}) {
      sum += coincidence(chip_jsa256(), t, {b, c});
    }
  }
  EXPECT_EQ(coincidence_insensitive(chip_jsa256(), t), sum);
}

TEST(Coincidence, BoundedForRandomCircuits) {
  test::Gen g(17);
  const auto jsa = chip_jsa(chip(), 64);
  for (int n = 0; n < 30; ++n) {
    CircuitSpec spec;
    const int count = g.integer(1, 7);
    for (int k = 0; k < count; ++k) spec.elements.push_back({"", g.element()});
    const double p = coincidence_insensitive(jsa, spec);
    EXPECT_GE(p, 0.0);
    EXPECT_LE(p, 1.0 + 1e-9);
  }
}

TEST(Coincidence, TableMatchesOneOffRouting) {
  const auto& jsa = chip_jsa256();
  const RoutingTable t(jsa, chip());
  test::Gen g(4);
  for (int n = 0; n < 20; ++n) {
    const auto i = static_cast<std::size_t>(g.integer(0, 255));
    const auto j = static_cast<std::size_t>(g.integer(0, 255));
    const RoutingCoefficients r = routing_coefficients(chip(), jsa.omega_s(i, j));
    EXPECT_EQ(t.at(i, j).a, r.a);
    EXPECT_EQ(t.at(i, j).b, r.b);
  }
}

TEST(Coincidence, IdealDipAndAsymptote) {
  const auto& jsa = chip_jsa256();
  EXPECT_LT(coincidence(jsa, with_delta_l(chip(), dl_star()), kVV), 0.02);
  EXPECT_NEAR(coincidence(jsa, with_delta_l(chip(), dl_star() + 3000), kVV), 0.5, 0.02);
}

TEST(Coincidence, ExchangeOfDetectorsAndChannels) {
  // Swapping channels after the circuit and exchanging the detector
  // polarisations leaves P unchanged.
  const auto& jsa = chip_jsa256();
  for (double dl : {dl_star(), dl_star() + 150.0}) {
    CircuitSpec spec = with_delta_l(chip(), dl);
    CircuitSpec swapped = spec;
    swapped.elements.push_back({"", BsParams{kPi / 2, kPi / 2}});
    const double a = coincidence(jsa, spec, {Polarisation::H, Polarisation::V});
    const double b = coincidence(jsa, swapped, {Polarisation::V, Polarisation::H});
    EXPECT_NEAR(a, b, 1e-14);
  }
}

TEST(Coincidence, GridConvergence) {
  const auto coarse = chip_jsa(chip(), 256);
  const auto fine = chip_jsa(chip(), 511);
  for (double off : {0.0, 120.0, 300.0, 2000.0}) {
    const CircuitSpec spec = with_delta_l(chip(), dl_star() + off);
    EXPECT_LT(std::abs(coincidence(coarse, spec, kVV) - coincidence(fine, spec, kVV)), 1e-3);
  }
}

TEST(Scan, SummaryFields) {
  std::vector<ScanSample> s;
  for (int k = 0; k < 40; ++k) {
    const double x = k - 20.0;
    s.push_back({x, 0.5 - 0.4 * std::exp(-x * x / 8.0)});
  }
  const ScanResult r = summarise_scan("x", "um", s);
  EXPECT_NEAR(r.asymptote, 0.5, 1e-9);  // outer 2 + 2 samples
  EXPECT_NEAR(r.minimum, 0.1, 1e-12);
  EXPECT_EQ(r.dip_position, 0.0);
  EXPECT_NEAR(r.visibility, 0.8, 1e-9);
  EXPECT_FALSE(r.boundary_minimum);
  ASSERT_TRUE(r.dip_width.has_value());
  EXPECT_NEAR(r.dip_width->width(), 2 * std::sqrt(8.0 * std::log(2.0)), 0.3);

  std::vector<ScanSample> edge{{0, 0.1}, {1, 0.3}, {2, 0.4}};
  EXPECT_TRUE(summarise_scan("x", "", edge).boundary_minimum);
  EXPECT_THROW(summarise_scan("x", "", {}), ValidationError);
}

TEST(Scan, SamplesMatchDirectEvaluation) {
  HomScanSpec s;
  s.start = dl_star() - 200;
  s.stop = dl_star() + 200;
  s.points = 5;
  const ScanResult r = hom_scan(chip_jsa256(), chip(), s);
  ASSERT_EQ(r.samples.size(), 5u);
  for (const auto& sample : r.samples) {
    const double direct = coincidence(chip_jsa256(), with_delta_l(chip(), sample.value), kVV);
    EXPECT_NEAR(sample.probability, direct, 1e-12);
  }
}

TEST(Scan, DipAtGroupDelayOracle) {
  HomScanSpec s;
  s.start = dl_star() - 1500;
  s.stop = dl_star() + 1500;
  s.points = 121;
  const ScanResult r = hom_scan(chip_jsa256(), chip(), s);
  ASSERT_TRUE(r.dip_width.has_value());
  EXPECT_LT(std::abs(r.dip_width->centre() - dl_star()), 0.05 * r.dip_width->width());
  EXPECT_GT(r.visibility, 0.96);
}

TEST(Scan, TargetSelection) {
  HomScanSpec s;
  EXPECT_EQ(scan_target(chip(), s), 2u);
  s.element_name = "fp3";
  EXPECT_EQ(scan_target(chip(), s), 4u);
  s.element_name = "bs";
  EXPECT_THROW(scan_target(chip(), s), ValidationError);
  s.element_name.reset();
  s.element = 1;
  EXPECT_THROW(scan_target(chip(), s), ValidationError);
}

TEST(Scan, ThreadCountDoesNotChangeResults) {
  HomScanSpec s;
  s.start = dl_star() - 300;
  s.stop = dl_star() + 300;
  s.points = 7;
  setenv("QPIC_THREADS", "1", 1);
  const ScanResult a = hom_scan(chip_jsa256(), chip(), s);
  setenv("QPIC_THREADS", "5", 1);
  const ScanResult b = hom_scan(chip_jsa256(), chip(), s);
  unsetenv("QPIC_THREADS");
  for (std::size_t k = 0; k < a.samples.size(); ++k) {
    EXPECT_EQ(a.samples[k].probability, b.samples[k].probability);
  }
}

TEST(Parallel, ThreadEnvironment) {
  setenv("QPIC_THREADS", "3", 1);
  EXPECT_EQ(thread_count(), 3u);
  for (const char* bad : {"0", "-2", "two", "4x"}) {
    setenv("QPIC_THREADS", bad, 1);
    EXPECT_THROW(thread_count(), ValidationError) << bad;
  }
  unsetenv("QPIC_THREADS");
  EXPECT_GE(thread_count(), 1u);
}

TEST(Parallel, RethrowsTaskErrors) {
  std::vector<int> out(100, 0);
  parallel_for(out.size(), [&](std::size_t k) { out[k] = static_cast<int>(k); });
  EXPECT_EQ(out[99], 99);
  EXPECT_THROW(parallel_for(10, [](std::size_t k) {
                 if (k == 7) throw NumericalError("x");
               }),
               NumericalError);
}

TEST(Imperfection, AnglesFollowFraction) {
  const CircuitSpec bs = with_imperfection(chip(), ImperfectElement::BS, 0.25);
  const auto& b = std::get<BsParams>(bs.elements[5].params);
  EXPECT_NEAR(b.theta, 0.75 * kPi / 4, 1e-15);
  EXPECT_NEAR(b.xi, 0.75 * kPi / 4, 1e-15);
  const CircuitSpec one = with_imperfection(chip(), ImperfectElement::PBSOnePol, 0.5);
  const auto& p = std::get<PbsParams>(one.elements[1].params);
  EXPECT_NEAR(p.alpha, kPi / 4, 1e-15);
  EXPECT_NEAR(p.beta, kPi / 2, 1e-15);
  const CircuitSpec pc = with_imperfection(chip(), ImperfectElement::PC, 1.0);
  const auto& c = std::get<PcParams>(pc.elements[3].params);
  EXPECT_TRUE(c.ideal);
  EXPECT_NEAR(c.phi, 0.0, 1e-15);
  EXPECT_THROW(with_imperfection(chip(), ImperfectElement::BS, 1.5), ValidationError);
  EXPECT_THROW(parse_imperfect_element("laser"), ValidationError);
  EXPECT_EQ(to_string(parse_imperfect_element("pbs-one-pol")), "pbs-one-pol");
}

TEST(Imperfection, LimitingCases) {
  const auto jsa = chip_jsa(chip(), 128);
  HomScanSpec s;
  s.start = dl_star() - 1500;
  s.stop = dl_star() + 1500;
  s.points = 21;
  const auto bs = imperfection_sweep(jsa, chip(), ImperfectElement::BS, {1.0}, s);
  for (const auto& x : bs[0].scan.samples) EXPECT_NEAR(x.probability, 1.0, 1e-6);
  for (ImperfectElement e : {ImperfectElement::PBS, ImperfectElement::PC}) {
    const auto rows = imperfection_sweep(jsa, chip(), e, {0.25, 1.0}, s);
    EXPECT_LT(rows[0].scan.minimum, 0.25);
    EXPECT_LT(rows[1].scan.maximum, 0.01);
  }
}

TEST(Temperature, DegeneracyMaximisesVisibility) {
  HomScanSpec s;
  s.start = dl_star() - 2000;
  s.stop = dl_star() + 2000;
  s.points = 41;
  GridSpec g;
  g.points = 128;
  const auto rows = temperature_scan(chip(), {24.5, 25.5}, s, g);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_GT(rows[0].scan.visibility, rows[1].scan.visibility);
  EXPECT_GT(rows[1].signal_peak_wavelength, rows[1].idler_peak_wavelength);
  EXPECT_FALSE(std::isnan(rows[0].pc_wavelength));
}

}  // namespace
}  // namespace qpic
