#include <gtest/gtest.h>

#include <cmath>

#include "qpic/circuit.hpp"
#include "qpic/error.hpp"
#include "support/gen.hpp"

namespace qpic {
namespace {

constexpr int kH1 = 0, kV1 = 1;

CircuitSpec fixture() {
  return load_netlist(QPIC_DATA_DIR "/netlists/ideal_chip.qnl");
}

TEST(Netlist, FixtureParsesInOrder) {
  const CircuitSpec spec = fixture();
  ASSERT_EQ(spec.elements.size(), 6u);
  const char* kinds[] = {"fp", "pbs", "fp", "pc", "fp", "bs"};
  for (std::size_t k = 0; k < 6; ++k) EXPECT_EQ(kind_name(spec.elements[k].params), kinds[k]);
  EXPECT_EQ(spec.find("fp2"), 2u);
  EXPECT_DOUBLE_EQ(spec.source.phase_match.pdc_length, 20700.0);
  EXPECT_DOUBLE_EQ(std::get<BsParams>(spec.elements[5].params).theta, kPi / 4);
  EXPECT_TRUE(spec.warnings.empty());
}

TEST(Netlist, FixtureMatchesReferenceChip) {
  const CircuitSpec a = fixture();
  const CircuitSpec b = reference_chip();
  test::Gen g(1);
  for (int n = 0; n < 10; ++n) {
    const double w = g.omega();
    EXPECT_LT((compose(a, w) - compose(b, w)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Netlist, EmptyIsIdentity) {
  const CircuitSpec spec = parse_netlist("# nothing\n");
  EXPECT_TRUE(spec.elements.empty());
  EXPECT_EQ(compose(spec, wavelength_to_omega(1.55)), Mat4::Identity());
}

TEST(Netlist, DuplicateKeyRejected) {
  try {
    parse_netlist("element bs\ntheta = 0.1\ntheta = 0.2\n", "t.qnl");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_NE(std::string(e.what()).find("duplicate"), std::string::npos);
  }
}

TEST(Netlist, SyntaxAndSemanticErrors) {
  EXPECT_THROW(parse_netlist("element laser\n"), ParseError);
  EXPECT_THROW(parse_netlist("element bs\ncolour = red\n"), ParseError);
  EXPECT_THROW(parse_netlist("theta = 1\n"), ParseError);
  EXPECT_THROW(parse_netlist("[source]\n[source]\n"), ParseError);
  EXPECT_THROW(parse_netlist("element fp\nl1 = 3\n"), ParseError);  // l2 missing
  try {
    parse_netlist("element bs\n\nelement fp\nname = delay\nl1 = -4\nl2 = 0\n", "c.qnl");
    FAIL();
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("fp"), std::string::npos);
    EXPECT_NE(msg.find("l1"), std::string::npos);
    EXPECT_NE(msg.find("line 3"), std::string::npos);
  }
  EXPECT_THROW(parse_netlist("element pc\nkappa = 1e-4\nvoltage = 20\n"), ParseError);
  EXPECT_THROW(parse_netlist("element bs\nname = a\nelement pbs\nname = a\n"), ParseError);
}

TEST(Netlist, OutOfRangeSplitterWarns) {
  const CircuitSpec spec = parse_netlist("element bs\ntheta = 1.2\n");
  EXPECT_EQ(spec.warnings.size(), 1u);
}

TEST(Netlist, RoundTrip) {
  const CircuitSpec a = fixture();
  const CircuitSpec b = parse_netlist(to_netlist(a), "round-trip", QPIC_DATA_DIR "/netlists");
  ASSERT_EQ(a.elements.size(), b.elements.size());
  const double w = wavelength_to_omega(1.531);
  EXPECT_EQ(compose(a, w), compose(b, w));
}

TEST(Compose, BsTwiceDoublesAngle) {
  CircuitSpec spec;
  spec.elements.push_back({"", BsParams{kPi / 4, kPi / 4}});
  spec.elements.push_back({"", BsParams{kPi / 4, kPi / 4}});
  const Mat4 u = compose(spec, 1.2);
  EXPECT_LT((u - bs_matrix(kPi / 2, kPi / 2)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Compose, ChipUnitaryAtRandomFrequencies) {
  const CircuitSpec spec = reference_chip();
  test::Gen g(77);
  for (int n = 0; n < 50; ++n) EXPECT_LT(max_unitarity_defect(compose(spec, g.omega())), 1e-12);
}

TEST(Compose, RandomCircuitsUnitary) {
  test::Gen g(123);
  const MaterialModel m = default_material();
  for (int n = 0; n < 100; ++n) {
    CircuitSpec spec;
    const int count = g.integer(1, 8);
    for (int k = 0; k < count; ++k) spec.elements.push_back({"", g.element()});
    EXPECT_LT(max_unitarity_defect(compose(spec, g.omega())), 1e-12);
  }
}

TEST(Compose, OrderMatters) {
  PcParams pc;
  pc.ideal = true;
  CircuitSpec a, b;
  a.elements = {{"", PbsParams{}}, {"", pc}};
  b.elements = {{"", pc}, {"", PbsParams{}}};
  const double w = wavelength_to_omega(1.55);
  EXPECT_GT((compose(a, w) - compose(b, w)).cwiseAbs().maxCoeff(), 0.5);
}

TEST(Routing, IdentityCircuit) {
  const RoutingCoefficients r = routing_coefficients(CircuitSpec{}, 1.0);
  EXPECT_EQ(r.A(1, Polarisation::H), cplx(1.0));
  EXPECT_EQ(r.B(1, Polarisation::V), cplx(1.0));
  EXPECT_EQ(r.a.squaredNorm(), 1.0);
  EXPECT_EQ(r.b.squaredNorm(), 1.0);
}

TEST(Routing, UnitNormAtRandomFrequencies) {
  const CircuitSpec spec = reference_chip();
  test::Gen g(8);
  for (int n = 0; n < 50; ++n) {
    const RoutingCoefficients r = routing_coefficients(spec, g.omega());
    EXPECT_NEAR(r.a.squaredNorm(), 1.0, 1e-12);
    EXPECT_NEAR(r.b.squaredNorm(), 1.0, 1e-12);
    EXPECT_NEAR(std::abs(r.a.dot(r.b)), 0.0, 1e-12);
  }
}

TEST(Routing, ConvertedPhotonEndsVertical) {
  // Without the final BS, the signal leaves the converter arm vertically.
  CircuitSpec spec = reference_chip();
  spec.elements.pop_back();
  const double w = 0.5 * spec.source.pump.omega();
  const RoutingCoefficients r = routing_coefficients(spec, w);
  const double v = std::norm(r.A(1, Polarisation::V)) + std::norm(r.A(2, Polarisation::V));
  EXPECT_NEAR(v, 1.0, 1e-6);
  EXPECT_NEAR(std::norm(r.B(2, Polarisation::V)), 1.0, 1e-12);
}

TEST(Routing, RowsOfAdjoint) {
  const CircuitSpec spec = reference_chip();
  const double w = wavelength_to_omega(1.53);
  const Mat4 u = compose(spec, w);
  const RoutingCoefficients r = routing_from_matrix(u);
  for (int m = 0; m < 4; ++m) {
    EXPECT_EQ(r.a[m], u.adjoint()(kH1, m));
    EXPECT_EQ(r.b[m], u.adjoint()(kV1, m));
  }
  // Routing the adjoint circuit's outputs back recovers the input modes.
  const Mat4 back = u.adjoint() * u;
  EXPECT_LT((back - Mat4::Identity()).cwiseAbs().maxCoeff(), 1e-12);
  const Vec4 out = u * Vec4::Unit(kV1);
  EXPECT_NEAR(std::abs(r.b.conjugate().dot(out)), 1.0, 1e-12);
}

TEST(Chip, TemperatureCopy) {
  const CircuitSpec a = reference_chip();
  const CircuitSpec b = a.at_temperature(30.0);
  EXPECT_EQ(b.material.temperature, 30.0);
  EXPECT_EQ(a.material.temperature, 24.5);
  EXPECT_THROW(a.at_temperature(1000.0), ValidationError);
}

}  // namespace
}  // namespace qpic
