#pragma once

// Reference computations that share no code path with the library
// routines they check.

#include <cmath>
#include <complex>
#include <utility>

#include "qpic/circuit.hpp"
#include "qpic/cmt.hpp"
#include "qpic/source.hpp"

namespace qpic::test {

/// Literal two-photon detection integrand on a 3x3 grid: fresh routing per
/// frequency, hand-written trapezoid weights, Jacobian 1/2.
inline double literal_coincidence_3x3(const JointSpectralAmplitude& jsa,
                                      const CircuitSpec& spec, Polarisation lb,
                                      Polarisation lc) {
  const double hs = jsa.sigma(1) - jsa.sigma(0);
  const double hd = jsa.delta(1) - jsa.delta(0);
  const double tw[3] = {0.5, 1.0, 0.5};
  double p = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double wb = jsa.centre() + 0.5 * (jsa.sigma(i) + jsa.delta(j));
      const double wc = jsa.centre() + 0.5 * (jsa.sigma(i) - jsa.delta(j));
      const cplx f_bc = jsa.amplitude()(i, j);
      const cplx f_cb = jsa.amplitude()(i, 2 - j);
      const RoutingCoefficients rb = routing_coefficients(spec, wb);
      const RoutingCoefficients rc = routing_coefficients(spec, wc);
      const cplx term = f_bc * rb.A(1, lb) * rc.B(2, lc) + f_cb * rb.B(1, lb) * rc.A(2, lc);
      p += 0.5 * tw[i] * hs * tw[j] * hd * std::norm(term);
    }
  }
  return p;
}

/// dA_TE/dz = -iκ e^{iΔβz} A_TM, dA_TM/dz = -iκ e^{-iΔβz} A_TE, classic RK4.
inline CmtState rk4_cmt(CmtState s, double kappa, double db, double z, std::size_t steps) {
  using C = std::complex<double>;
  const C i{0.0, 1.0};
  const double h = z / static_cast<double>(steps);
  auto f = [&](double zz, C te, C tm) {
    return std::pair<C, C>{-i * kappa * std::exp(i * db * zz) * tm,
                           -i * kappa * std::exp(-i * db * zz) * te};
  };
  double zz = 0.0;
  for (std::size_t n = 0; n < steps; ++n) {
    const auto k1 = f(zz, s.te, s.tm);
    const auto k2 = f(zz + h / 2, s.te + h / 2 * k1.first, s.tm + h / 2 * k1.second);
    const auto k3 = f(zz + h / 2, s.te + h / 2 * k2.first, s.tm + h / 2 * k2.second);
    const auto k4 = f(zz + h, s.te + h * k3.first, s.tm + h * k3.second);
    s.te += h / 6 * (k1.first + 2.0 * k2.first + 2.0 * k3.first + k4.first);
    s.tm += h / 6 * (k1.second + 2.0 * k2.second + 2.0 * k3.second + k4.second);
    zz += h;
  }
  s.z += z;
  return s;
}

}  // namespace qpic::test
