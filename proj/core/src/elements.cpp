#include "qpic/elements.hpp"

#include <cmath>
#include <sstream>

#include "qpic/error.hpp"

namespace qpic {
namespace {

constexpr cplx kI{0.0, 1.0};

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw ValidationError(std::string(what) + " must be finite");
  }
}

void require_channel(int ch) {
  if (ch != 1 && ch != 2) throw ValidationError("channel must be 1 or 2");
}

Mat4 on_channel(const Mat4& m1, int channel) {
  if (channel == 1) return m1;
  const Mat4 p = channel_swap();
  return p * m1 * p;
}

}  // namespace

std::string kind_name(const ElementParams& p) {
  return std::visit(overloaded{
                        [](const PbsParams&) { return std::string("pbs"); },
                        [](const BsParams&) { return std::string("bs"); },
                        [](const PmParams&) { return std::string("pm"); },
                        [](const PcParams&) { return std::string("pc"); },
                        [](const FpParams&) { return std::string("fp"); },
                        [](const EobsParams&) { return std::string("eobs"); },
                    },
                    p);
}

Mat4 channel_swap() {
  Mat4 p = Mat4::Zero();
  p(0, 2) = p(2, 0) = p(1, 3) = p(3, 1) = 1.0;
  return p;
}

Mat4 pbs_matrix(double alpha, double beta) {
  require_finite(alpha, "alpha");
  require_finite(beta, "beta");
  Mat4 m = Mat4::Zero();
  const double sa = std::sin(alpha), ca = std::cos(alpha);
  const double sb = std::sin(beta), cb = std::cos(beta);
  m(0, 0) = kI * sa;
  m(0, 2) = ca;
  m(1, 1) = kI * cb;
  m(1, 3) = sb;
  m(2, 0) = ca;
  m(2, 2) = kI * sa;
  m(3, 1) = sb;
  m(3, 3) = kI * cb;
  return m;
}

Mat4 bs_matrix(double theta, double xi) {
  require_finite(theta, "theta");
  require_finite(xi, "xi");
  Mat4 m = Mat4::Zero();
  const double st = std::sin(theta), ct = std::cos(theta);
  const double sx = std::sin(xi), cx = std::cos(xi);
  m(0, 0) = ct;
  m(0, 2) = kI * st;
  m(1, 1) = cx;
  m(1, 3) = kI * sx;
  m(2, 0) = kI * st;
  m(2, 2) = ct;
  m(3, 1) = kI * sx;
  m(3, 3) = cx;
  return m;
}

Mat4 pm_matrix(double phi_h, double phi_v, int channel) {
  require_finite(phi_h, "phi_h");
  require_finite(phi_v, "phi_v");
  require_channel(channel);
  Mat4 m = Mat4::Identity();
  m(0, 0) = std::exp(kI * phi_h);
  m(1, 1) = std::exp(kI * phi_v);
  return on_channel(m, channel);
}

Mat4 pc_matrix(const MaterialModel& model, const PcParams& p, double omega) {
  require_channel(p.channel);
  double a = 0.0, b = 1.0, phi = p.phi;
  if (!p.ideal) {
    const double lambda = omega_to_wavelength(omega);
    const double half_dk = 0.5 * pc_mismatch(model, p.period, lambda, model.temperature);
    const double s = std::hypot(p.kappa, half_dk);
    if (s == 0.0) {
      b = 0.0;
      phi = 0.0;
    } else {
      a = half_dk / s;
      b = p.kappa / s;
      phi = s * p.length;
    }
  }
  const double sp = std::sin(phi), cp = std::cos(phi);
  Mat4 m = Mat4::Identity();
  m(0, 0) = cplx(cp, a * sp);
  m(0, 1) = -b * sp;
  m(1, 0) = b * sp;
  m(1, 1) = cplx(cp, -a * sp);
  return on_channel(m, p.channel);
}

Eigen::Vector4d fp_wavenumbers(const MaterialModel& model, double omega) {
  const double lambda = omega_to_wavelength(omega);
  const double kh = index(model, Polarisation::H, lambda) * omega / kSpeedOfLight;
  const double kv = index(model, Polarisation::V, lambda) * omega / kSpeedOfLight;
  return {kh, kv, kh, kv};
}

Mat4 fp_matrix(const MaterialModel& model, double l1, double l2, double omega) {
  if (!(l1 >= 0.0) || !(l2 >= 0.0)) {
    throw ValidationError("free propagation lengths must be >= 0");
  }
  const Eigen::Vector4d k = fp_wavenumbers(model, omega);
  Mat4 m = Mat4::Zero();
  m(0, 0) = std::exp(kI * (k[0] * l1));
  m(1, 1) = std::exp(kI * (k[1] * l1));
  m(2, 2) = std::exp(kI * (k[2] * l2));
  m(3, 3) = std::exp(kI * (k[3] * l2));
  return m;
}

Mat2 coupler_section(double kappa, double delta_beta, double z) {
  const double half = 0.5 * delta_beta;
  const double s = std::hypot(kappa, half);
  Mat2 m;
  if (s == 0.0) return Mat2::Identity();
  const double ss = std::sin(s * z), cs = std::cos(s * z);
  m(0, 0) = cplx(cs, -half / s * ss);
  m(1, 1) = cplx(cs, half / s * ss);
  m(0, 1) = m(1, 0) = cplx(0.0, -kappa / s * ss);
  return m;
}

Mat4 eo_bs_matrix(const EobsParams& p) {
  if (!(p.half_length > 0.0)) throw ValidationError("half_length must be > 0");
  auto branch = [&](const EobsBranch& b) {
    return Mat2(coupler_section(b.kappa_c, b.delta_beta_2, p.half_length) *
                coupler_section(b.kappa_c, b.delta_beta_1, p.half_length));
  };
  const Mat2 h = branch(p.h);
  const Mat2 v = branch(p.v);
  Mat4 m = Mat4::Zero();
  m(0, 0) = h(0, 0);
  m(0, 2) = h(0, 1);
  m(2, 0) = h(1, 0);
  m(2, 2) = h(1, 1);
  m(1, 1) = v(0, 0);
  m(1, 3) = v(0, 1);
  m(3, 1) = v(1, 0);
  m(3, 3) = v(1, 1);
  return m;
}

Mat4 element_matrix(const ElementParams& p, const MaterialModel& model,
                    double omega) {
  return std::visit(
      overloaded{
          [](const PbsParams& e) { return pbs_matrix(e.alpha, e.beta); },
          [](const BsParams& e) { return bs_matrix(e.theta, e.xi); },
          [](const PmParams& e) { return pm_matrix(e.phi_h, e.phi_v, e.channel); },
          [&](const PcParams& e) { return pc_matrix(model, e, omega); },
          [&](const FpParams& e) { return fp_matrix(model, e.l1, e.l2, omega); },
          [](const EobsParams& e) { return eo_bs_matrix(e); },
      },
      p);
}

std::string validate_params(const ElementParams& p) {
  return std::visit(
      overloaded{
          [](const PbsParams& e) -> std::string {
            require_finite(e.alpha, "alpha");
            require_finite(e.beta, "beta");
            if (e.alpha < 0 || e.alpha > kPi / 2 || e.beta < 0 || e.beta > kPi / 2) {
              throw RangeError("pbs angles alpha, beta must lie in [0, pi/2]");
            }
            return {};
          },
          [](const BsParams& e) -> std::string {
            require_finite(e.theta, "theta");
            require_finite(e.xi, "xi");
            if (e.theta < 0 || e.theta > kPi / 4 || e.xi < 0 || e.xi > kPi / 4) {
              return "bs angles outside [0, pi/4]";
            }
            return {};
          },
          [](const PmParams& e) -> std::string {
            require_finite(e.phi_h, "phi_h");
            require_finite(e.phi_v, "phi_v");
            require_channel(e.channel);
            return {};
          },
          [](const PcParams& e) -> std::string {
            require_channel(e.channel);
            if (!(e.length > 0.0)) throw RangeError("pc length must be > 0");
            if (!(e.kappa >= 0.0)) throw RangeError("pc kappa must be >= 0");
            if (!(e.period > 0.0)) throw RangeError("pc period must be > 0");
            require_finite(e.phi, "phi");
            return {};
          },
          [](const FpParams& e) -> std::string {
            if (!(e.l1 >= 0.0) || !(e.l2 >= 0.0) || !std::isfinite(e.l1) ||
                !std::isfinite(e.l2)) {
              throw RangeError("fp lengths l1, l2 must be finite and >= 0");
            }
            return {};
          },
          [](const EobsParams& e) -> std::string {
            if (!(e.half_length > 0.0)) throw RangeError("eobs half_length must be > 0");
            for (const EobsBranch* b : {&e.h, &e.v}) {
              require_finite(b->kappa_c, "kappa_c");
              require_finite(b->delta_beta_1, "delta_beta_1");
              require_finite(b->delta_beta_2, "delta_beta_2");
              if (b->kappa_c < 0) throw RangeError("eobs kappa_c must be >= 0");
            }
            return {};
          },
      },
      p);
}

double max_unitarity_defect(const Mat4& u) {
  return (u.adjoint() * u - Mat4::Identity()).cwiseAbs().maxCoeff();
}

ElementMatrix::ElementMatrix(ElementParams params,
                             std::shared_ptr<const MaterialModel> model)
    : params_(std::move(params)), model_(std::move(model)) {
  validate_params(params_);
  const bool needs_model = std::holds_alternative<PcParams>(params_) ||
                           std::holds_alternative<FpParams>(params_);
  if (needs_model && !model_) {
    throw ValidationError(kind_name(params_) + " needs a material model");
  }
}

Mat4 ElementMatrix::evaluate(double omega) const {
  static const MaterialModel unused = default_material();
  return element_matrix(params_, model_ ? *model_ : unused, omega);
}

std::string ElementMatrix::label() const {
  std::ostringstream os;
  os.precision(6);
  os << kind_name(params_);
  std::visit(overloaded{
                 [&](const PbsParams& e) { os << " alpha=" << e.alpha << " beta=" << e.beta; },
                 [&](const BsParams& e) { os << " theta=" << e.theta << " xi=" << e.xi; },
                 [&](const PmParams& e) {
                   os << " phi_h=" << e.phi_h << " phi_v=" << e.phi_v
                      << " channel=" << e.channel;
                 },
                 [&](const PcParams& e) {
                   if (e.ideal) {
                     os << " ideal phi=" << e.phi;
                   } else {
                     os << " period=" << e.period << " length=" << e.length
                        << " kappa=" << e.kappa;
                   }
                   os << " channel=" << e.channel;
                 },
                 [&](const FpParams& e) { os << " l1=" << e.l1 << " l2=" << e.l2; },
                 [&](const EobsParams& e) {
                   os << " half_length=" << e.half_length << " kappa_c=" << e.h.kappa_c
                      << " delta_beta_1=" << e.h.delta_beta_1
                      << " delta_beta_2=" << e.h.delta_beta_2;
                 },
             },
             params_);
  return os.str();
}

PmParams pm_from_voltage(double u, const VoltageCalibration& cal) {
  if (!(cal.pm_u_pi > 0.0)) throw ValidationError("u_pi must be > 0");
  PmParams p;
  p.phi_v = kPi * u / cal.pm_u_pi;
  p.phi_h = p.phi_v / 3.0;
  return p;
}

double pc_kappa_from_voltage(double u, const VoltageCalibration& cal) {
  return cal.pc_kappa_per_volt * (u - cal.pc_offset);
}

double eobs_delta_beta(double u, const VoltageCalibration& cal) {
  return cal.eobs_gain * u;
}

}  // namespace qpic
