#include "qpic/source.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qpic/error.hpp"
#include "qpic/numeric.hpp"

namespace qpic {
namespace {

using cplx_t = std::complex<double>;

constexpr double kSumSigmas = 6.0;
// Half-width along δ ends on the fourth sinc zero: |Δk L/2| = 4π.
constexpr double kSincZeros = 4.0;
constexpr double kEdgeTolerance = 1e-3;

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

double inverse_group_velocity(const MaterialModel& m, Polarisation p, double w) {
  return 1.0 / group_velocity(m, p, w);
}

}  // namespace

void PumpSpec::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw ValidationError("pulse duration tau must be > 0");
  }
  if (!(wavelength >= 0.6 && wavelength <= 0.9)) {
    throw RangeError("pump wavelength outside [0.6, 0.9] um");
  }
}

double JointSpectralAmplitude::norm_squared() const {
  double acc = 0.0;
  for (std::size_t j = 0; j < n_; ++j) {
    for (std::size_t i = 0; i < n_; ++i) acc += weight(i, j) * std::norm(f_(i, j));
  }
  return acc;
}

void JointSpectralAmplitude::normalise() {
  const double norm2 = norm_squared();
  if (!(norm2 > 0.0) || !std::isfinite(norm2)) {
    throw NumericalError("two-photon amplitude vanishes on the grid");
  }
  const double scale = 1.0 / std::sqrt(norm2);
  f_ *= scale;
  c_ *= scale;
}

void JointSpectralAmplitude::symmetrise() {
  Eigen::MatrixXcd g = f_;
  for (std::size_t j = 0; j < n_; ++j) {
    g.col(j) = 0.5 * (f_.col(j) + f_.col(mirror(j)));
  }
  f_ = std::move(g);
  normalise();
}

JointSpectralAmplitude JointSpectralAmplitude::from_samples(
    double omega0, std::vector<double> sigma, std::vector<double> delta,
    Eigen::MatrixXcd amplitude) {
  const std::size_t n = sigma.size();
  if (n < 2 || delta.size() != n || amplitude.rows() != static_cast<long>(n) ||
      amplitude.cols() != static_cast<long>(n)) {
    throw ValidationError("JSA samples must form a square grid of >= 2 points");
  }
  JointSpectralAmplitude j;
  j.n_ = n;
  j.omega0_ = omega0;
  j.ws_ = trapezoid_weights(n, sigma[1] - sigma[0]);
  j.wd_ = trapezoid_weights(n, delta[1] - delta[0]);
  j.sigma_ = std::move(sigma);
  j.delta_ = std::move(delta);
  j.f_ = std::move(amplitude);
  j.normalise();
  return j;
}

GridSpans default_spans(const MaterialModel& model, const PumpSpec& pump,
                        const PhaseMatchSpec& spec) {
  const double wp = pump.omega();
  const double w0 = 0.5 * wp;
  const double kp1 = inverse_group_velocity(model, Polarisation::H, wp);
  const double ks1 = inverse_group_velocity(model, Polarisation::H, w0);
  const double ki1 = inverse_group_velocity(model, Polarisation::V, w0);
  // Linearised Δk ≈ a σ - b δ around the centre.
  const double a = kp1 - 0.5 * (ks1 + ki1);
  const double b = 0.5 * (ks1 - ki1);

  auto mismatch = [&](double d) {
    return pdc_mismatch(model, spec, w0 + 0.5 * d, w0 - 0.5 * d);
  };
  double delta0 = 0.0;
  const auto roots = find_roots(mismatch, -0.15 * w0, 0.15 * w0, 601);
  if (!roots.empty()) {
    delta0 = *std::min_element(roots.begin(), roots.end(), [](double x, double y) {
      return std::abs(x) < std::abs(y);
    });
  }
  GridSpans s;
  s.sum_span = kSumSigmas * pump.bandwidth();
  s.delta0 = delta0;
  s.diff_span = std::abs(a / b) * s.sum_span + std::abs(delta0) +
                2.0 * kSincZeros * kPi / (std::abs(b) * spec.pdc_length);
  return s;
}

JointSpectralAmplitude build_jsa(const MaterialModel& model,
                                 const PumpSpec& pump,
                                 const PhaseMatchSpec& spec,
                                 const GridSpec& grid) {
  pump.validate();
  spec.validate();
  model.validate();
  if (grid.points < 3) throw ValidationError("grid needs at least 3 points per axis");

  const GridSpans spans = default_spans(model, pump, spec);
  const double sum_span = grid.sum_span.value_or(spans.sum_span);
  const double diff_span = grid.diff_span.value_or(spans.diff_span);
  if (!(sum_span > 0.0) || !(diff_span > 0.0)) {
    throw ValidationError("grid spans must be > 0");
  }

  JointSpectralAmplitude j;
  j.n_ = grid.points;
  j.omega0_ = 0.5 * pump.omega();
  j.sigma_ = linspace(-sum_span, sum_span, grid.points);
  j.delta_ = linspace(-diff_span, diff_span, grid.points);
  j.ws_ = trapezoid_weights(grid.points, j.sigma_[1] - j.sigma_[0]);
  j.wd_ = trapezoid_weights(grid.points, j.delta_[1] - j.delta_[0]);
  j.pump_ = pump;
  j.spec_ = spec;
  j.spec_.pump_wavelength = pump.wavelength;
  j.model_ = model;
  j.delta0_ = spans.delta0;

  const std::size_t n = grid.points;
  const double omega_p = pump.omega();
  const double two_omega2 = 2.0 * pump.bandwidth() * pump.bandwidth();
  const double half_l = 0.5 * spec.pdc_length;
  Eigen::MatrixXd half_phase(n, n);
  j.f_.resize(n, n);
  for (std::size_t jj = 0; jj < n; ++jj) {
    for (std::size_t i = 0; i < n; ++i) {
      const double ws = j.omega_s(i, jj);
      const double wi = j.omega_i(i, jj);
      const double sigma = ws + wi - omega_p;
      const double x = pdc_mismatch(model, spec, ws, wi) * half_l;
      half_phase(i, jj) = x;
      const double env = std::exp(-sigma * sigma / two_omega2) * sinc(x);
      j.f_(i, jj) = env * cplx_t(std::cos(x), std::sin(x));
    }
  }
  j.c_ = 1.0;
  j.normalise();

  if (grid.check_support) {
    const double peak = j.f_.cwiseAbs().maxCoeff();
    double sum_edge = 0.0;
    for (std::size_t jj = 0; jj < n; ++jj) {
      sum_edge = std::max({sum_edge, std::abs(j.f_(0, jj)), std::abs(j.f_(n - 1, jj))});
    }
    double min_edge_phase = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      // Rows suppressed by the pump envelope cannot truncate anything.
      const double env = std::exp(-j.sigma_[i] * j.sigma_[i] / two_omega2);
      if (env < kEdgeTolerance) continue;
      min_edge_phase = std::min({min_edge_phase, std::abs(half_phase(i, 0)),
                                 std::abs(half_phase(i, n - 1))});
    }
    const bool sum_ok = sum_edge <= kEdgeTolerance * peak;
    const bool diff_ok = min_edge_phase >= (kSincZeros - 0.5) * kPi;
    if (!sum_ok || !diff_ok) {
      std::ostringstream os;
      os.precision(6);
      os << "two-photon amplitude truncated by the grid";
      if (!sum_ok) os << "; sum span " << sum_span << " rad/ps too small, suggest "
                      << spans.sum_span;
      if (!diff_ok) os << "; difference span " << diff_span
                       << " rad/ps too small, suggest " << spans.diff_span;
      throw NumericalError(os.str());
    }
  }
  return j;
}

namespace {

// Overlap h(δ_j) = Σ_i w F*(i, j) F(i, mirror j). The compensated mismatch is
// 2 ||F||^2 - 2 Re Σ_j h_j exp(i δ_j t).
struct ExchangeOverlap {
  std::vector<cplx_t> h;
  const std::vector<double>* delta;
  double norm2 = 0.0;

  double mismatch(double t) const {
    double re = 0.0;
    for (std::size_t j = 0; j < h.size(); ++j) {
      re += (h[j] * std::polar(1.0, (*delta)[j] * t)).real();
    }
    return std::max(0.0, 2.0 * norm2 - 2.0 * re);
  }
};

ExchangeOverlap exchange_overlap(const JointSpectralAmplitude& jsa) {
  const std::size_t n = jsa.size();
  const auto& f = jsa.amplitude();
  ExchangeOverlap o;
  o.h.assign(n, cplx_t(0.0, 0.0));
  o.delta = &jsa.delta_axis();
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t jm = jsa.mirror(j);
    for (std::size_t i = 0; i < n; ++i) {
      const double w = jsa.weight(i, j);
      o.h[j] += w * std::conj(f(i, j)) * f(i, jm);
      o.norm2 += w * std::norm(f(i, j));
    }
  }
  return o;
}

double best_delay(const ExchangeOverlap& o, double reach) {
  // Sample finer than the fastest oscillation, then golden-section refine.
  const double step = 0.25 * kPi / std::max(std::abs(o.delta->back()), 1e-300);
  const auto count = static_cast<std::size_t>(std::ceil(2.0 * reach / step)) + 1;
  double t_best = 0.0;
  double m_best = o.mismatch(0.0);
  for (std::size_t k = 0; k < count; ++k) {
    const double t = -reach + 2.0 * reach * static_cast<double>(k) / static_cast<double>(count - 1);
    const double m = o.mismatch(t);
    if (m < m_best) {
      m_best = m;
      t_best = t;
    }
  }
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = t_best - step, b = t_best + step;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = o.mismatch(c), fd = o.mismatch(d);
  for (int it = 0; it < 100; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = o.mismatch(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = o.mismatch(d);
    }
  }
  const double t = 0.5 * (a + b);
  return o.mismatch(t) < m_best ? t : t_best;
}

double delay_reach(const JointSpectralAmplitude& jsa) {
  const MaterialModel& m = jsa.material();
  const double w0 = jsa.centre();
  const double dk1 = 1.0 / group_velocity(m, Polarisation::H, w0) -
                     1.0 / group_velocity(m, Polarisation::V, w0);
  return 2.0 * std::abs(dk1) * jsa.phase_match().pdc_length;
}

}  // namespace

double jsa_exchange_delay(const JointSpectralAmplitude& jsa) {
  return best_delay(exchange_overlap(jsa), delay_reach(jsa));
}

double jsa_exchange_asymmetry(const JointSpectralAmplitude& jsa,
                              ExchangeReference ref) {
  const ExchangeOverlap o = exchange_overlap(jsa);
  if (!(o.norm2 > 0.0)) return 0.0;
  double t = 0.0;
  if (ref == ExchangeReference::DelayCompensated) {
    t = best_delay(o, delay_reach(jsa));
  }
  return std::sqrt(o.mismatch(t) / o.norm2);
}

namespace {

std::vector<MarginalRow> histogram(const JointSpectralAmplitude& jsa,
                                   std::size_t bins, bool signal) {
  const std::size_t n = jsa.size();
  const auto& f = jsa.amplitude();
  const double reach = 0.5 * (jsa.sigma_axis().back() + jsa.delta_axis().back());
  const double lo = jsa.centre() - reach;
  const double width = 2.0 * reach / static_cast<double>(bins);
  std::vector<double> mass(bins, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      const double w = signal ? jsa.omega_s(i, j) : jsa.omega_i(i, j);
      auto b = static_cast<std::size_t>(std::floor((w - lo) / width));
      b = std::min(b, bins - 1);
      mass[b] += jsa.weight(i, j) * std::norm(f(i, j));
    }
  }
  std::vector<MarginalRow> rows(bins);
  double peak = 0.0;
  for (std::size_t b = 0; b < bins; ++b) {
    const double w = lo + (static_cast<double>(b) + 0.5) * width;
    rows[b] = {w, omega_to_wavelength(w), mass[b] / width, 0.0};
    peak = std::max(peak, rows[b].density);
  }
  for (auto& r : rows) r.normalised = peak > 0.0 ? r.density / peak : 0.0;
  return rows;
}

}  // namespace

Marginals marginal_spectra(const JointSpectralAmplitude& jsa, std::size_t bins) {
  if (bins < 2) throw ValidationError("marginals need at least 2 bins");
  return {histogram(jsa, bins, true), histogram(jsa, bins, false)};
}

double marginal_peak(const std::vector<MarginalRow>& rows) {
  if (rows.empty()) throw ValidationError("empty marginal");
  return std::max_element(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
           return a.density < b.density;
         })->omega;
}

}  // namespace qpic
