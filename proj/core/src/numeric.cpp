#include "qpic/numeric.hpp"

#include <algorithm>
#include <cmath>

#include "qpic/error.hpp"

namespace qpic {

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) out[i] = lo + step * static_cast<double>(i);
  if (n > 1) out.back() = hi;
  return out;
}

std::vector<double> trapezoid_weights(std::size_t n, double h) {
  std::vector<double> w(n, h);
  if (n >= 2) {
    w.front() = 0.5 * h;
    w.back() = 0.5 * h;
  }
  return w;
}

double bisect(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo);
  double fhi = f(hi);
  if (!std::isfinite(flo) || !std::isfinite(fhi)) {
    throw NumericalError("bisection: non-finite function value at bracket");
  }
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    throw NumericalError("bisection: interval does not bracket a root");
  }
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= std::min(lo, hi) || mid >= std::max(lo, hi)) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
  }
  return std::abs(flo) <= std::abs(fhi) ? lo : hi;
}

std::vector<double> find_roots(const std::function<double(double)>& f,
                               double lo, double hi, std::size_t n) {
  std::vector<double> roots;
  const auto xs = linspace(lo, hi, std::max<std::size_t>(n, 2));
  double prev = f(xs[0]);
  for (std::size_t i = 1; i < xs.size(); ++i) {
    const double cur = f(xs[i]);
    if (prev == 0.0) {
      roots.push_back(xs[i - 1]);
    } else if ((prev > 0.0) != (cur > 0.0) && cur != 0.0) {
      roots.push_back(bisect(f, xs[i - 1], xs[i]));
    }
    prev = cur;
  }
  if (prev == 0.0) roots.push_back(xs.back());
  return roots;
}

namespace {

double crossing(double x0, double y0, double x1, double y1, double level) {
  if (y1 == y0) return 0.5 * (x0 + x1);
  return x0 + (level - y0) * (x1 - x0) / (y1 - y0);
}

std::optional<WidthInfo> width_at(std::span<const double> x,
                                  std::span<const double> y,
                                  std::size_t extremum, double level,
                                  bool above) {
  // `above`: the extremum is a maximum and we walk outwards until y drops
  // below `level`; otherwise a minimum, walking until y rises above it.
  auto outside = [&](double v) { return above ? v < level : v > level; };
  WidthInfo info;
  std::size_t i = extremum;
  while (i > 0 && !outside(y[i - 1])) --i;
  if (i == 0) return std::nullopt;
  info.left = crossing(x[i - 1], y[i - 1], x[i], y[i], level);
  std::size_t j = extremum;
  while (j + 1 < y.size() && !outside(y[j + 1])) ++j;
  if (j + 1 >= y.size()) return std::nullopt;
  info.right = crossing(x[j], y[j], x[j + 1], y[j + 1], level);
  return info;
}

}  // namespace

std::optional<WidthInfo> peak_fwhm(std::span<const double> x,
                                   std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 3) return std::nullopt;
  const auto it = std::max_element(y.begin(), y.end());
  const auto idx = static_cast<std::size_t>(it - y.begin());
  return width_at(x, y, idx, 0.5 * *it, true);
}

std::optional<WidthInfo> dip_fwhm(std::span<const double> x,
                                  std::span<const double> y, double baseline) {
  if (x.size() != y.size() || x.size() < 3) return std::nullopt;
  const auto it = std::min_element(y.begin(), y.end());
  const auto idx = static_cast<std::size_t>(it - y.begin());
  return width_at(x, y, idx, 0.5 * (baseline + *it), false);
}

}  // namespace qpic
