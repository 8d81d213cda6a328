#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace qpic {

/// n evenly spaced points on [lo, hi]; n == 1 yields {lo}.
std::vector<double> linspace(double lo, double hi, std::size_t n);

/// Composite trapezoid weights for n equally spaced samples with step h.
std::vector<double> trapezoid_weights(std::size_t n, double h);

/// Bisection on a bracketing interval. f(lo) and f(hi) must differ in sign.
/// Iterates until the interval collapses to machine precision and returns
/// the endpoint with the smaller |f|.
double bisect(const std::function<double(double)>& f, double lo, double hi);

/// All sign changes of f sampled on n points of [lo, hi], each refined by
/// bisection.
std::vector<double> find_roots(const std::function<double(double)>& f,
                               double lo, double hi, std::size_t n);

/// Half-level crossing analysis of a sampled curve around its extremum.
struct WidthInfo {
  double left = 0.0;    ///< interpolated left crossing
  double right = 0.0;   ///< interpolated right crossing
  double width() const { return right - left; }
  double centre() const { return 0.5 * (left + right); }
};

/// Full width at half maximum of a peak: crossings of level peak/2 on both
/// sides of the maximum sample. Empty if a crossing is outside the samples.
std::optional<WidthInfo> peak_fwhm(std::span<const double> x,
                                   std::span<const double> y);

/// Width of a dip at the level halfway between `baseline` and the minimum.
std::optional<WidthInfo> dip_fwhm(std::span<const double> x,
                                  std::span<const double> y, double baseline);

}  // namespace qpic
