#pragma once

#include <string_view>

#include "cbs/spectrum.hpp"

namespace cbs {

enum class LineShape { lorentzian_positive, lorentzian_negative, dispersive };
std::string_view to_string(LineShape s);

struct PeakReport {
  double center = 0.0;
  double window = 0.0;        ///< half-width of the integration window
  double weight = 0.0;        ///< integral of the density over the window
  double abs_integral = 0.0;  ///< integral of |density| over the window
  double even_fraction = 0.0; ///< share of the squared norm in the even part about center
  double odd_fraction = 0.0;
  LineShape shape = LineShape::lorentzian_positive;
  /// |weight| < 5% of abs_integral. Expected for dispersive lines; tails of
  /// neighbouring peaks can spoil it at moderate Omega.
  bool null_weight = false;
};

inline constexpr double kDominance = 0.9;
inline constexpr double kNullWeightFraction = 0.05;

/// Default window: min(Omega/4, 25 gamma).
double default_peak_window(const PhysParams& params);

/// Integral of one channel over [center - window, center + window]. The
/// window must satisfy 10 gamma <= window <= Omega/4.
double peak_weight(const SpectrumResult& spec, Channel which, double center, double window);

/// Classifies the resonance at `center` from the even/odd split of the
/// density about it: even dominance gives a Lorentzian signed by the weight,
/// odd dominance a dispersive line. Throws ClassificationError when neither
/// part reaches 90% of the squared norm, or when an even line has null weight.
PeakReport classify_lineshape(const SpectrumResult& spec, Channel which, double center, double window);

/// 1 + crossed weight / ladder weight within the filter passband (half-width).
double filtered_enhancement(const SpectrumResult& spec, double nu_center, double passband);

}  // namespace cbs
