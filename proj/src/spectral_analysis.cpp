#include "cbs/spectral_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "cbs/errors.hpp"
#include "quadrature.hpp"

namespace cbs {

namespace {

void check_window(const SpectrumResult& spec, double window) {
  const double gamma = spec.params.gamma;
  const double omega = spec.params.omega;
  if (!(window >= 10.0 * gamma) || !(window <= 0.25 * omega)) {
    std::ostringstream msg;
    msg << "peak window " << window << " outside [10 gamma, Omega/4] = [" << 10.0 * gamma << ", " << 0.25 * omega
        << "]";
    throw DomainError(msg.str());
  }
}

std::vector<double> breaks_in(const SpectrumResult& spec, double lo, double hi) {
  std::vector<double> out;
  if (!spec.engine) return out;
  for (double x : spec.engine->resonance_positions())
    if (x > lo && x < hi) out.push_back(x);
  return out;
}

// Density of one channel as a function of frequency: exact evaluation when the
// engine is attached, linear interpolation of the grid otherwise.
std::function<double(double)> density_of(const SpectrumResult& spec, Channel which) {
  if (spec.engine) {
    auto engine = spec.engine;
    const bool sym = spec.symmetrized;
    return [engine, which, sym](double nu) {
      auto pick = [which](const DensityPair& p) { return which == Channel::ladder ? p.ladder : p.crossed; };
      const double v = pick(engine->density(nu));
      if (!sym || nu == 0.0) return v;
      return 0.5 * (v + pick(engine->density(-nu)));
    };
  }
  const auto* x = &spec.nu_grid;
  const auto* y = &spec.channel(which);
  return [x, y](double nu) { return detail::interpolate(*x, *y, nu); };
}

double window_integral(const SpectrumResult& spec, const std::function<double(double)>& f, double lo, double hi,
                       double tol = 1e-10) {
  if (spec.engine) return detail::integrate(f, lo, hi, breaks_in(spec, lo, hi), tol);
  if (lo < spec.nu_grid.front() || hi > spec.nu_grid.back())
    throw GridCoverageError("peak window extends beyond the frequency grid");
  // Sample the interpolant on the grid nodes inside the window plus the ends.
  std::vector<double> xs{lo};
  for (double v : spec.nu_grid)
    if (v > lo && v < hi) xs.push_back(v);
  xs.push_back(hi);
  std::vector<double> ys;
  ys.reserve(xs.size());
  for (double v : xs) ys.push_back(f(v));
  return detail::trapezoid(xs, ys, lo, hi);
}

}  // namespace

std::string_view to_string(LineShape s) {
  switch (s) {
    case LineShape::lorentzian_positive: return "lorentzian_positive";
    case LineShape::lorentzian_negative: return "lorentzian_negative";
    case LineShape::dispersive: return "dispersive";
  }
  return "?";
}

double default_peak_window(const PhysParams& params) { return std::min(0.25 * params.omega, 25.0 * params.gamma); }

double peak_weight(const SpectrumResult& spec, Channel which, double center, double window) {
  check_window(spec, window);
  return window_integral(spec, density_of(spec, which), center - window, center + window);
}

PeakReport classify_lineshape(const SpectrumResult& spec, Channel which, double center, double window) {
  check_window(spec, window);
  PeakReport r;
  r.center = center;
  r.window = window;

  const auto f = density_of(spec, which);
  detail::Memo<double, std::function<double(double)>> memo(f);
  const double lo = center - window, hi = center + window;
  r.weight = window_integral(spec, [&](double nu) { return memo(nu); }, lo, hi);
  r.abs_integral = window_integral(spec, [&](double nu) { return std::abs(memo(nu)); }, lo, hi, 1e-8);

  // Even and odd parts about the center, integrated over [0, window].
  auto even = [&](double x) {
    const double e = 0.5 * (memo(center + x) + memo(center - x));
    return e * e;
  };
  auto odd = [&](double x) {
    const double o = 0.5 * (memo(center + x) - memo(center - x));
    return o * o;
  };
  std::vector<double> half_breaks;
  for (double b : breaks_in(spec, lo, hi))
    if (b != center) half_breaks.push_back(std::abs(b - center));
  double e2, o2;
  if (spec.engine) {
    e2 = detail::integrate(even, 0.0, window, half_breaks, 1e-8);
    o2 = detail::integrate(odd, 0.0, window, half_breaks, 1e-8);
  } else {
    const auto grid = linear_grid(0.0, window, 2001);
    std::vector<double> ye, yo;
    for (double x : grid) {
      ye.push_back(even(x));
      yo.push_back(odd(x));
    }
    e2 = detail::trapezoid(grid, ye, 0.0, window);
    o2 = detail::trapezoid(grid, yo, 0.0, window);
  }
  const double norm2 = e2 + o2;
  r.even_fraction = norm2 > 0.0 ? e2 / norm2 : 0.0;
  r.odd_fraction = norm2 > 0.0 ? o2 / norm2 : 0.0;

  const double threshold = kNullWeightFraction * r.abs_integral;
  r.null_weight = std::abs(r.weight) < threshold;
  auto ambiguous = [&](const char* why) {
    std::ostringstream msg;
    msg << "ambiguous line shape at nu = " << center << ": " << why << " (even " << r.even_fraction << ", odd "
        << r.odd_fraction << ", weight " << r.weight << ", |density| integral " << r.abs_integral << ")";
    return ClassificationError(msg.str(), r.even_fraction, r.odd_fraction);
  };
  if (r.even_fraction >= kDominance) {
    if (r.weight > threshold)
      r.shape = LineShape::lorentzian_positive;
    else if (r.weight < -threshold)
      r.shape = LineShape::lorentzian_negative;
    else
      throw ambiguous("even part dominates but the weight is null");
  } else if (r.odd_fraction >= kDominance) {
    r.shape = LineShape::dispersive;
  } else {
    throw ambiguous("no parity dominance");
  }
  return r;
}

double filtered_enhancement(const SpectrumResult& spec, double nu_center, double passband) {
  const double ladder = peak_weight(spec, Channel::ladder, nu_center, passband);
  if (std::abs(ladder) < 1e-12) throw UndefinedEnhancementError("filtered_enhancement: ladder weight vanishes in passband");
  return 1.0 + peak_weight(spec, Channel::crossed, nu_center, passband) / ladder;
}

}  // namespace cbs
