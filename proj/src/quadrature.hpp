#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace cbs::detail {

inline constexpr unsigned kMaxDepth = 12;

/// Adaptive 61-point Gauss-Kronrod on [a, b] (infinite ends allowed), split at
/// the given interior breakpoints.
inline double integrate(const std::function<double(double)>& f, double a, double b, std::vector<double> breaks,
                        double tol = 1e-10) {
  std::vector<double> edges{a};
  std::sort(breaks.begin(), breaks.end());
  for (double x : breaks)
    if (x > a && x < b && x - edges.back() > 1e-9) edges.push_back(x);
  edges.push_back(b);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    double error = 0.0;
    total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, edges[i], edges[i + 1], kMaxDepth, tol,
                                                                          &error);
  }
  return total;
}

/// Caches evaluations of an expensive two-channel function so that integrating
/// each channel separately reuses shared nodes.
template <typename Value, typename Eval>
class Memo {
 public:
  explicit Memo(Eval eval) : eval_(std::move(eval)) {}
  const Value& operator()(double x) {
    auto it = cache_.find(x);
    if (it == cache_.end()) it = cache_.emplace(x, eval_(x)).first;
    return it->second;
  }

 private:
  Eval eval_;
  std::map<double, Value> cache_;
};

/// Trapezoid rule on a (possibly nonuniform) grid restricted to [lo, hi].
inline double trapezoid(const std::vector<double>& x, const std::vector<double>& y, double lo, double hi) {
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double a = std::max(x[i], lo);
    const double b = std::min(x[i + 1], hi);
    if (b <= a) continue;
    const double h = x[i + 1] - x[i];
    auto lerp = [&](double t) { return y[i] + (y[i + 1] - y[i]) * (t - x[i]) / h; };
    sum += 0.5 * (b - a) * (lerp(a) + lerp(b));
  }
  return sum;
}

/// Linear interpolation on a grid; zero outside.
inline double interpolate(const std::vector<double>& x, const std::vector<double>& y, double t) {
  if (x.empty() || t < x.front() || t > x.back()) return 0.0;
  auto it = std::upper_bound(x.begin(), x.end(), t);
  if (it == x.end()) return y.back();
  const std::size_t i = static_cast<std::size_t>(it - x.begin());
  if (i == 0) return y.front();
  const double w = (t - x[i - 1]) / (x[i] - x[i - 1]);
  return y[i - 1] + w * (y[i] - y[i - 1]);
}

}  // namespace cbs::detail
