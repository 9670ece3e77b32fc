#include "cbs/config_average.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "cbs/core_model.hpp"
#include "cbs/errors.hpp"

namespace cbs {

namespace {

constexpr std::size_t kBatch = 8192;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// [0, 1) with 53 random bits; independent of the standard library's distributions.
double uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

struct Moments {
  double mean = 0.0;
  double m2 = 0.0;
  std::size_t n = 0;

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }

  void merge(const Moments& o) {
    if (o.n == 0) return;
    const double total = static_cast<double>(n + o.n);
    const double d = o.mean - mean;
    mean += d * static_cast<double>(o.n) / total;
    m2 += o.m2 + d * d * static_cast<double>(n) * static_cast<double>(o.n) / total;
    n += o.n;
  }
};

template <typename Weight>
McEstimate sample(const AverageSpec& spec, Weight weight) {
  spec.validate();
  Moments total;
  const std::size_t batches = (spec.samples + kBatch - 1) / kBatch;
  for (std::size_t b = 0; b < batches; ++b) {
    std::mt19937_64 rng(splitmix64(spec.seed ^ splitmix64(b)));
    const std::size_t count = std::min(kBatch, spec.samples - b * kBatch);
    Moments m;
    for (std::size_t i = 0; i < count; ++i) {
      const double cos_t = 2.0 * uniform(rng) - 1.0;
      const double az = 2.0 * std::numbers::pi * uniform(rng);
      const double sin_t = std::sqrt(std::max(0.0, 1.0 - cos_t * cos_t));
      const Vec3 n(sin_t * std::cos(az), sin_t * std::sin(az), cos_t);
      const double k0_r = spec.ell_k0 * (1.0 - spec.width_frac + 2.0 * spec.width_frac * uniform(rng));
      m.add(weight(n, k0_r));
    }
    total.merge(m);
  }
  McEstimate e;
  e.mean = total.mean;
  e.samples = total.n;
  e.std_error = total.n > 1 ? std::sqrt(total.m2 / static_cast<double>(total.n - 1) / static_cast<double>(total.n)) : 0.0;
  return e;
}

// |Delta_{+1,+1}|^2 = (n_x^2 + n_y^2)^2 / 4, evaluated through the tensor contraction.
double orientation_weight(const Vec3& n) { return std::norm(delta_pp(n)); }

}  // namespace

void AverageSpec::validate() const {
  if (samples < 10) throw DomainError("AverageSpec: at least 10 samples required");
  if (!(ell_k0 > 0.0)) throw DomainError("AverageSpec: ell_k0 must be positive");
  if (!(width_frac >= 0.0 && width_frac < 1.0)) throw DomainError("AverageSpec: width_frac must be in [0, 1)");
}

AngularFactors angular_factor(double theta, double k_ell) {
  if (!(theta >= 0.0)) throw DomainError("angular_factor: theta must be non-negative");
  if (!(k_ell > 0.0)) throw DomainError("angular_factor: k_ell must be positive");
  const double x = k_ell * theta;
  return {2.0 / 15.0 - x * x / 35.0, 2.0 / 15.0};
}

bool small_angle_expansion_valid(double theta, double k_ell) { return k_ell * theta <= 0.5; }

McEstimate mc_average(const AverageSpec& spec, double theta) {
  if (!(theta >= 0.0)) throw DomainError("mc_average: theta must be non-negative");
  return sample(spec, [theta](const Vec3& n, double k0_r) {
    return orientation_weight(n) * std::cos(detection_phase(n, k0_r, theta));
  });
}

McEstimate mc_orientation_average(const AverageSpec& spec) {
  return sample(spec, [](const Vec3& n, double) { return orientation_weight(n); });
}

}  // namespace cbs
