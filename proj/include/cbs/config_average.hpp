#pragma once

#include <cstddef>
#include <cstdint>

namespace cbs {

/// Disorder model: isotropic orientation of r_12 and k0 r_12 uniform on
/// [ell_k0 (1 - width_frac), ell_k0 (1 + width_frac)].
struct AverageSpec {
  std::size_t samples = 100000;
  std::uint64_t seed = 1;
  double ell_k0 = 100.0;
  double width_frac = 0.5;

  void validate() const;
};

struct AngularFactors {
  double crossed = 0.0;
  double ladder = 0.0;
};

/// Small-angle orientation factors: crossed 2/15 - (k ell theta)^2/35, ladder 2/15.
AngularFactors angular_factor(double theta, double k_ell);

/// True while the quadratic small-angle expansion is trustworthy (k ell theta <= 0.5).
bool small_angle_expansion_valid(double theta, double k_ell);

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

/// Monte Carlo estimate of < |Delta_{+1,+1}|^2 cos((k + k_L) . r_12) >.
/// Bit-identical for identical spec and theta.
McEstimate mc_average(const AverageSpec& spec, double theta);

/// Same sampler with the cosine dropped: < |Delta_{+1,+1}|^2 > -> 2/15.
McEstimate mc_orientation_average(const AverageSpec& spec);

}  // namespace cbs
