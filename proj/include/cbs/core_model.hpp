#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cbs {

using cd = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;
using CMat3 = Eigen::Matrix3cd;

/// Drive and decay parameters of a single atom. `gamma` is the amplitude
/// decay rate (the excited population decays at 2*gamma) and is the
/// frequency unit used everywhere else.
struct PhysParams {
  double gamma = 1.0;
  double omega = 0.0;  ///< Rabi frequency
  double delta = 0.0;  ///< laser detuning omega_L - omega_0

  /// s = Omega^2 / (2 (gamma^2 + delta^2))
  double saturation() const;
  void validate() const;

  /// On-resonance parameters with the Rabi frequency chosen to give saturation s.
  static PhysParams from_saturation(double s, double gamma = 1.0);
};

/// Geometry of one two-atom realization. Atom 1 sits at the origin, the
/// laser propagates along +z with helicity +1 and detection is in the
/// x-z plane at angle `theta` from exact backscattering.
struct Configuration {
  Vec3 n_hat{1.0, 0.0, 0.0};  ///< unit vector along r_12 = r_1 - r_2
  double k0_r = 100.0;         ///< k0 * |r_12|
  double ell_k0 = 100.0;       ///< k0 * mean free path
  double theta = 0.0;          ///< detection angle from backscattering (rad)
  double phi_L = 0.0;          ///< drive phase of atom 2 relative to atom 1

  void validate() const;
  /// Non-fatal validity notes (far-field marginal, etc.).
  std::vector<std::string> warnings() const;

  /// (k + k_L) . r_12, the phase that survives configuration averaging.
  double detection_phase() const;
  /// k . r_12 for the detected wave vector; enters the crossed amplitudes.
  double crossed_phase() const;
};

struct ComplexCoupling {
  cd g;
};

/// Spherical basis vector e_q, q in {-1, 0, +1}, Condon-Shortley phases.
CVec3 helicity_to_cartesian(int q);

/// 1 - n n, the projector on the plane transverse to n.
CMat3 transverse_projector(const Vec3& n_hat);

/// Far-field exchange amplitude g = 3i/(2 k0 r) exp(i k0 r).
ComplexCoupling coupling_g(double k0_r);

/// e_{+1} . (1 - n n) . e_{+1}, contracted without conjugation.
cd delta_pp(const Vec3& n_hat);

/// (k + k_L) . r_12 for laser along +z and detection at angle theta in the x-z plane.
double detection_phase(const Vec3& n_hat, double k0_r, double theta);

inline constexpr double kUnitTolerance = 1e-9;

}  // namespace cbs
