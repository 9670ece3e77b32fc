#include "cbs/core_model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "cbs/errors.hpp"

namespace cbs {

namespace {

void require_unit(const Vec3& n, double tol, const char* who) {
  if (!n.allFinite() || std::abs(n.norm() - 1.0) > tol) {
    std::ostringstream msg;
    msg << who << ": direction must be a unit vector (|n| = " << n.norm() << ")";
    throw DomainError(msg.str());
  }
}

}  // namespace

double PhysParams::saturation() const {
  return omega * omega / (2.0 * (gamma * gamma + delta * delta));
}

void PhysParams::validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw DomainError("PhysParams: gamma must be positive");
  if (!(omega >= 0.0) || !std::isfinite(omega)) throw DomainError("PhysParams: omega must be non-negative");
  if (!std::isfinite(delta)) throw DomainError("PhysParams: delta must be finite");
}

PhysParams PhysParams::from_saturation(double s, double gamma) {
  if (!(s >= 0.0)) throw DomainError("PhysParams::from_saturation: s must be non-negative");
  PhysParams p;
  p.gamma = gamma;
  p.omega = gamma * std::sqrt(2.0 * s);
  p.delta = 0.0;
  return p;
}

void Configuration::validate() const {
  require_unit(n_hat, 1e-12, "Configuration");
  if (!(k0_r >= 10.0)) throw DomainError("Configuration: k0_r must be >= 10 (far field)");
  if (!(ell_k0 > 0.0)) throw DomainError("Configuration: ell_k0 must be positive");
  if (!(theta >= 0.0)) throw DomainError("Configuration: theta must be non-negative");
  if (!std::isfinite(phi_L)) throw DomainError("Configuration: phi_L must be finite");
}

std::vector<std::string> Configuration::warnings() const {
  std::vector<std::string> out;
  if (k0_r < 50.0) out.emplace_back("k0_r < 50: near-field corrections may not be negligible");
  return out;
}

double detection_phase(const Vec3& n_hat, double k0_r, double theta) {
  // k_L = k0 z, k = k0 (sin theta, 0, -cos theta), r_12 = (k0_r / k0) n_hat
  return k0_r * (std::sin(theta) * n_hat.x() + (1.0 - std::cos(theta)) * n_hat.z());
}

double Configuration::detection_phase() const { return cbs::detection_phase(n_hat, k0_r, theta); }

double Configuration::crossed_phase() const {
  // k.r_12 = (k + k_L).r_12 - k_L.r_12, and k_L.r_12 = -phi_L with atom 1 at the origin.
  return detection_phase() + phi_L;
}

CVec3 helicity_to_cartesian(int q) {
  const double h = 1.0 / std::numbers::sqrt2;
  switch (q) {
    case +1: return CVec3(cd(-h, 0.0), cd(0.0, -h), cd(0.0, 0.0));
    case 0: return CVec3(cd(0.0, 0.0), cd(0.0, 0.0), cd(1.0, 0.0));
    case -1: return CVec3(cd(h, 0.0), cd(0.0, -h), cd(0.0, 0.0));
    default: throw DomainError("helicity_to_cartesian: q must be -1, 0 or +1");
  }
}

CMat3 transverse_projector(const Vec3& n_hat) {
  require_unit(n_hat, kUnitTolerance, "transverse_projector");
  const Eigen::Matrix3d delta = Eigen::Matrix3d::Identity() - n_hat * n_hat.transpose();
  return delta.cast<cd>();
}

ComplexCoupling coupling_g(double k0_r) {
  if (!(k0_r > 0.0) || !std::isfinite(k0_r)) throw DomainError("coupling_g: k0_r must be positive");
  return {cd(0.0, 1.5 / k0_r) * std::exp(cd(0.0, k0_r))};
}

cd delta_pp(const Vec3& n_hat) {
  const CVec3 e = helicity_to_cartesian(+1);
  return (e.transpose() * transverse_projector(n_hat) * e)(0, 0);
}

}  // namespace cbs
