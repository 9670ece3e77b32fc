#include <doctest.h>

#include "approx.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "cbs/core_model.hpp"
#include "cbs/errors.hpp"

using namespace cbs;

namespace {

Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Vec3 v(n(rng), n(rng), n(rng));
  return v.normalized();
}

}  // namespace

TEST_CASE("helicity basis") {
  const double r = 1.0 / std::sqrt(2.0);
  CHECK((helicity_to_cartesian(0) - CVec3(0, 0, 1)).norm() < 1e-15);
  CHECK((helicity_to_cartesian(1) - CVec3(cd(-r, 0), cd(0, -r), 0)).norm() < 1e-15);
  for (int q = -1; q <= 1; ++q)
    for (int p = -1; p <= 1; ++p) {
      const cd dot = helicity_to_cartesian(q).dot(helicity_to_cartesian(p));  // conjugates the left vector
      CHECK(std::abs(dot - cd(q == p ? 1.0 : 0.0)) < 1e-15);
    }
  CHECK_THROWS_AS(helicity_to_cartesian(2), DomainError);
}

TEST_CASE("transverse projector") {
  const CMat3 z = transverse_projector(Vec3::UnitZ());
  CHECK((z - Eigen::Vector3cd(1, 1, 0).asDiagonal().toDenseMatrix()).norm() < 1e-15);

  const Vec3 d = Vec3(1, 1, 1).normalized();
  const CMat3 p = transverse_projector(d);
  CHECK((p * p - p).norm() < 1e-14);
  CHECK((p - p.transpose()).norm() < 1e-15);

  std::mt19937_64 rng(7);
  for (int i = 0; i < 20; ++i) {
    const CMat3 t = transverse_projector(random_unit(rng));
    CHECK(std::abs(t.trace() - cd(2.0)) < 1e-14);
    Eigen::SelfAdjointEigenSolver<CMat3> es(t);
    CHECK(std::abs(es.eigenvalues()(0)) < 1e-12);
    CHECK(std::abs(es.eigenvalues()(1) - 1.0) < 1e-12);
    CHECK(std::abs(es.eigenvalues()(2) - 1.0) < 1e-12);
  }
  CHECK_THROWS_AS(transverse_projector(Vec3(1, 1, 0)), DomainError);
}

TEST_CASE("coupling constant") {
  CHECK(std::abs(coupling_g(1.5).g) == rel(1.0, 1e-15));
  CHECK(std::abs(coupling_g(1e8).g) < 1e-7);

  const cd g10 = coupling_g(10.0).g;
  CHECK(g10.real() == rel(0.081603, 1e-5));
  CHECK(g10.imag() == rel(-0.125861, 1e-5));

  for (double kr : {2.0, 10.0, 37.5, 100.0, 1234.5}) {
    const double expected = std::remainder(std::numbers::pi / 2 + kr, 2 * std::numbers::pi);
    const double got = std::remainder(std::arg(coupling_g(kr).g), 2 * std::numbers::pi);
    CHECK(std::abs(std::remainder(got - expected, 2 * std::numbers::pi)) < 1e-12);
  }
  CHECK_THROWS_AS(coupling_g(0.0), DomainError);
  CHECK_THROWS_AS(coupling_g(-1.0), DomainError);
}

TEST_CASE("Delta_{+1,+1}") {
  CHECK(std::abs(delta_pp(Vec3::UnitZ())) < 1e-15);
  CHECK(std::abs(delta_pp(Vec3::UnitX()) - cd(-0.5)) < 1e-15);

  std::mt19937_64 rng(11);
  for (int i = 0; i < 10000; ++i) {
    const Vec3 n = random_unit(rng);
    const double rho2 = n.x() * n.x() + n.y() * n.y();
    REQUIRE(std::abs(std::norm(delta_pp(n)) - rho2 * rho2 / 4) < 1e-12);
    REQUIRE(std::abs(delta_pp(n) + std::pow(cd(n.x(), n.y()), 2) / 2.0) < 1e-12);
  }
  CHECK_THROWS_AS(delta_pp(Vec3(0, 0, 2)), DomainError);
}

TEST_CASE("isotropic average of |Delta|^2 is 2/15") {
  // Gauss-Legendre in cos(theta); the integrand (1 - c^2)^2 / 4 is a polynomial.
  const double nodes[3] = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
  const double weights[3] = {5.0 / 9, 8.0 / 9, 5.0 / 9};
  double avg = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double c = nodes[i], s = std::sqrt(1 - c * c);
    for (int k = 0; k < 8; ++k) {
      const double az = 2 * std::numbers::pi * k / 8;
      avg += weights[i] / 2 * std::norm(delta_pp(Vec3(s * std::cos(az), s * std::sin(az), c))) / 8;
    }
  }
  CHECK(avg == rel(2.0 / 15, 1e-13));
}

TEST_CASE("parameters and geometry") {
  const PhysParams p = PhysParams::from_saturation(1.0);
  CHECK(p.saturation() == rel(1.0, 1e-14));
  CHECK(p.omega == rel(std::sqrt(2.0), 1e-14));
  CHECK_THROWS_AS(PhysParams::from_saturation(-1.0), DomainError);
  CHECK_THROWS_AS((PhysParams{0.0, 1.0, 0.0}).validate(), DomainError);

  Configuration cfg;
  cfg.n_hat = Vec3(0.6, 0.0, 0.8);
  cfg.k0_r = 50.0;
  // Backscattering: k = -k_L, so (k + k_L) . r vanishes at theta = 0.
  CHECK(std::abs(cfg.detection_phase()) < 1e-12);
  cfg.theta = 0.01;
  CHECK(cfg.detection_phase() == rel(detection_phase(cfg.n_hat, cfg.k0_r, cfg.theta)));
  CHECK_NOTHROW(cfg.validate());
  cfg.k0_r = 1.0;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
}
