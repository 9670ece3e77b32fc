#include <doctest.h>

#include "approx.hpp"

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "cbs/errors.hpp"
#include "cbs/liouvillian.hpp"
#include "cbs/perturbative.hpp"

using namespace cbs;

namespace {

PairOperator random_operator(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  PairOperator m;
  for (int i = 0; i < kPairDim; ++i)
    for (int j = 0; j < kPairDim; ++j) m(i, j) = cd(n(rng), n(rng));
  return m;
}

PairOperator random_density(std::mt19937_64& rng) {
  const PairOperator a = random_operator(rng);
  PairOperator rho = a * a.adjoint();
  return rho / rho.trace();
}

// Cartesian dipole of one atom embedded in the pair space, built from the
// basis vectors directly rather than through the library helpers.
std::array<PairOperator, 3> dipole(int atom) {
  const double h = 1.0 / std::sqrt(2.0);
  const CVec3 em(cd(h, 0), cd(0, -h), 0), e0(0, 0, 1), ep(cd(-h, 0), cd(0, -h), 0);
  std::array<PairOperator, 3> d;
  for (int i = 0; i < 3; ++i) {
    Eigen::Matrix4cd s = Eigen::Matrix4cd::Zero();
    s(0, 1) = -em(i);
    s(0, 2) = e0(i);
    s(0, 3) = -ep(i);
    const Eigen::Matrix4cd id = Eigen::Matrix4cd::Identity();
    d[i] = atom == 1 ? PairOperator(Eigen::kroneckerProduct(s, id)) : PairOperator(Eigen::kroneckerProduct(id, s));
  }
  return d;
}

PairOperator comm(const PairOperator& a, const PairOperator& b) { return a * b - b * a; }

// Heisenberg form of the free evolution of Q for both atoms.
PairOperator heisenberg_free(const PairOperator& q, const PhysParams& p, double phi) {
  PairOperator out = PairOperator::Zero();
  const CVec3 eps = CVec3(cd(-1, 0), cd(0, -1), 0) / std::sqrt(2.0);
  for (int atom = 1; atom <= 2; ++atom) {
    const auto d = dipole(atom);
    const cd om = p.omega * std::exp(cd(0, atom == 1 ? 0.0 : phi));
    PairOperator d_dot_eps = PairOperator::Zero();  // D^dag . e_L
    PairOperator excited = PairOperator::Zero();
    for (int i = 0; i < 3; ++i) {
      d_dot_eps += d[i].adjoint() * eps(i);
      excited += d[i].adjoint() * d[i];
    }
    const PairOperator h = -p.delta * excited - 0.5 * (om * d_dot_eps + std::conj(om) * d_dot_eps.adjoint());
    out += cd(0, 1) * comm(h, q);
    for (int i = 0; i < 3; ++i)
      out += p.gamma * (d[i].adjoint() * comm(q, d[i]) + comm(d[i].adjoint(), q) * d[i]);
  }
  return out;
}

// Heisenberg form of the exchange term with T = g * tensor, split into the g and g* parts.
std::pair<PairOperator, PairOperator> heisenberg_exchange(const PairOperator& q, const CMat3& t) {
  PairOperator plus = PairOperator::Zero(), minus = PairOperator::Zero();
  const std::array<std::array<PairOperator, 3>, 2> d{dipole(1), dipole(2)};
  for (int a = 0; a < 2; ++a) {
    const int b = 1 - a;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        plus += d[a][i].adjoint() * t(i, j) * comm(q, d[b][j]);
        minus += comm(d[b][i].adjoint(), q) * std::conj(t(i, j)) * d[a][j];
      }
  }
  return {plus, minus};
}

cd pair_trace(const PairOperator& q, const TwoAtomState& rho) { return (q * rho.matrix()).trace(); }

}  // namespace

TEST_CASE("state layout") {
  CHECK(pair_index(1, 1) == 0);
  CHECK(pair_index(2, 3) == 6);
  CHECK(pair_index(4, 4) == 15);

  std::mt19937_64 rng(1);
  const PairOperator rho = random_density(rng);
  const TwoAtomState s = TwoAtomState::from_matrix(rho);
  CHECK(s.coeffs()(3 * kPairDim + 5) == rho(3, 5));
  CHECK((s.matrix() - rho).norm() < 1e-15);
  CHECK(std::abs(s.trace() - cd(1.0)) < 1e-12);
  CHECK(s.hermiticity_defect() < 1e-12);
  CHECK(std::abs((trace_functional() * s.coeffs())(0) - s.trace()) < 1e-12);

  const PairOperator q = random_operator(rng);
  CHECK(std::abs((expectation_functional(q) * s.coeffs())(0) - s.expect(q)) < 1e-10);
  CHECK(std::abs(s.expect(q) - pair_trace(q, s)) < 1e-10);

  const Eigen::Matrix4cd a = Eigen::Matrix4cd::Random(), b = Eigen::Matrix4cd::Random();
  const TwoAtomState prod = TwoAtomState::from_matrix(Eigen::kroneckerProduct(a, b));
  CHECK((prod.partial_trace(1) - a * b.trace()).norm() < 1e-12);
  CHECK((prod.partial_trace(2) - b * a.trace()).norm() < 1e-12);

  CHECK_THROWS_AS(TwoAtomState(Eigen::VectorXcd::Zero(255)), DomainError);
}

TEST_CASE("dipole component operators") {
  const PairOperator p12 = dipole_component_operator(1, 2, DipoleKind::projector);
  CHECK(std::abs(p12.trace() - cd(4.0)) < 1e-15);
  for (int atom = 1; atom <= 2; ++atom)
    for (int e = 2; e <= 4; ++e) {
      const PairOperator low = dipole_component_operator(atom, e, DipoleKind::lowering);
      const PairOperator up = dipole_component_operator(atom, e, DipoleKind::raising);
      CHECK((up - low.adjoint()).norm() == 0.0);
      CHECK((up * low - dipole_component_operator(atom, e, DipoleKind::projector)).norm() == 0.0);
    }
  CHECK_THROWS_AS(dipole_component_operator(3, 2, DipoleKind::lowering), DomainError);
  CHECK_THROWS_AS(dipole_component_operator(1, 1, DipoleKind::lowering), DomainError);
  CHECK_THROWS_AS(atom_sigma(0, 1), DomainError);
}

TEST_CASE("free generator is the adjoint of the Heisenberg form") {
  const PhysParams p{1.0, 1.3, 0.4};
  const double phi = 0.9;
  const Generator l0 = build_free_generator(p, phi);
  std::mt19937_64 rng(3);
  for (int k = 0; k < 20; ++k) {
    const PairOperator q = random_operator(rng);
    const TwoAtomState rho = TwoAtomState::from_matrix(random_density(rng));
    const cd lhs = pair_trace(q, l0.apply(rho));
    const cd rhs = pair_trace(heisenberg_free(q, p, phi), rho);
    REQUIRE(std::abs(lhs - rhs) < 1e-10 * (1.0 + std::abs(lhs)));
  }
}

TEST_CASE("exchange generators are the adjoint of the Heisenberg form") {
  const Vec3 n = Vec3(0.3, -0.5, 0.7).normalized();
  const ExchangeGenerators ex = build_exchange_generators(n, 1.0);
  CHECK(ex.plus.label == GeneratorLabel::V_plus);
  CHECK(ex.minus.label == GeneratorLabel::V_minus);
  const CMat3 t = CMat3::Identity() - (n * n.transpose()).cast<cd>();
  std::mt19937_64 rng(5);
  for (int k = 0; k < 100; ++k) {
    const PairOperator q = random_operator(rng);
    const TwoAtomState rho = TwoAtomState::from_matrix(random_density(rng));
    const auto [hp, hm] = heisenberg_exchange(q, t);
    REQUIRE(std::abs(pair_trace(q, ex.plus.apply(rho)) - pair_trace(hp, rho)) < 1e-10);
    REQUIRE(std::abs(pair_trace(q, ex.minus.apply(rho)) - pair_trace(hm, rho)) < 1e-10);
  }

  // n = z kills Delta_{+1,+1} but not the exchange generators.
  CHECK(build_exchange_generators(Vec3::UnitZ()).plus.matrix.norm() > 0.1);

  const CMat3 tensor = CMat3::Random();
  const auto one = build_exchange_generators_from_tensor(tensor);
  const auto two = build_exchange_generators_from_tensor(2.0 * tensor);
  CHECK((two.plus.matrix - 2.0 * one.plus.matrix).norm() < 1e-12);
  CHECK((two.minus.matrix - 2.0 * one.minus.matrix).norm() < 1e-12);
  CHECK_THROWS_AS(build_exchange_generators(Vec3(1, 1, 0)), DomainError);
}

TEST_CASE("trace annihilation and Hermiticity preservation") {
  const Generator l0 = build_free_generator(PhysParams::from_saturation(2.0), 1.1);
  const ExchangeGenerators ex = build_exchange_generators(Vec3(0.6, -0.48, 0.64).normalized());
  const Eigen::RowVectorXcd w = trace_functional();
  CHECK((w * l0.matrix).norm() < 1e-12);
  CHECK((w * ex.plus.matrix).norm() < 1e-12);
  CHECK((w * ex.minus.matrix).norm() < 1e-12);

  std::mt19937_64 rng(9);
  std::normal_distribution<double> n;
  for (int k = 0; k < 100; ++k) {
    const TwoAtomState rho = TwoAtomState::from_matrix(random_density(rng));
    REQUIRE(std::abs(l0.apply(rho).trace()) < 1e-10);
    REQUIRE(std::abs(ex.plus.apply(rho).trace()) < 1e-10);
    REQUIRE(std::abs(ex.minus.apply(rho).trace()) < 1e-10);
    REQUIRE(l0.apply(rho).hermiticity_defect() < 1e-10);
  }
  for (int k = 0; k < 5; ++k) {
    const cd g(n(rng), n(rng));
    const Generator full = combine(l0, ex, g);
    const TwoAtomState rho = TwoAtomState::from_matrix(random_density(rng));
    CHECK(full.apply(rho).hermiticity_defect() < 1e-10);
    CHECK(std::abs(full.apply(rho).trace()) < 1e-10);
    // The Schroedinger map commutes with the adjoint for any state.
    const TwoAtomState x = TwoAtomState::from_matrix(random_operator(rng));
    CHECK((full.apply(x.adjoint()).coeffs() - full.apply(x).adjoint().coeffs()).norm() < 1e-10);
  }
}

TEST_CASE("spectrum of L0") {
  const Generator l0 = build_free_generator(PhysParams{1.0, 1.0, 0.0}, 0.0);
  Eigen::ComplexEigenSolver<SuperMatrix> es(l0.matrix, false);
  int zeros = 0;
  double max_re = -1e300;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    const cd e = es.eigenvalues()(i);
    if (std::abs(e) < 1e-9)
      ++zeros;
    else
      max_re = std::max(max_re, e.real());
  }
  CHECK(zeros == 1);
  CHECK(max_re < -1e-6);
}

TEST_CASE("single-atom reduction") {
  const PhysParams p{1.0, 1.7, 0.3};
  const Eigen::MatrixXcd l1 = build_single_atom_generator(p, 0.0);
  const Eigen::MatrixXcd l2 = build_single_atom_generator(p, 0.8);
  const Generator l0 = build_free_generator(p, 0.8);
  std::mt19937_64 rng(13);
  for (int k = 0; k < 10; ++k) {
    const TwoAtomState rho = TwoAtomState::from_matrix(random_density(rng));
    const TwoAtomState out = l0.apply(rho);
    for (int atom = 1; atom <= 2; ++atom) {
      const Eigen::Matrix4cd r = rho.partial_trace(atom);
      Eigen::VectorXcd v(16);
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) v(i * 4 + j) = r(i, j);
      const Eigen::VectorXcd lv = (atom == 1 ? l1 : l2) * v;
      const Eigen::Matrix4cd expected = Eigen::Map<const Eigen::Matrix<cd, 4, 4, Eigen::RowMajor>>(lv.data());
      REQUIRE((out.partial_trace(atom) - expected).norm() < 1e-10);
    }
  }
}

TEST_CASE("decay and drive selection rules") {
  // Undriven, inverted atom: the |4> population decays at 2 gamma.
  const Generator free = build_free_generator(PhysParams{1.0, 0.0, 0.0}, 0.0);
  PairOperator rho = PairOperator::Zero();
  rho(pair_index(4, 1), pair_index(4, 1)) = 1.0;
  const TwoAtomState r0 = TwoAtomState::from_matrix(rho);
  const PairOperator p44 = dipole_component_operator(1, 4, DipoleKind::projector);
  const double t = 0.7;
  const TwoAtomState rt(SuperMatrix((free.matrix * t).exp()) * r0.coeffs());
  CHECK(rt.expect(p44).real() == rel(std::exp(-2.0 * t), 1e-10));
  CHECK(std::abs(r0.expect(p44) * -2.0 - free.apply(r0).expect(p44)) < 1e-12);

  // Driven from the ground state: levels 2 and 3 stay empty.
  const Generator l0 = build_free_generator(PhysParams{1.0, 3.0, 0.0}, 0.4);
  PairOperator g = PairOperator::Zero();
  g(0, 0) = 1.0;
  const TwoAtomState ev(SuperMatrix((l0.matrix * 10.0).exp()) * TwoAtomState::from_matrix(g).coeffs());
  for (int atom = 1; atom <= 2; ++atom)
    for (int e : {2, 3}) CHECK(std::abs(ev.expect(dipole_component_operator(atom, e, DipoleKind::projector))) < 1e-12);
  CHECK(std::abs(ev.trace() - cd(1.0)) < 1e-10);
}
