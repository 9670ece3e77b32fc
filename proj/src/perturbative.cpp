#include "cbs/perturbative.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "cbs/errors.hpp"

namespace cbs {

namespace {

constexpr double kRcondFloor = 1e-13;

const PairOperator& sigma12(int atom) {
  static const PairOperator ops[2] = {dipole_component_operator(1, 2, DipoleKind::lowering),
                                      dipole_component_operator(2, 2, DipoleKind::lowering)};
  return ops[atom - 1];
}

const PairOperator& sigma21(int atom) {
  static const PairOperator ops[2] = {dipole_component_operator(1, 2, DipoleKind::raising),
                                      dipole_component_operator(2, 2, DipoleKind::raising)};
  return ops[atom - 1];
}

const PairOperator& sigma22(int atom) {
  static const PairOperator ops[2] = {dipole_component_operator(1, 2, DipoleKind::projector),
                                      dipole_component_operator(2, 2, DipoleKind::projector)};
  return ops[atom - 1];
}

}  // namespace

const TwoAtomState& PerturbativeState::at(int m, int n) const {
  const auto it = orders.find(Order{m, n});
  if (it == orders.end()) throw DomainError("PerturbativeState: order not available");
  return it->second;
}

TwoAtomState PerturbativeState::resum(cd g) const {
  TwoAtomState out;
  for (const auto& [o, rho] : orders) out += std::pow(g, o.m) * std::pow(std::conj(g), o.n) * rho;
  return out;
}

TwoAtomState steady_state(const Generator& generator) {
  // (L - u w^T) x = -u has the unique solution x = rho_ss when the stationary
  // subspace is one-dimensional and w^T u = 1.
  const Eigen::RowVectorXcd w = trace_functional();
  const Eigen::VectorXcd u = w.adjoint() / static_cast<double>(kPairDim);
  const SuperMatrix m = generator.matrix - u * w;
  Eigen::PartialPivLU<SuperMatrix> lu(m);
  if (!(lu.rcond() > kRcondFloor)) {
    std::ostringstream msg;
    msg << "steady_state: stationary subspace is not one-dimensional (rcond = " << lu.rcond() << ")";
    throw DegeneracyError(msg.str());
  }
  TwoAtomState rho(lu.solve(-u));
  rho *= 1.0 / rho.trace();
  // Hermitize away round-off.
  return 0.5 * (rho + rho.adjoint());
}

TwoAtomState zeroth_steady_state(const Generator& free) { return steady_state(free); }

DeflatedSolver::DeflatedSolver(const Generator& free, const TwoAtomState& rho0)
    : lu_(free.matrix - rho0.coeffs() * trace_functional()) {
  if (!(lu_.rcond() > kRcondFloor)) throw DegeneracyError("DeflatedSolver: L0 is singular on the traceless subspace");
}

TwoAtomState DeflatedSolver::solve(const TwoAtomState& rhs) const {
  if (std::abs(rhs.trace()) > 1e-9 * (1.0 + rhs.norm()))
    throw DomainError("DeflatedSolver: right-hand side must be traceless");
  return TwoAtomState(lu_.solve(rhs.coeffs()));
}

PerturbativeState perturbative_corrections(const Generator& free, const Generator& v_plus,
                                           const Generator& v_minus, const TwoAtomState& rho0) {
  const DeflatedSolver solver(free, rho0);
  PerturbativeState p;
  p.orders[{0, 0}] = rho0;
  const TwoAtomState& r10 = p.orders[{1, 0}] = solver.solve(-1.0 * v_plus.apply(rho0));
  const TwoAtomState& r01 = p.orders[{0, 1}] = solver.solve(-1.0 * v_minus.apply(rho0));
  p.orders[{1, 1}] = solver.solve(-1.0 * (v_plus.apply(r01) + v_minus.apply(r10)));
  p.orders[{2, 0}] = solver.solve(-1.0 * v_plus.apply(r10));
  p.orders[{0, 2}] = solver.solve(-1.0 * v_minus.apply(r01));
  return p;
}

IntensityTerms IntensityTerms::in_average_units() const {
  if (!(geometric_factor > 0.0)) throw DomainError("IntensityTerms: geometric factor vanishes for this orientation");
  IntensityTerms t = *this;
  const double f = 1.0 / geometric_factor;
  t.ladder_total *= f;
  t.crossed_total *= f;
  t.ladder_elastic *= f;
  t.crossed_elastic *= f;
  t.ladder_inelastic *= f;
  t.crossed_inelastic *= f;
  t.geometric_factor = 1.0;
  return t;
}

DetectedIntensities detected_intensities(const TwoAtomState& rho, const Configuration& cfg) {
  const cd detect = std::exp(cd(0.0, cfg.crossed_phase()));
  return {(rho.expect(sigma22(1)) + rho.expect(sigma22(2))).real(),
          2.0 * (rho.expect(sigma21(1) * sigma12(2)) * detect).real()};
}

IntensityTerms intensity_terms(const PerturbativeState& pert, const Configuration& cfg) {
  const TwoAtomState& r11 = pert.at(1, 1);
  const TwoAtomState& r10 = pert.at(1, 0);
  const TwoAtomState& r01 = pert.at(0, 1);
  const cd detect = std::exp(cd(0.0, cfg.crossed_phase()));

  IntensityTerms t;
  const DetectedIntensities total = detected_intensities(r11, cfg);
  t.ladder_total = total.ladder;
  t.crossed_total = total.crossed;

  // <sigma21^a><sigma12^b> collected at order (1,1).
  auto product = [&](int a, int b) {
    return r10.expect(sigma21(a)) * r01.expect(sigma12(b)) + r01.expect(sigma21(a)) * r10.expect(sigma12(b));
  };
  t.ladder_elastic = (product(1, 1) + product(2, 2)).real();
  t.crossed_elastic = 2.0 * (product(1, 2) * detect).real();
  t.ladder_inelastic = t.ladder_total - t.ladder_elastic;
  t.crossed_inelastic = t.crossed_total - t.crossed_elastic;
  t.geometric_factor = std::norm(delta_pp(cfg.n_hat));
  t.phase_factor = std::cos(cfg.detection_phase());
  return t;
}

DoubleScatteringModel build_double_scattering(const PhysParams& params, const Configuration& cfg) {
  params.validate();
  cfg.validate();
  DoubleScatteringModel m{params, cfg, build_free_generator(params, cfg.phi_L),
                          build_exchange_generators(cfg.n_hat, params.gamma), {}};
  const TwoAtomState rho0 = zeroth_steady_state(m.free);
  m.pert = perturbative_corrections(m.free, m.exchange.plus, m.exchange.minus, rho0);
  return m;
}

double min_eigenvalue(const TwoAtomState& rho) {
  const PairOperator m = rho.matrix();
  const PairOperator h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<PairOperator> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace cbs
