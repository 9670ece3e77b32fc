#include "cbs/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "cbs/errors.hpp"
#include "quadrature.hpp"

namespace cbs {

namespace {

constexpr double kPivotFloor = 1e-13;

const std::array<Order, 4> kSpectrumOrders{Order{0, 0}, Order{1, 0}, Order{0, 1}, Order{1, 1}};

}  // namespace

Resolvent::Resolvent(const Generator& free) : rho0_(steady_state(free)) { reduce(free); }

Resolvent::Resolvent(const Generator& free, const TwoAtomState& rho0) : rho0_(rho0) { reduce(free); }

void Resolvent::reduce(const Generator& free) {
  scale_ = free.matrix.cwiseAbs().colwise().sum().maxCoeff();
  deflation_shift_ = 1.0 + scale_;
  const SuperMatrix deflated = free.matrix - deflation_shift_ * rho0_.coeffs() * trace_functional();
  Eigen::HessenbergDecomposition<SuperMatrix> hd(deflated);
  h_ = hd.matrixH();
  q_ = hd.matrixQ();
}

Resolvent::Shifted Resolvent::factor(cd z) const {
  const Eigen::Index n = h_.rows();
  Shifted s;
  s.z_ = z;
  s.u_ = -h_;
  s.u_.diagonal().array() += z;
  s.multipliers_ = Eigen::VectorXcd::Zero(n);
  s.swapped_.assign(static_cast<std::size_t>(n), 0);
  const double floor = kPivotFloor * (scale_ + std::abs(z));
  auto pole = [&](Eigen::Index k) {
    std::ostringstream msg;
    msg << "resolvent: z = " << z << " is at an eigenvalue of the generator (pivot " << k << ")";
    return ResolventPoleError(msg.str());
  };
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    const Eigen::Index tail = n - k;
    if (std::abs(s.u_(k + 1, k)) > std::abs(s.u_(k, k))) {
      s.u_.row(k).segment(k, tail).swap(s.u_.row(k + 1).segment(k, tail));
      s.swapped_[static_cast<std::size_t>(k)] = 1;
    }
    const cd pivot = s.u_(k, k);
    if (std::abs(pivot) < floor) throw pole(k);
    const cd l = s.u_(k + 1, k) / pivot;
    s.multipliers_(k) = l;
    s.u_(k + 1, k) = 0.0;
    if (l != cd(0.0)) s.u_.row(k + 1).segment(k + 1, tail - 1) -= l * s.u_.row(k).segment(k + 1, tail - 1);
  }
  if (std::abs(s.u_(n - 1, n - 1)) < floor) throw pole(n - 1);
  return s;
}

Eigen::VectorXcd Resolvent::Shifted::solve(const Eigen::VectorXcd& b) const {
  Eigen::VectorXcd y = b;
  const Eigen::Index n = y.size();
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    if (swapped_[static_cast<std::size_t>(k)]) std::swap(y(k), y(k + 1));
    y(k + 1) -= multipliers_(k) * y(k);
  }
  u_.triangularView<Eigen::Upper>().solveInPlace(y);
  return y;
}

TwoAtomState Resolvent::apply(cd z, const TwoAtomState& v) const {
  const cd t = v.trace();
  const TwoAtomState traceless = v - t * rho0_;
  TwoAtomState x(from_basis(factor(z).solve(to_basis(traceless.coeffs()))));
  if (std::abs(t) > 1e-14 * (1.0 + v.norm())) {
    if (std::abs(z) < kPivotFloor * scale_)
      throw ResolventPoleError("resolvent: z = 0 with a stationary component in the input; deflate it first");
    x += (t / z) * rho0_;
  }
  return x;
}

TwoAtomState resolvent_apply(const Generator& free, cd z, const TwoAtomState& v) {
  return Resolvent(free).apply(z, v);
}

RegressionSources qrt_sources(const PerturbativeState& pert, int alpha) {
  if (alpha != 1 && alpha != 2) throw DomainError("qrt_sources: atom index must be 1 or 2");
  const PairOperator raise = dipole_component_operator(alpha, 2, DipoleKind::raising);
  RegressionSources s;
  std::map<Order, cd> mean;
  for (const auto& [o, rho] : pert.orders) {
    s.raw[o] = rho.right_multiplied(raise);
    mean[o] = s.raw[o].trace();
  }
  for (const auto& [o, raw] : s.raw) {
    TwoAtomState c = raw;
    for (const auto& [o1, m1] : mean) {
      const Order rest{o.m - o1.m, o.n - o1.n};
      const auto it = pert.orders.find(rest);
      if (it != pert.orders.end()) c -= m1 * it->second;
    }
    s.connected[o] = c;
  }
  return s;
}

SpectrumEngine::SpectrumEngine(const DoubleScatteringModel& model)
    : params_(model.params), resolvent_(model.free, model.pert.at(0, 0)) {
  const IntensityTerms raw = intensity_terms(model.pert, model.config);
  if (!(raw.geometric_factor > 1e-12))
    throw DomainError("SpectrumEngine: |Delta_{+1,+1}|^2 vanishes for this orientation, no h||h signal");
  elastic_ = raw.in_average_units();
  unit_factor_ = 1.0 / raw.geometric_factor;

  v_plus_ = resolvent_.to_basis(model.exchange.plus.matrix);
  v_minus_ = resolvent_.to_basis(model.exchange.minus.matrix);
  for (int alpha = 1; alpha <= 2; ++alpha) {
    const RegressionSources src = qrt_sources(model.pert, alpha);
    for (const Order& o : kSpectrumOrders)
      sources_[static_cast<std::size_t>(alpha - 1)][o] = resolvent_.to_basis(src.connected.at(o).coeffs());
    observe_[static_cast<std::size_t>(alpha - 1)] = resolvent_.functional_to_basis(
        expectation_functional(dipole_component_operator(alpha, 2, DipoleKind::lowering)));
  }
  const cd detect = std::exp(cd(0.0, model.config.crossed_phase()));
  phase_ = {{{cd(1.0), detect}, {std::conj(detect), cd(1.0)}}};
}

DensityPair SpectrumEngine::density_at(cd z) const {
  const Resolvent::Shifted r = resolvent_.factor(z);
  cd ladder = 0.0;
  cd crossed = 0.0;
  for (std::size_t a = 0; a < 2; ++a) {
    const auto& s = sources_[a];
    // Order |g|^2 of Tr(sigma12^b (z - L)^{-1} X): expand both the stationary
    // state and the propagator, R0 = (z - L0)^{-1}.
    const Eigen::VectorXcd r00 = r.solve(s.at({0, 0}));
    Eigen::VectorXcd acc = s.at({1, 1});
    acc.noalias() += v_minus_ * r.solve(s.at({1, 0}));
    acc.noalias() += v_plus_ * r.solve(s.at({0, 1}));
    acc.noalias() += v_plus_ * r.solve(v_minus_ * r00);
    acc.noalias() += v_minus_ * r.solve(v_plus_ * r00);
    const Eigen::VectorXcd y = r.solve(acc);
    for (std::size_t b = 0; b < 2; ++b) {
      const cd g = (observe_[b] * y).value() * phase_[a][b];
      (a == b ? ladder : crossed) += g;
    }
  }
  const double k = unit_factor_ / std::numbers::pi;
  return {k * ladder.real(), k * crossed.real()};
}

DensityPair SpectrumEngine::density(double nu) const { return density_at(cd(0.0, -nu)); }

std::vector<double> SpectrumEngine::resonance_positions() const {
  const double w = std::hypot(params_.omega, params_.delta);
  return {-2.0 * w, -w, -0.5 * w, 0.0, 0.5 * w, w, 2.0 * w};
}

SpectrumResult SpectrumResult::scaled(double factor) const {
  SpectrumResult r = *this;
  for (double& v : r.ladder_inel) v *= factor;
  for (double& v : r.crossed_inel) v *= factor;
  r.ladder_el_weight *= factor;
  r.crossed_el_weight *= factor;
  r.engine.reset();
  return r;
}

SpectrumResult cbs_spectrum(const PhysParams& params, const Configuration& cfg, const std::vector<double>& nu_grid) {
  if (nu_grid.empty()) throw DomainError("cbs_spectrum: empty frequency grid");
  return cbs_spectrum(std::make_shared<const SpectrumEngine>(build_double_scattering(params, cfg)), nu_grid);
}

SpectrumResult cbs_spectrum(std::shared_ptr<const SpectrumEngine> engine, const std::vector<double>& nu_grid) {
  if (!engine) throw DomainError("cbs_spectrum: null engine");
  if (nu_grid.empty()) throw DomainError("cbs_spectrum: empty frequency grid");
  for (std::size_t i = 0; i < nu_grid.size(); ++i) {
    if (!std::isfinite(nu_grid[i])) throw DomainError("cbs_spectrum: non-finite frequency");
    if (i > 0 && !(nu_grid[i] > nu_grid[i - 1])) throw DomainError("cbs_spectrum: grid must be strictly increasing");
  }

  SpectrumResult out;
  out.nu_grid = nu_grid;
  out.params = engine->params();
  out.ladder_el_weight = engine->ladder_elastic_weight();
  out.crossed_el_weight = engine->crossed_elastic_weight();
  out.symmetrized = engine->params().delta == 0.0;

  detail::Memo<DensityPair, std::function<DensityPair(double)>> eval(
      [&](double nu) { return engine->density(nu); });
  out.ladder_inel.reserve(nu_grid.size());
  out.crossed_inel.reserve(nu_grid.size());
  double max_l = 0.0, max_c = 0.0, asym_l = 0.0, asym_c = 0.0;
  for (double nu : nu_grid) {
    const DensityPair p = eval(nu);
    if (!out.symmetrized) {
      out.ladder_inel.push_back(p.ladder);
      out.crossed_inel.push_back(p.crossed);
      continue;
    }
    const DensityPair m = eval(nu == 0.0 ? 0.0 : -nu);
    out.ladder_inel.push_back(0.5 * (p.ladder + m.ladder));
    out.crossed_inel.push_back(0.5 * (p.crossed + m.crossed));
    max_l = std::max({max_l, std::abs(p.ladder), std::abs(m.ladder)});
    max_c = std::max({max_c, std::abs(p.crossed), std::abs(m.crossed)});
    asym_l = std::max(asym_l, std::abs(p.ladder - m.ladder));
    asym_c = std::max(asym_c, std::abs(p.crossed - m.crossed));
  }
  if (out.symmetrized) {
    out.max_asymmetry = std::max(max_l > 0.0 ? asym_l / max_l : 0.0, max_c > 0.0 ? asym_c / max_c : 0.0);
  }
  out.engine = std::move(engine);
  return out;
}

SpectrumTotals integrate_spectrum(const SpectrumResult& spec) {
  SpectrumTotals t;
  if (spec.engine) {
    const auto& engine = *spec.engine;
    detail::Memo<DensityPair, std::function<DensityPair(double)>> eval(
        [&](double nu) { return engine.density(nu); });
    const double inf = std::numeric_limits<double>::infinity();
    const auto breaks = engine.resonance_positions();
    t.ladder_inelastic = detail::integrate([&](double nu) { return eval(nu).ladder; }, -inf, inf, breaks);
    t.crossed_inelastic = detail::integrate([&](double nu) { return eval(nu).crossed; }, -inf, inf, breaks);
  } else {
    if (spec.nu_grid.size() < 2) throw GridCoverageError("integrate_spectrum: need at least two grid points");
    for (Channel c : {Channel::ladder, Channel::crossed}) {
      const auto& y = spec.channel(c);
      double peak = 0.0;
      for (double v : y) peak = std::max(peak, std::abs(v));
      if (std::abs(y.front()) > 1e-6 * peak || std::abs(y.back()) > 1e-6 * peak) {
        std::ostringstream msg;
        msg << "integrate_spectrum: boundary density exceeds 1e-6 of the peak (grid ["
            << spec.nu_grid.front() << ", " << spec.nu_grid.back() << "])";
        throw GridCoverageError(msg.str());
      }
    }
    const double lo = spec.nu_grid.front(), hi = spec.nu_grid.back();
    t.ladder_inelastic = detail::trapezoid(spec.nu_grid, spec.ladder_inel, lo, hi);
    t.crossed_inelastic = detail::trapezoid(spec.nu_grid, spec.crossed_inel, lo, hi);
  }
  t.ladder_total = t.ladder_inelastic + spec.ladder_el_weight;
  t.crossed_total = t.crossed_inelastic + spec.crossed_el_weight;
  return t;
}

std::vector<double> linear_grid(double lo, double hi, int points) {
  if (points < 2 || !(hi > lo)) throw DomainError("linear_grid: need points >= 2 and hi > lo");
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) g[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (points - 1);
  // exact symmetry for symmetric ranges
  if (lo == -hi)
    for (int i = 0; i < points / 2; ++i)
      g[static_cast<std::size_t>(points - 1 - i)] = -g[static_cast<std::size_t>(i)];
  if (lo == -hi && points % 2 == 1) g[static_cast<std::size_t>(points / 2)] = 0.0;
  return g;
}

}  // namespace cbs
