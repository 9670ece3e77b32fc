#pragma once

#include <map>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "cbs/liouvillian.hpp"
#include "cbs/perturbative.hpp"

namespace cbs {

/// (z - L0)^{-1} for many shifts z. L0 is reduced once to upper Hessenberg
/// form H = Q^H L~ Q, where L~ = L0 - c rho0 w^T has the stationary mode moved
/// to -c; each shift then costs one O(n^2) Hessenberg elimination. The
/// stationary component of an input is propagated exactly as rho0 / z.
class Resolvent {
 public:
  explicit Resolvent(const Generator& free);
  Resolvent(const Generator& free, const TwoAtomState& rho0);

  /// LU factorization of (z - H), valid for traceless inputs.
  class Shifted {
   public:
    /// Solves (z - H) y = b for b, y in Hessenberg coordinates.
    Eigen::VectorXcd solve(const Eigen::VectorXcd& b) const;
    cd z() const { return z_; }

   private:
    friend class Resolvent;
    using RowMajor = Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    RowMajor u_;
    Eigen::VectorXcd multipliers_;
    std::vector<char> swapped_;
    cd z_;
  };

  /// Throws ResolventPoleError when z is (numerically) an eigenvalue.
  Shifted factor(cd z) const;

  /// x = (z - L0)^{-1} v.
  TwoAtomState apply(cd z, const TwoAtomState& v) const;

  Eigen::VectorXcd to_basis(const Eigen::VectorXcd& v) const { return q_.adjoint() * v; }
  Eigen::VectorXcd from_basis(const Eigen::VectorXcd& y) const { return q_ * y; }
  SuperMatrix to_basis(const SuperMatrix& m) const { return q_.adjoint() * m * q_; }
  Eigen::RowVectorXcd functional_to_basis(const Eigen::RowVectorXcd& w) const { return w * q_; }

  const TwoAtomState& stationary() const { return rho0_; }

 private:
  void reduce(const Generator& free);

  TwoAtomState rho0_;
  SuperMatrix h_;
  SuperMatrix q_;
  double deflation_shift_ = 1.0;
  double scale_ = 1.0;
};

/// One-off resolvent application; builds the reduction internally.
TwoAtomState resolvent_apply(const Generator& free, cd z, const TwoAtomState& v);

/// Initial conditions rho^(m,n) sigma21^alpha for the regression of
/// <sigma21^alpha(0) sigma12^beta(tau)>, per formal order, together with the
/// connected versions that have the factorized mean-dipole part removed.
struct RegressionSources {
  std::map<Order, TwoAtomState> raw;
  std::map<Order, TwoAtomState> connected;
};

RegressionSources qrt_sources(const PerturbativeState& pert, int alpha);

struct DensityPair {
  double ladder = 0.0;
  double crossed = 0.0;
};

/// Inelastic double-scattering spectrum S(nu) = (1/pi) Re G~(-i nu) at order
/// |g|^2, in units of 2|g~|^2/15 (the orientation factor |Delta_{+1,+1}|^2 of
/// the underlying configuration is divided out).
class SpectrumEngine {
 public:
  explicit SpectrumEngine(const DoubleScatteringModel& model);

  /// Raw density at one frequency (units of gamma).
  DensityPair density(double nu) const;
  /// Density at a general Laplace variable z = Gamma - i nu.
  DensityPair density_at(cd z) const;

  double ladder_elastic_weight() const { return elastic_.ladder_elastic; }
  double crossed_elastic_weight() const { return elastic_.crossed_elastic; }
  /// Algebraic intensities of the same configuration (average units).
  const IntensityTerms& intensities() const { return elastic_; }
  const PhysParams& params() const { return params_; }

  /// Resonance positions used to split quadratures: 0, +-Omega/2, +-Omega, +-2Omega.
  std::vector<double> resonance_positions() const;

 private:
  PhysParams params_;
  Resolvent resolvent_;
  SuperMatrix v_plus_;
  SuperMatrix v_minus_;
  // connected sources in Hessenberg coordinates, indexed [alpha - 1]
  std::array<std::map<Order, Eigen::VectorXcd>, 2> sources_;
  std::array<Eigen::RowVectorXcd, 2> observe_;  // sigma12^beta functionals
  std::array<std::array<cd, 2>, 2> phase_;
  double unit_factor_ = 1.0;
  IntensityTerms elastic_;
};

enum class Channel { ladder, crossed };

struct SpectrumResult {
  std::vector<double> nu_grid;
  std::vector<double> ladder_inel;
  std::vector<double> crossed_inel;
  double ladder_el_weight = 0.0;
  double crossed_el_weight = 0.0;
  /// max |S(nu) - S(-nu)| / max |S| before symmetrization (0 when not symmetrized).
  double max_asymmetry = 0.0;
  bool symmetrized = false;
  PhysParams params;
  /// Present when the result came from cbs_spectrum; lets integrators
  /// refine beyond the grid.
  std::shared_ptr<const SpectrumEngine> engine;

  const std::vector<double>& channel(Channel c) const { return c == Channel::ladder ? ladder_inel : crossed_inel; }
  /// Copy with densities and elastic weights multiplied by `factor`.
  SpectrumResult scaled(double factor) const;
};

/// Evaluates the spectrum on a grid. At delta = 0 the output is the symmetric
/// part (S(nu) + S(-nu))/2, with the raw asymmetry kept in max_asymmetry.
SpectrumResult cbs_spectrum(const PhysParams& params, const Configuration& cfg, const std::vector<double>& nu_grid);
SpectrumResult cbs_spectrum(std::shared_ptr<const SpectrumEngine> engine, const std::vector<double>& nu_grid);

struct SpectrumTotals {
  double ladder_inelastic = 0.0;
  double crossed_inelastic = 0.0;
  double ladder_total = 0.0;
  double crossed_total = 0.0;
};

/// Integrated spectra plus elastic weights. With an engine attached, the
/// densities are integrated adaptively over the whole real axis, split at
/// the resonance positions. Grid-only results use the trapezoid rule and
/// throw GridCoverageError when a boundary density exceeds 1e-6 of the peak.
SpectrumTotals integrate_spectrum(const SpectrumResult& spec);

/// Uniform grid of `points` values on [lo, hi].
std::vector<double> linear_grid(double lo, double hi, int points);

}  // namespace cbs
