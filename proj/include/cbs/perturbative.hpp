#pragma once

#include <compare>
#include <map>
#include <vector>

#include <Eigen/LU>

#include "cbs/core_model.hpp"
#include "cbs/liouvillian.hpp"

namespace cbs {

/// Formal order (m, n) in (g, g*).
struct Order {
  int m = 0;
  int n = 0;
  auto operator<=>(const Order&) const = default;
};

/// rho(g) = sum_{m+n<=2} g^m (g*)^n rho^(m,n).
struct PerturbativeState {
  std::map<Order, TwoAtomState> orders;

  const TwoAtomState& at(int m, int n) const;
  /// Orders with m != n carry exp(+-i k0 r (m-n)) and vanish under
  /// configuration averaging; observables use only m == n.
  static bool survives_configuration_average(Order o) { return o.m == o.n; }
  /// Resummed state for a concrete coupling g.
  TwoAtomState resum(cd g) const;
};

/// Unique stationary state of a generator, normalized to unit trace.
/// Throws DegeneracyError when the stationary subspace is not one-dimensional.
TwoAtomState steady_state(const Generator& generator);

/// Stationary state of the uncoupled atoms.
TwoAtomState zeroth_steady_state(const Generator& free);

/// Solves L0 x = b for traceless b within the traceless subspace. L0 is
/// singular on the full space; the stationary mode is deflated with the
/// rank-one term rho0 w^T, w the trace functional.
class DeflatedSolver {
 public:
  DeflatedSolver(const Generator& free, const TwoAtomState& rho0);
  TwoAtomState solve(const TwoAtomState& rhs) const;

 private:
  Eigen::PartialPivLU<SuperMatrix> lu_;
};

PerturbativeState perturbative_corrections(const Generator& free, const Generator& v_plus,
                                           const Generator& v_minus, const TwoAtomState& rho0);

/// Double-scattering intensities of one configuration, with |g|^2 divided out.
struct IntensityTerms {
  double ladder_total = 0.0;
  double crossed_total = 0.0;
  double ladder_elastic = 0.0;
  double crossed_elastic = 0.0;
  double ladder_inelastic = 0.0;
  double crossed_inelastic = 0.0;
  double geometric_factor = 0.0;  ///< |Delta_{+1,+1}|^2
  double phase_factor = 1.0;      ///< cos((k + k_L) . r_12)

  /// Values divided by |Delta_{+1,+1}|^2. After averaging over orientations
  /// this geometric factor becomes 2/15 and |g|^2 becomes |g~|^2, so these are
  /// the averaged intensities in units of 2|g~|^2/15 (at theta = 0).
  IntensityTerms in_average_units() const;
  double enhancement() const { return 1.0 + crossed_total / ladder_total; }
};

struct DetectedIntensities {
  double ladder = 0.0;   ///< sum_a <sigma22^a>
  double crossed = 0.0;  ///< 2 Re <sigma21^1 sigma12^2> exp(i k . r_12)
};

/// h||h detected intensities of an arbitrary (possibly correction) state.
DetectedIntensities detected_intensities(const TwoAtomState& rho, const Configuration& cfg);

IntensityTerms intensity_terms(const PerturbativeState& pert, const Configuration& cfg);

/// Everything derived from one (params, configuration) pair.
struct DoubleScatteringModel {
  PhysParams params;
  Configuration config;
  Generator free;
  ExchangeGenerators exchange;
  PerturbativeState pert;
};

DoubleScatteringModel build_double_scattering(const PhysParams& params, const Configuration& cfg);

/// Smallest eigenvalue of the Hermitian part of a state (positivity check).
double min_eigenvalue(const TwoAtomState& rho);

}  // namespace cbs
