#pragma once

#include <array>
#include <complex>
#include <string_view>
#include <utility>

#include <Eigen/Dense>

#include "cbs/core_model.hpp"

namespace cbs {

inline constexpr int kLevels = 4;
inline constexpr int kPairDim = kLevels * kLevels;    // two-atom Hilbert space
inline constexpr int kStateDim = kPairDim * kPairDim;  // two-atom operator space

using AtomOperator = Eigen::Matrix<cd, kLevels, kLevels>;
using PairOperator = Eigen::Matrix<cd, kPairDim, kPairDim>;
using SuperMatrix = Eigen::MatrixXcd;

/// Two-atom pair index of levels (a1, a2), each in 1..4, atom 1 outermost.
constexpr int pair_index(int level1, int level2) { return (level1 - 1) * kLevels + (level2 - 1); }

/// A vector in the 256-dimensional two-atom operator space: the 16x16
/// density matrix flattened row-major. Used both for physical states
/// (trace 1) and for perturbative corrections and regression sources.
class TwoAtomState {
 public:
  TwoAtomState();
  explicit TwoAtomState(Eigen::VectorXcd coeffs);
  static TwoAtomState from_matrix(const PairOperator& rho);

  const Eigen::VectorXcd& coeffs() const { return coeffs_; }
  Eigen::VectorXcd& coeffs() { return coeffs_; }
  PairOperator matrix() const;

  cd trace() const;
  TwoAtomState adjoint() const;
  /// max |rho - rho^dagger|
  double hermiticity_defect() const;
  /// Tr(q rho)
  cd expect(const PairOperator& q) const;
  /// rho q
  TwoAtomState right_multiplied(const PairOperator& q) const;
  /// 4x4 reduced operator of one atom (partial trace over the other).
  AtomOperator partial_trace(int keep_atom) const;
  double norm() const { return coeffs_.norm(); }

  TwoAtomState& operator+=(const TwoAtomState& o);
  TwoAtomState& operator-=(const TwoAtomState& o);
  TwoAtomState& operator*=(cd a);

 private:
  Eigen::VectorXcd coeffs_;
};

TwoAtomState operator+(TwoAtomState a, const TwoAtomState& b);
TwoAtomState operator-(TwoAtomState a, const TwoAtomState& b);
TwoAtomState operator*(cd a, TwoAtomState b);

/// Row vector w with w . rho = Tr(rho).
Eigen::RowVectorXcd trace_functional();
/// Row vector w with w . rho = Tr(q rho).
Eigen::RowVectorXcd expectation_functional(const PairOperator& q);

enum class GeneratorLabel { L0, V_plus, V_minus, Full };
std::string_view to_string(GeneratorLabel label);

/// Linear map on TwoAtomState (Schroedinger picture, d rho/dt = G rho).
struct Generator {
  SuperMatrix matrix;
  GeneratorLabel label = GeneratorLabel::L0;

  TwoAtomState apply(const TwoAtomState& rho) const;
};

struct ExchangeGenerators {
  Generator plus;   ///< coefficient of g
  Generator minus;  ///< coefficient of g*
};

/// |k><l| on one atom, levels 1..4.
AtomOperator atom_sigma(int k, int l);
/// Cartesian components of the dipole lowering operator D of one atom.
std::array<AtomOperator, 3> atom_dipole();
/// One-atom operator acting on `atom` (1 or 2), identity on the other.
PairOperator embed(const AtomOperator& op, int atom);

enum class DipoleKind { lowering, raising, projector };

/// sigma_{1e} (lowering), sigma_{e1} (raising) or sigma_{ee} (projector) on
/// `atom`, embedded in the two-atom space. `excited` in {2, 3, 4}.
PairOperator dipole_component_operator(int atom, int excited, DipoleKind kind);

/// 16x16 single-atom generator with drive amplitude omega * exp(i phase).
Eigen::MatrixXcd build_single_atom_generator(const PhysParams& params, double drive_phase);

/// L0 = L_1 + L_2 for two independent driven atoms; atom 2's drive carries
/// the phase factor exp(i phi_L).
Generator build_free_generator(const PhysParams& params, double phi_L);

/// Exchange generators for the radiative coupling tensor gamma * g * (1 - n n).
ExchangeGenerators build_exchange_generators(const Vec3& n_hat, double gamma = 1.0);

/// Same, for an arbitrary coupling tensor T (the full term is g V+ + g* V-
/// with T = g * tensor).
ExchangeGenerators build_exchange_generators_from_tensor(const CMat3& tensor);

/// L0 + g V+ + g* V-.
Generator combine(const Generator& free, const ExchangeGenerators& exchange, cd g);

}  // namespace cbs
