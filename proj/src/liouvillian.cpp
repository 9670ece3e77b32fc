#include "cbs/liouvillian.hpp"

#include <array>
#include <cmath>

#include "cbs/errors.hpp"

namespace cbs {

namespace {

// Adds c * (a rho b) to the superoperator; rho is flattened row-major so
// (a rho b)_{ij} = sum_{kl} a_{ik} rho_{kl} b_{lj}.
void add_sandwich(SuperMatrix& m, cd c, const PairOperator& a, const PairOperator& b) {
  for (int i = 0; i < kPairDim; ++i) {
    for (int k = 0; k < kPairDim; ++k) {
      const cd aik = a(i, k);
      if (aik == cd(0.0)) continue;
      for (int l = 0; l < kPairDim; ++l) {
        for (int j = 0; j < kPairDim; ++j) {
          const cd blj = b(l, j);
          if (blj == cd(0.0)) continue;
          m(i * kPairDim + j, k * kPairDim + l) += c * aik * blj;
        }
      }
    }
  }
}

void add_left(SuperMatrix& m, cd c, const PairOperator& a) {
  add_sandwich(m, c, a, PairOperator::Identity());
}

void add_right(SuperMatrix& m, cd c, const PairOperator& b) {
  add_sandwich(m, c, PairOperator::Identity(), b);
}

void check_atom(int atom) {
  if (atom != 1 && atom != 2) throw DomainError("atom index must be 1 or 2");
}

std::array<PairOperator, 3> pair_dipole(int atom) {
  const auto d = atom_dipole();
  return {embed(d[0], atom), embed(d[1], atom), embed(d[2], atom)};
}

// Single-atom pieces in the 4x4 space, reused by the one- and two-atom builders.
struct AtomTerms {
  AtomOperator hamiltonian;
  std::array<AtomOperator, 3> jumps;
};

AtomTerms atom_terms(const PhysParams& p, double drive_phase) {
  const cd omega_a = p.omega * std::exp(cd(0.0, drive_phase));
  AtomOperator excited = atom_sigma(2, 2) + atom_sigma(3, 3) + atom_sigma(4, 4);
  // D^dagger . e_L = -sigma_41 for e_L = e_{+1}; Heisenberg form of the drive
  // term -(i/2)[Omega D^dag.e_L + h.c., Q] corresponds to H below.
  AtomOperator h = -p.delta * excited + 0.5 * (omega_a * atom_sigma(4, 1) + std::conj(omega_a) * atom_sigma(1, 4));
  // D^dag . [Q, D] sums over Cartesian components; with orthonormal
  // helicity vectors it reduces to one channel sigma_1e per excited level.
  std::array<AtomOperator, 3> jumps{atom_sigma(1, 2), atom_sigma(1, 3), atom_sigma(1, 4)};
  return {h, jumps};
}

}  // namespace

TwoAtomState::TwoAtomState() : coeffs_(Eigen::VectorXcd::Zero(kStateDim)) {}

TwoAtomState::TwoAtomState(Eigen::VectorXcd coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != kStateDim) throw DomainError("TwoAtomState: expected 256 coefficients");
}

TwoAtomState TwoAtomState::from_matrix(const PairOperator& rho) {
  Eigen::VectorXcd v(kStateDim);
  for (int i = 0; i < kPairDim; ++i)
    for (int j = 0; j < kPairDim; ++j) v(i * kPairDim + j) = rho(i, j);
  return TwoAtomState(std::move(v));
}

PairOperator TwoAtomState::matrix() const {
  PairOperator m;
  for (int i = 0; i < kPairDim; ++i)
    for (int j = 0; j < kPairDim; ++j) m(i, j) = coeffs_(i * kPairDim + j);
  return m;
}

cd TwoAtomState::trace() const {
  cd t = 0.0;
  for (int i = 0; i < kPairDim; ++i) t += coeffs_(i * kPairDim + i);
  return t;
}

TwoAtomState TwoAtomState::adjoint() const { return from_matrix(matrix().adjoint()); }

double TwoAtomState::hermiticity_defect() const {
  const PairOperator m = matrix();
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

cd TwoAtomState::expect(const PairOperator& q) const { return (q * matrix()).trace(); }

TwoAtomState TwoAtomState::right_multiplied(const PairOperator& q) const {
  return from_matrix(matrix() * q);
}

AtomOperator TwoAtomState::partial_trace(int keep_atom) const {
  check_atom(keep_atom);
  AtomOperator r = AtomOperator::Zero();
  for (int a = 0; a < kLevels; ++a)
    for (int b = 0; b < kLevels; ++b)
      for (int t = 0; t < kLevels; ++t) {
        const int row = keep_atom == 1 ? a * kLevels + t : t * kLevels + a;
        const int col = keep_atom == 1 ? b * kLevels + t : t * kLevels + b;
        r(a, b) += coeffs_(row * kPairDim + col);
      }
  return r;
}

TwoAtomState& TwoAtomState::operator+=(const TwoAtomState& o) {
  coeffs_ += o.coeffs_;
  return *this;
}

TwoAtomState& TwoAtomState::operator-=(const TwoAtomState& o) {
  coeffs_ -= o.coeffs_;
  return *this;
}

TwoAtomState& TwoAtomState::operator*=(cd a) {
  coeffs_ *= a;
  return *this;
}

TwoAtomState operator+(TwoAtomState a, const TwoAtomState& b) { return a += b; }
TwoAtomState operator-(TwoAtomState a, const TwoAtomState& b) { return a -= b; }
TwoAtomState operator*(cd a, TwoAtomState b) { return b *= a; }

Eigen::RowVectorXcd trace_functional() {
  Eigen::RowVectorXcd w = Eigen::RowVectorXcd::Zero(kStateDim);
  for (int i = 0; i < kPairDim; ++i) w(i * kPairDim + i) = 1.0;
  return w;
}

Eigen::RowVectorXcd expectation_functional(const PairOperator& q) {
  // Tr(q rho) = sum_{ij} q_{ji} rho_{ij}
  Eigen::RowVectorXcd w(kStateDim);
  for (int i = 0; i < kPairDim; ++i)
    for (int j = 0; j < kPairDim; ++j) w(i * kPairDim + j) = q(j, i);
  return w;
}

std::string_view to_string(GeneratorLabel label) {
  switch (label) {
    case GeneratorLabel::L0: return "L0";
    case GeneratorLabel::V_plus: return "V_plus";
    case GeneratorLabel::V_minus: return "V_minus";
    case GeneratorLabel::Full: return "Full";
  }
  return "?";
}

TwoAtomState Generator::apply(const TwoAtomState& rho) const {
  return TwoAtomState(matrix * rho.coeffs());
}

AtomOperator atom_sigma(int k, int l) {
  if (k < 1 || k > kLevels || l < 1 || l > kLevels) throw DomainError("atom_sigma: level out of range");
  AtomOperator m = AtomOperator::Zero();
  m(k - 1, l - 1) = 1.0;
  return m;
}

std::array<AtomOperator, 3> atom_dipole() {
  // D = -e_{-1} sigma_12 + e_0 sigma_13 - e_{+1} sigma_14
  const CVec3 em = helicity_to_cartesian(-1);
  const CVec3 e0 = helicity_to_cartesian(0);
  const CVec3 ep = helicity_to_cartesian(+1);
  std::array<AtomOperator, 3> d;
  for (int i = 0; i < 3; ++i)
    d[i] = -em(i) * atom_sigma(1, 2) + e0(i) * atom_sigma(1, 3) - ep(i) * atom_sigma(1, 4);
  return d;
}

PairOperator embed(const AtomOperator& op, int atom) {
  check_atom(atom);
  PairOperator r = PairOperator::Zero();
  for (int a = 0; a < kLevels; ++a)
    for (int b = 0; b < kLevels; ++b) {
      if (op(a, b) == cd(0.0)) continue;
      for (int t = 0; t < kLevels; ++t) {
        if (atom == 1)
          r(a * kLevels + t, b * kLevels + t) = op(a, b);
        else
          r(t * kLevels + a, t * kLevels + b) = op(a, b);
      }
    }
  return r;
}

PairOperator dipole_component_operator(int atom, int excited, DipoleKind kind) {
  check_atom(atom);
  if (excited < 2 || excited > 4) throw DomainError("dipole_component_operator: excited level must be 2, 3 or 4");
  switch (kind) {
    case DipoleKind::lowering: return embed(atom_sigma(1, excited), atom);
    case DipoleKind::raising: return embed(atom_sigma(excited, 1), atom);
    case DipoleKind::projector: return embed(atom_sigma(excited, excited), atom);
  }
  throw DomainError("dipole_component_operator: unknown kind");
}

Eigen::MatrixXcd build_single_atom_generator(const PhysParams& params, double drive_phase) {
  params.validate();
  const AtomTerms t = atom_terms(params, drive_phase);
  constexpr int n = kLevels;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n * n, n * n);
  auto sandwich = [&](cd c, const AtomOperator& a, const AtomOperator& b) {
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          for (int j = 0; j < n; ++j) m(i * n + j, k * n + l) += c * a(i, k) * b(l, j);
  };
  const AtomOperator id = AtomOperator::Identity();
  sandwich(cd(0.0, -1.0), t.hamiltonian, id);
  sandwich(cd(0.0, 1.0), id, t.hamiltonian);
  for (const auto& j : t.jumps) {
    const AtomOperator jd = j.adjoint();
    sandwich(2.0 * params.gamma, j, jd);
    sandwich(-params.gamma, jd * j, id);
    sandwich(-params.gamma, id, jd * j);
  }
  return m;
}

Generator build_free_generator(const PhysParams& params, double phi_L) {
  params.validate();
  Generator g{SuperMatrix::Zero(kStateDim, kStateDim), GeneratorLabel::L0};
  for (int atom = 1; atom <= 2; ++atom) {
    const AtomTerms t = atom_terms(params, atom == 1 ? 0.0 : phi_L);
    const PairOperator h = embed(t.hamiltonian, atom);
    add_left(g.matrix, cd(0.0, -1.0), h);
    add_right(g.matrix, cd(0.0, 1.0), h);
    for (const auto& jump : t.jumps) {
      const PairOperator j = embed(jump, atom);
      const PairOperator jd = j.adjoint();
      const PairOperator jdj = jd * j;
      add_sandwich(g.matrix, 2.0 * params.gamma, j, jd);
      add_left(g.matrix, -params.gamma, jdj);
      add_right(g.matrix, -params.gamma, jdj);
    }
  }
  return g;
}

ExchangeGenerators build_exchange_generators(const Vec3& n_hat, double gamma) {
  if (!(gamma > 0.0)) throw DomainError("build_exchange_generators: gamma must be positive");
  return build_exchange_generators_from_tensor(gamma * transverse_projector(n_hat));
}

ExchangeGenerators build_exchange_generators_from_tensor(const CMat3& tensor) {
  // Heisenberg form: D_a^dag . T . [Q, D_b] + [D_b^dag, Q] . T^* . D_a, summed
  // over a != b. Its Schroedinger adjoint is
  //   T_ij   (D_bj rho D_ai^dag - rho D_ai^dag D_bj)
  // + T*_ij  (D_aj rho D_bi^dag - D_bi^dag D_aj rho).
  ExchangeGenerators ex{{SuperMatrix::Zero(kStateDim, kStateDim), GeneratorLabel::V_plus},
                        {SuperMatrix::Zero(kStateDim, kStateDim), GeneratorLabel::V_minus}};
  const std::array<std::array<PairOperator, 3>, 2> dip{pair_dipole(1), pair_dipole(2)};
  for (int a = 0; a < 2; ++a) {
    const int b = 1 - a;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const cd t = tensor(i, j);
        if (t == cd(0.0)) continue;
        const PairOperator dai_dag = dip[a][i].adjoint();
        const PairOperator& dbj = dip[b][j];
        add_sandwich(ex.plus.matrix, t, dbj, dai_dag);
        add_right(ex.plus.matrix, -t, dai_dag * dbj);

        const PairOperator& daj = dip[a][j];
        const PairOperator dbi_dag = dip[b][i].adjoint();
        const cd tc = std::conj(t);
        add_sandwich(ex.minus.matrix, tc, daj, dbi_dag);
        add_left(ex.minus.matrix, -tc, dbi_dag * daj);
      }
    }
  }
  return ex;
}

Generator combine(const Generator& free, const ExchangeGenerators& exchange, cd g) {
  return {free.matrix + g * exchange.plus.matrix + std::conj(g) * exchange.minus.matrix, GeneratorLabel::Full};
}

}  // namespace cbs
