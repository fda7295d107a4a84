#include "qichan/systems.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace qichan {

Algebra::Algebra(std::vector<Factor> factors) : factors_(std::move(factors)) {
  for (const auto& f : factors_)
    if (f.dim < 1) throw InvariantError("factor dimension must be positive");
}

Algebra Algebra::quantum(Index d) { return Algebra({{FactorKind::quantum, d}}); }

Algebra Algebra::classical(Index n) { return Algebra({{FactorKind::classical, n}}); }

Algebra Algebra::qubits(int n) {
  return Algebra(std::vector<Factor>(static_cast<std::size_t>(n), {FactorKind::quantum, 2}));
}

std::vector<Index> Algebra::dims() const {
  std::vector<Index> d;
  d.reserve(factors_.size());
  for (const auto& f : factors_) d.push_back(f.dim);
  return d;
}

Index Algebra::total_dim() const {
  Index n = 1;
  for (const auto& f : factors_) n *= f.dim;
  return n;
}

bool Algebra::is_purely_quantum() const {
  for (const auto& f : factors_)
    if (f.kind == FactorKind::classical) return false;
  return true;
}

Algebra Algebra::subalgebra(const std::set<std::size_t>& keep) const {
  if (keep.empty()) throw InvariantError("restriction needs at least one factor");
  std::vector<Factor> out;
  for (std::size_t k : keep) {
    if (k >= factors_.size()) throw DimensionError("factor index out of range");
    out.push_back(factors_[k]);
  }
  return Algebra(std::move(out));
}

Algebra Algebra::compose(const Algebra& other) const {
  std::vector<Factor> out = factors_;
  out.insert(out.end(), other.factors_.begin(), other.factors_.end());
  return Algebra(std::move(out));
}

bool respects_classical_blocks(const Algebra& algebra, const ComplexMatrix& m, double eps) {
  const auto dims = algebra.dims();
  const Index n = algebra.total_dim();
  // stride of factor k in the row-major composite index
  std::vector<Index> stride(dims.size(), 1);
  for (std::size_t k = dims.size(); k-- > 1;) stride[k - 1] = stride[k] * dims[k];
  for (std::size_t k = 0; k < dims.size(); ++k) {
    if (algebra.factors()[k].kind != FactorKind::classical) continue;
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) {
        const Index di = (i / stride[k]) % dims[k];
        const Index dj = (j / stride[k]) % dims[k];
        if (di != dj && std::abs(m(i, j)) > eps) return false;
      }
  }
  return true;
}

State::State(Algebra algebra, ComplexMatrix rho, const Tolerances& tol)
    : algebra_(std::move(algebra)), rho_(std::move(rho)) {
  const Index n = algebra_.total_dim();
  if (rho_.rows() != n || rho_.cols() != n)
    throw DimensionError("density matrix size " + std::to_string(rho_.rows()) + "x" +
                         std::to_string(rho_.cols()) + " does not match algebra dimension " +
                         std::to_string(n));
  if (!is_hermitian(rho_, tol.alg)) throw InvariantError("density matrix is not hermitian");
  rho_ = hermitian_part(rho_);
  if (std::abs(rho_.trace() - 1.0) > tol.alg) throw InvariantError("density matrix trace is not 1");
  if (min_eigenvalue(rho_) < -tol.alg) throw InvariantError("density matrix is not positive");
  if (!respects_classical_blocks(algebra_, rho_, tol.alg))
    throw InvariantError("state has coherences across a classical factor");
}

State State::pure(const ComplexVector& psi, const Tolerances& tol) {
  return pure(Algebra::quantum(psi.size()), psi, tol);
}

State State::pure(Algebra algebra, const ComplexVector& psi, const Tolerances& tol) {
  if (std::abs(psi.norm() - 1.0) > tol.alg) throw InvariantError("state vector is not normalized");
  return State(std::move(algebra), projector(psi), tol);
}

State State::maximally_mixed(Index d) {
  return State(Algebra::quantum(d), identity(d) / static_cast<double>(d));
}

State State::classical(const std::vector<double>& p, const Tolerances& tol) {
  ComplexMatrix rho = ComplexMatrix::Zero(static_cast<Index>(p.size()), static_cast<Index>(p.size()));
  for (std::size_t i = 0; i < p.size(); ++i) rho(static_cast<Index>(i), static_cast<Index>(i)) = p[i];
  return State(Algebra::classical(static_cast<Index>(p.size())), std::move(rho), tol);
}

cplx State::expectation(const ComplexMatrix& a) const {
  if (a.rows() != dim() || a.cols() != dim()) throw DimensionError("observable size mismatch");
  return (rho_ * a).trace();
}

Effect::Effect(Algebra algebra, ComplexMatrix f, const Tolerances& tol)
    : algebra_(std::move(algebra)), f_(std::move(f)) {
  const Index n = algebra_.total_dim();
  if (f_.rows() != n || f_.cols() != n) throw DimensionError("effect size does not match algebra");
  if (!is_hermitian(f_, tol.alg)) throw InvariantError("effect is not hermitian");
  f_ = hermitian_part(f_);
  const HermitianEigen e = eigh(f_);
  if (e.values(0) < -tol.alg || e.values(e.values.size() - 1) > 1.0 + tol.alg)
    throw InvariantError("effect violates 0 <= F <= 1");
  if (!respects_classical_blocks(algebra_, f_, tol.alg))
    throw InvariantError("effect has coherences across a classical factor");
}

Effect Effect::complement() const {
  return Effect(algebra_, identity(f_.rows()) - f_, Tolerances{});
}

State tensor(const State& a, const State& b) {
  return State(a.algebra().compose(b.algebra()), kron(a.rho(), b.rho()));
}

State restrict(const State& s, const std::set<std::size_t>& keep, const Tolerances& tol) {
  const Algebra sub = s.algebra().subalgebra(keep);
  const auto dims = s.algebra().dims();
  const std::vector<Index> kept(keep.begin(), keep.end());
  return State(sub, partial_trace(s.rho(), dims, kept), tol);
}

double bloch_length(const BlochVector& x) {
  return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
}

State bloch_to_state(const BlochVector& x, const Tolerances& tol) {
  if (bloch_length(x) > 1.0 + tol.alg)
    throw InvariantError("Bloch vector longer than 1 is not a positive state");
  ComplexMatrix rho = pauli(0);
  for (int k = 0; k < 3; ++k) rho += x[k] * pauli(k + 1);
  rho *= 0.5;
  // |x| may exceed 1 by up to eps; the eigenvalue (1-|x|)/2 is then ~ -eps/2
  return State(Algebra::quantum(2), std::move(rho), tol);
}

BlochVector state_to_bloch(const State& s) {
  if (s.dim() != 2 || !s.algebra().is_purely_quantum())
    throw DimensionError("Bloch vectors are defined for a single qubit");
  BlochVector x{};
  for (int k = 0; k < 3; ++k) x[k] = s.expectation(pauli(k + 1)).real();
  return x;
}

ComplexVector SchmidtDecomposition::reconstruct() const {
  const Index da = left_basis.rows();
  const Index db = right_basis.rows();
  ComplexVector v = ComplexVector::Zero(da * db);
  for (Index k = 0; k < rank(); ++k)
    v += coefficients(k) * kron(left_basis.col(k), right_basis.col(k));
  return v;
}

SchmidtDecomposition schmidt(const ComplexVector& phi, Index dim_a, Index dim_b,
                             const Tolerances& tol) {
  if (phi.size() != dim_a * dim_b) throw DimensionError("vector length != dimA * dimB");
  if (std::abs(phi.norm() - 1.0) > tol.alg) throw InvariantError("Schmidt input is not a unit vector");
  const ComplexMatrix m = reshape_vector(phi, dim_a, dim_b);
  // m = U S V^*  =>  phi = sum_k s_k u_k ⊗ conj(v_k)
  Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RealVector& s = svd.singularValues();
  Index rank = 0;
  while (rank < s.size() && s(rank) > tol.rank * std::max(1.0, s(0))) ++rank;
  SchmidtDecomposition out;
  out.coefficients = s.head(rank);
  out.left_basis = svd.matrixU().leftCols(rank);
  out.right_basis = svd.matrixV().leftCols(rank).conjugate();
  return out;
}

Purification purify(const State& s, const Tolerances& tol) {
  if (!s.algebra().is_purely_quantum()) throw InvariantError("purification needs a quantum state");
  const HermitianEigen e = eigh(s.rho());
  const Index d = s.dim();
  std::vector<Index> support;
  for (Index k = d; k-- > 0;)
    if (e.values(k) > tol.rank) support.push_back(k);
  const Index r = static_cast<Index>(support.size());
  ComplexVector v = ComplexVector::Zero(d * r);
  for (Index q = 0; q < r; ++q) {
    const Index k = support[static_cast<std::size_t>(q)];
    v += std::sqrt(e.values(k)) * kron(e.vectors.col(k), basis_vector(r, q));
  }
  v /= v.norm();
  return {v, r};
}

SeparabilityWitness is_separable_necessary(const State& s, const std::set<std::size_t>& side_a,
                                           const Tolerances& tol) {
  const auto dims = s.algebra().dims();
  if (side_a.empty() || side_a.size() >= dims.size())
    throw InvariantError("cut must split the factors into two nonempty sides");
  std::vector<Index> side_b;
  for (std::size_t k = 0; k < dims.size(); ++k)
    if (!side_a.contains(k)) side_b.push_back(static_cast<Index>(k));
  for (std::size_t k : side_a)
    if (k >= dims.size()) throw DimensionError("factor index out of range");
  const HermitianEigen e = eigh(partial_transpose(s.rho(), dims, side_b));
  SeparabilityWitness w;
  w.min_eigenvalue = e.values(0);
  w.eigenvector = e.vectors.col(0);
  w.verdict = w.min_eigenvalue < -tol.alg ? SeparabilityVerdict::fail : SeparabilityVerdict::pass;
  return w;
}

}  // namespace qichan
