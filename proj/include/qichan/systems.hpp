#pragma once

// Observable algebras, states, effects and the basic operations on them:
// composition, restriction, the qubit Bloch parametrization, Schmidt
// decomposition, purification and an entanglement witness.
//
// Hybrid systems are stored as one total-dimension matrix; for every
// classical factor the matrix must be block diagonal in that factor's index.

#include <array>
#include <set>
#include <utility>
#include <vector>

#include "qichan/linalg.hpp"

namespace qichan {

enum class FactorKind { classical, quantum };

struct Factor {
  FactorKind kind = FactorKind::quantum;
  Index dim = 1;

  friend bool operator==(const Factor&, const Factor&) = default;
};

class Algebra {
 public:
  Algebra() = default;
  explicit Algebra(std::vector<Factor> factors);

  static Algebra quantum(Index d);
  static Algebra classical(Index n);
  static Algebra qubits(int n);

  const std::vector<Factor>& factors() const { return factors_; }
  std::vector<Index> dims() const;
  Index total_dim() const;
  std::size_t size() const { return factors_.size(); }
  bool is_purely_quantum() const;

  /// Sub-algebra formed by the listed factors, in ascending order.
  Algebra subalgebra(const std::set<std::size_t>& keep) const;
  /// Tensor product A ⊗ B.
  Algebra compose(const Algebra& other) const;

  friend bool operator==(const Algebra&, const Algebra&) = default;

 private:
  std::vector<Factor> factors_;
};

/// True when `m` has no coherences across the index of any classical factor.
bool respects_classical_blocks(const Algebra& algebra, const ComplexMatrix& m, double eps);

/// Positive, trace-one operator tagged with its algebra.
class State {
 public:
  State(Algebra algebra, ComplexMatrix rho, const Tolerances& tol = {});

  /// Pure state |psi><psi| on a single quantum factor or on `algebra`.
  static State pure(const ComplexVector& psi, const Tolerances& tol = {});
  static State pure(Algebra algebra, const ComplexVector& psi, const Tolerances& tol = {});
  static State maximally_mixed(Index d);
  /// Classical distribution as a diagonal state on C(X).
  static State classical(const std::vector<double>& p, const Tolerances& tol = {});

  const Algebra& algebra() const { return algebra_; }
  const ComplexMatrix& rho() const { return rho_; }
  Index dim() const { return rho_.rows(); }

  /// rho(A) = tr(rho A).
  cplx expectation(const ComplexMatrix& a) const;

 private:
  Algebra algebra_;
  ComplexMatrix rho_;
};

/// Operator 0 <= F <= 1.
class Effect {
 public:
  Effect(Algebra algebra, ComplexMatrix f, const Tolerances& tol = {});

  const Algebra& algebra() const { return algebra_; }
  const ComplexMatrix& f() const { return f_; }
  /// 1 - F
  Effect complement() const;

 private:
  Algebra algebra_;
  ComplexMatrix f_;
};

State tensor(const State& a, const State& b);

/// Restriction to the listed factors (partial trace / marginalization over
/// the rest).
State restrict(const State& s, const std::set<std::size_t>& keep, const Tolerances& tol = {});

using BlochVector = std::array<double, 3>;

double bloch_length(const BlochVector& x);
/// rho = (1 + x·sigma)/2; throws InvariantError when |x| > 1 + eps.
State bloch_to_state(const BlochVector& x, const Tolerances& tol = {});
/// x_k = tr(rho sigma_k).
BlochVector state_to_bloch(const State& s);

/// Phi = sum_k c_k e_k ⊗ e'_k with c_k > 0 descending.
struct SchmidtDecomposition {
  RealVector coefficients;
  ComplexMatrix left_basis;   // dimA × rank, columns e_k
  ComplexMatrix right_basis;  // dimB × rank, columns e'_k

  Index rank() const { return coefficients.size(); }
  ComplexVector reconstruct() const;
};

SchmidtDecomposition schmidt(const ComplexVector& phi, Index dim_a, Index dim_b,
                             const Tolerances& tol = {});

struct Purification {
  ComplexVector vector;  // on H ⊗ C^ancilla_dim
  Index ancilla_dim = 0;
};

/// Minimal purification: the ancilla dimension is rank(rho) so the ancilla
/// marginal has no zero eigenvalues.
Purification purify(const State& s, const Tolerances& tol = {});

enum class SeparabilityVerdict { pass, fail };

struct SeparabilityWitness {
  SeparabilityVerdict verdict = SeparabilityVerdict::pass;
  double min_eigenvalue = 0.0;  // of the partial transpose
  ComplexVector eigenvector;
};

/// Necessary condition for separability across `side_a` | rest: the
/// partial transpose must be positive.  `fail` certifies entanglement,
/// `pass` is inconclusive in general.
SeparabilityWitness is_separable_necessary(const State& s, const std::set<std::size_t>& side_a,
                                           const Tolerances& tol = {});

}  // namespace qichan
