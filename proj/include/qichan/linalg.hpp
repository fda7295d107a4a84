#pragma once

// Dense complex linear algebra shared by every module.  Operators, density
// matrices, effects and vectors are all carried by Eigen's dynamic complex
// matrices; vectors are 1-column matrices.

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qichan {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Numerical thresholds used throughout the library.
///
/// `alg` bounds the residual of algebraic identities (hermiticity, trace,
/// unitarity, positivity).  `rank` is the relative cutoff below which a
/// singular value or eigenvalue is treated as zero.
struct Tolerances {
  double alg = 1e-9;
  double rank = 1e-10;
};

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an input violates a mathematical invariant (not a state, not
/// a channel, not a Latin square ...).
class InvariantError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ComplexMatrix identity(Index d);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix kron_all(std::span<const ComplexMatrix> factors);

/// |v><v| and |a><b|.
ComplexMatrix projector(const ComplexVector& v);
ComplexMatrix outer(const ComplexVector& a, const ComplexVector& b);

/// Standard basis vector e_k of C^d.
ComplexVector basis_vector(Index d, Index k);
/// Matrix unit e_{ij} = |i><j| in M_d.
ComplexMatrix matrix_unit(Index d, Index i, Index j);

/// Pauli matrices; index 0 is the identity, 1..3 are x, y, z.
ComplexMatrix pauli(int k);

bool is_hermitian(const ComplexMatrix& m, double eps);
bool is_unitary(const ComplexMatrix& m, double eps);
bool is_isometry(const ComplexMatrix& m, double eps);
/// Hermitian with smallest eigenvalue >= -eps.
bool is_psd(const ComplexMatrix& m, double eps);

ComplexMatrix hermitian_part(const ComplexMatrix& m);

struct HermitianEigen {
  RealVector values;      // ascending
  ComplexMatrix vectors;  // columns
};
/// Eigen-decomposition of the hermitian part of `m`.
HermitianEigen eigh(const ComplexMatrix& m);

double min_eigenvalue(const ComplexMatrix& m);

/// f(H) for hermitian H via the spectral calculus.
template <typename F>
ComplexMatrix hermitian_function(const ComplexMatrix& h, F&& f) {
  const HermitianEigen e = eigh(h);
  RealVector fv(e.values.size());
  for (Eigen::Index i = 0; i < e.values.size(); ++i) fv(i) = f(e.values(i));
  return e.vectors * fv.asDiagonal() * e.vectors.adjoint();
}

/// Principal square root of a positive semidefinite matrix (negative
/// round-off eigenvalues are clipped).
ComplexMatrix psd_sqrt(const ComplexMatrix& m);

/// Operator (spectral) norm, largest singular value.
double operator_norm(const ComplexMatrix& m);
/// Sum of singular values.
double trace_norm(const ComplexMatrix& m);

/// Unitary U maximizing Re tr(U m); i.e. the polar factor of m^*.
ComplexMatrix maximizing_unitary(const ComplexMatrix& m);

/// Partial trace of an operator on (d_0 ⊗ ... ⊗ d_{k-1}) keeping the listed
/// factors in ascending order.
ComplexMatrix partial_trace(const ComplexMatrix& rho, std::span<const Index> dims,
                            std::span<const Index> keep);

/// Partial transpose over the listed factors.
ComplexMatrix partial_transpose(const ComplexMatrix& rho, std::span<const Index> dims,
                                std::span<const Index> transposed);

/// Reshape a vector on C^rows ⊗ C^cols into its rows×cols coefficient matrix.
ComplexMatrix reshape_vector(const ComplexVector& v, Index rows, Index cols);

/// Completes the orthonormal columns of `m` (n×k, k <= n) to an n×n unitary.
/// Extra columns come from Gram-Schmidt on `seed_columns` (n×n); pass the
/// identity for a canonical completion.
ComplexMatrix complete_to_unitary(const ComplexMatrix& m, const ComplexMatrix& seed_columns,
                                  double eps);

}  // namespace qichan
