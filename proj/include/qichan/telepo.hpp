#pragma once

// Tight teleportation and dense-coding schemes: d-dimensional systems, d²
// classical signals, a maximally entangled resource Ω, unitaries U_x with
// tr(U_x^* U_y) = d δ_xy, and effect vectors Φ_x = (U_x ⊗ 1)Ω.
//
// Teleportation: ρ on system 1, ω = |Ω><Ω| on 2 ⊗ 3, Alice measures
// F_x = |Φ_x><Φ_x| on 1 ⊗ 2 and Bob applies T_x(A) = U_x^* A U_x on 3.
// Dense coding swaps the roles: Alice encodes with T_x on her half of ω,
// Bob measures the F_y.

#include <complex>
#include <vector>

#include "qichan/linalg.hpp"

namespace qichan {

/// d^{-1/2} sum_k e_k ⊗ e_k.
ComplexVector max_entangled(Index d);

/// {1, σx, σy, σz}.
std::vector<ComplexMatrix> pauli_basis();

/// U_(a,b) = S^a C^b with S e_k = e_{k+1 mod d}, C e_k = exp(2πik/d) e_k,
/// ordered with a as the slow index.
std::vector<ComplexMatrix> weyl_basis(Index d);

class LatinSquare {
 public:
  /// Throws InvariantError unless every row and column is a permutation of
  /// 0..d-1.
  explicit LatinSquare(std::vector<std::vector<int>> rows);
  /// λ(i, n) = (i + n) mod d.
  static LatinSquare cyclic(int d);

  int order() const { return static_cast<int>(rows_.size()); }
  int operator()(int i, int n) const { return rows_[static_cast<std::size_t>(i)][static_cast<std::size_t>(n)]; }
  const std::vector<std::vector<int>>& rows() const { return rows_; }

 private:
  std::vector<std::vector<int>> rows_;
};

class HadamardSet {
 public:
  /// Throws InvariantError unless each matrix is unitary with all entries of
  /// modulus d^{-1/2}.
  explicit HadamardSet(std::vector<ComplexMatrix> matrices, const Tolerances& tol = {});
  /// d copies of the Fourier matrix F_jn = exp(2πijn/d)/sqrt d.
  static HadamardSet fourier(int d);

  int order() const { return static_cast<int>(matrices_.front().rows()); }
  const ComplexMatrix& operator[](std::size_t i) const { return matrices_[i]; }
  std::size_t size() const { return matrices_.size(); }

 private:
  std::vector<ComplexMatrix> matrices_;
};

ComplexMatrix fourier_matrix(Index d);

/// (U_(i,j))_{m,n} = sqrt d · H^(i)_{j,n} · δ_{m, λ(i,n)}; orthogonality of
/// the result is verified (NumericalError on failure).
std::vector<ComplexMatrix> basis_from_design(const LatinSquare& ls, const HadamardSet& hs,
                                             const Tolerances& tol = {});

/// max_{x,y} |tr(U_x^* U_y) - d δ_xy|.
double orthogonality_residual(const std::vector<ComplexMatrix>& unitaries);

struct TeleportationScheme {
  Index d = 0;
  ComplexVector omega;
  std::vector<ComplexMatrix> unitaries;
  std::vector<ComplexVector> effects;  // Φ_x
};

/// Assembles a scheme without checking it; effects are recomputed from Ω
/// and the unitaries.  Use this to study corrupted data.
TeleportationScheme assemble_scheme(Index d, const ComplexVector& omega,
                                    std::vector<ComplexMatrix> unitaries);

/// Scheme with the standard Ω.  Throws InvariantError unless the d²
/// unitaries are unitary and trace-orthogonal.
TeleportationScheme build_scheme(const std::vector<ComplexMatrix>& unitaries, Index d,
                                 const Tolerances& tol = {});

struct SchemeInvariants {
  double omega_residual = 0.0;         // max |Schmidt coefficient - d^{-1/2}|
  double orthogonality_residual = 0.0; // max |tr(U_x^* U_y) - d δ_xy|
  double unitarity_residual = 0.0;     // max |U_x^* U_x - 1|
  double gram_residual = 0.0;          // max |<Φ_x, Φ_y> - δ_xy|
  double link_residual = 0.0;          // max |Φ_x - (U_x ⊗ 1)Ω|
  double completeness_residual = 0.0;  // max |sum |Φ_x><Φ_x| - 1|

  bool holds(double eps) const;
};

SchemeInvariants check_scheme(const TeleportationScheme& s);

/// max over ρ = e_μν, A = e_αβ of |sum_x tr((ρ ⊗ ω)(F_x ⊗ T_x(A))) - tr(ρA)|.
double verify_teleportation(const TeleportationScheme& s);
/// max over x, y of |tr(ω (T_x ⊗ id)(F_y)) - δ_xy|.
double verify_dense_coding(const TeleportationScheme& s);

struct OverlapResult {
  bool exists = false;
  cplx lambda{0.0, 0.0};
  double residual = 0.0;        // Frobenius distance of the induced map from λ·1
  bool maximal = false;         // |λ| = 1/dim H
  bool maximally_entangled = false;
  bool swap_equal = false;
};

/// Solves <φ ⊗ Ω1, Ω2 ⊗ ψ> = λ<φ, ψ> for Ω1 ∈ K ⊗ H, Ω2 ∈ H ⊗ K.
OverlapResult overlap_lambda(const ComplexVector& omega1, const ComplexVector& omega2, Index dim_h,
                             Index dim_k, const Tolerances& tol = {});

struct StateIndependence {
  double skew_residual = 0.0;   // max |tr(ω1 U_x^* U_y) - δ_xy|
  double state_residual = 0.0;  // max |ω1 - 1/d|
};

StateIndependence check_state_independence(const std::vector<ComplexMatrix>& unitaries,
                                           const ComplexMatrix& omega1);

struct PauliEquivalence {
  bool equivalent = false;
  double residual = 0.0;
  ComplexMatrix w;                 // U_x = c_x U_0 W^* σ_x W
  std::vector<cplx> phases;
};

/// Tests whether a trace-orthogonal unitary basis of M_2 is the Pauli basis
/// up to a common unitary frame change and phases.
PauliEquivalence pauli_equivalence(const std::vector<ComplexMatrix>& basis, const Tolerances& tol = {});

}  // namespace qichan
