#pragma once

// Channels between matrix algebras and their representations.
//
// Conventions.  A channel is stored by its Kraus operators K_x, each mapping
// the Schrödinger input space C^in_dim to the output space C^out_dim.
//   Heisenberg picture   T(B)    = sum_x K_x^* B K_x      (out×out -> in×in)
//   Schrödinger picture  T_*(r)  = sum_x K_x r K_x^*      (in×in -> out×out)
// with sum_x K_x^* K_x = 1 (unitality of T, trace preservation of T_*).
//
// The Choi matrix is the trace-one bipartite state (id ⊗ T_*)(|Ω><Ω|) on
// C^in ⊗ C^out, Ω maximally entangled.  A Stinespring isometry maps
// C^in -> C^out ⊗ C^ell with T(X) = V^*(X ⊗ 1_ell)V.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qichan/linalg.hpp"
#include "qichan/systems.hpp"

namespace qichan {

class Channel;

/// General linear map M_out -> M_in in the Heisenberg picture, written as
/// B -> sum_i L_i B R_i.  Not necessarily positive; this is the carrier for
/// norm computations on differences such as T - id or the transpose.
class LinearMap {
 public:
  struct Term {
    ComplexMatrix left;   // in×out
    ComplexMatrix right;  // out×in
  };

  LinearMap(Index in_dim, Index out_dim, std::vector<Term> terms = {});

  static LinearMap from_channel(const Channel& t);
  static LinearMap identity(Index d);
  /// Transpose on M_d (with respect to the standard basis).
  static LinearMap transpose(Index d);

  Index in_dim() const { return in_dim_; }
  Index out_dim() const { return out_dim_; }
  const std::vector<Term>& terms() const { return terms_; }

  /// Heisenberg action on an out×out matrix.
  ComplexMatrix apply(const ComplexMatrix& b) const;
  /// Predual (Schrödinger) action on an in×in matrix: tr(T_*(r) B) = tr(r T(B)).
  ComplexMatrix apply_predual(const ComplexMatrix& r) const;

  /// T ⊗ id_n.
  LinearMap tensor_identity(Index n) const;
  /// Unnormalized Choi operator sum_{ij} |i><j| ⊗ T_*(|i><j|) on C^in ⊗ C^out.
  ComplexMatrix choi_operator() const;

  LinearMap operator-(const LinearMap& other) const;
  LinearMap operator+(const LinearMap& other) const;
  LinearMap scaled(cplx c) const;

 private:
  Index in_dim_;
  Index out_dim_;
  std::vector<Term> terms_;
};

/// Schrödinger-order composition: apply `first`, then `second`.
LinearMap then(const LinearMap& first, const LinearMap& second);

class Channel {
 public:
  Channel(Index in_dim, Index out_dim, std::vector<ComplexMatrix> kraus,
          const Tolerances& tol = {});

  static Channel identity(Index d);
  /// Heisenberg T(A) = U^* A U, i.e. Schrödinger rho -> U rho U^*.
  static Channel unitary(const ComplexMatrix& u, const Tolerances& tol = {});
  /// Replaces every input by `rho` (T(A) = tr(rho A) 1).
  static Channel depolarizing_to(Index in_dim, const ComplexMatrix& rho, const Tolerances& tol = {});
  /// T_*(rho) = rho ⊗ rho'.
  static Channel expansion(Index in_dim, const ComplexMatrix& rho_prime, const Tolerances& tol = {});
  /// Classical channel (row-stochastic T(x -> y)) embedded as a
  /// measure-in-basis / prepare-basis-state channel.
  static Channel classical(const std::vector<std::vector<double>>& transition,
                           const Tolerances& tol = {});

  Index in_dim() const { return in_dim_; }
  Index out_dim() const { return out_dim_; }
  const std::vector<ComplexMatrix>& kraus() const { return kraus_; }
  /// True for channels built with a classical intermediate stage.
  bool separable() const { return separable_; }
  Channel& mark_separable(bool s = true) {
    separable_ = s;
    return *this;
  }

 private:
  Index in_dim_;
  Index out_dim_;
  std::vector<ComplexMatrix> kraus_;
  bool separable_ = false;
};

ComplexMatrix apply_heisenberg(const Channel& t, const ComplexMatrix& b);
ComplexMatrix apply_schrodinger(const Channel& t, const ComplexMatrix& rho);
State apply_schrodinger(const Channel& t, const State& s, const Tolerances& tol = {});

/// Schrödinger-order composition: apply `first`, then `second`.
Channel then(const Channel& first, const Channel& second, const Tolerances& tol = {});
Channel tensor(const Channel& a, const Channel& b, const Tolerances& tol = {});

struct ChoiMatrix {
  Index in_dim = 0;
  Index out_dim = 0;
  ComplexMatrix c;  // (in·out)², trace one for trace-preserving maps
};

ChoiMatrix choi_of(const Channel& t);
/// Trace-normalized (divided by in_dim) Choi matrix of an arbitrary map.
ChoiMatrix choi_of(const LinearMap& t);
/// The map whose trace-normalized Choi matrix is `c` (no positivity needed).
LinearMap map_from_choi(const ChoiMatrix& c);

/// Inverse of `choi_of`: reads the channel off the Choi matrix and returns a
/// minimal Kraus set.  Throws InvariantError when the matrix is not positive
/// (the map is not completely positive) or its input marginal is not 1/in.
Channel channel_from_choi(const ChoiMatrix& c, const Tolerances& tol = {});

/// Minimal Kraus operators (one per nonzero Choi eigenvalue).
std::vector<ComplexMatrix> minimal_kraus(const ComplexMatrix& choi_operator, Index in_dim,
                                         Index out_dim, const Tolerances& tol = {});

struct CpReport {
  bool completely_positive = true;
  double min_eigenvalue = 0.0;  // of the trace-normalized Choi matrix
  ComplexVector witness;        // eigenvector for min_eigenvalue
};

CpReport is_completely_positive(const LinearMap& m, const Tolerances& tol = {});
CpReport is_completely_positive(const ChoiMatrix& c, const Tolerances& tol = {});

/// Decomposition of a bipartite state into a pure state and a channel acting
/// on the second factor: rho = sigma ∘ (id ⊗ T), sigma = |Psi><Psi|.
struct DualityPair {
  ComplexVector psi;  // on C^dimA ⊗ C^in_dim(channel)
  Index dim_a = 0;
  Channel channel;
};

/// rho on C^dimA ⊗ C^dimB.  Uses Psi = sum_k sqrt(r_k) e_k ⊗ e'_k with r_k the
/// nonzero eigenvalues of the first marginal.  For a full-rank marginal the
/// partner basis is e'_k = conj(e_k), which makes Psi = (sqrt(rho_A) ⊗ 1)Γ
/// independent of the eigenbasis chosen; otherwise e'_k is the standard
/// basis of C^rank.
DualityPair duality_decompose(const ComplexMatrix& rho, Index dim_a, Index dim_b,
                              const Tolerances& tol = {});
/// (id ⊗ T_*)(|Psi><Psi|).
ComplexMatrix duality_compose(const ComplexVector& psi, Index dim_a, const Channel& t);

struct StinespringIsometry {
  ComplexMatrix v;  // (out·ell) × in
  Index in_dim = 0;
  Index out_dim = 0;
  Index dilation_dim = 0;
  bool minimal = false;
};

StinespringIsometry kraus_to_stinespring(const Channel& t, const Tolerances& tol = {});
/// Isometry assembled from an explicit Kraus list, V psi = sum_x K_x psi ⊗ e_x.
StinespringIsometry stinespring_from_kraus(const std::vector<ComplexMatrix>& kraus,
                                           Index in_dim, Index out_dim);
/// K_x with <phi, K_x psi> = <phi ⊗ chi_x, V psi>; `chis` must satisfy
/// sum_x |chi_x><chi_x| = 1_ell.
Channel stinespring_to_kraus(const StinespringIsometry& v, const std::vector<ComplexVector>& chis,
                             const Tolerances& tol = {});
/// Heisenberg action V^*(X ⊗ 1)V.
ComplexMatrix apply_stinespring(const StinespringIsometry& v, const ComplexMatrix& x);
/// Unitary W on C^ell with (1 ⊗ W) V1 = V2, for two minimal dilations of the
/// same channel.
ComplexMatrix dilation_unitary(const StinespringIsometry& v1, const StinespringIsometry& v2,
                               const Tolerances& tol = {});

struct AncillaForm {
  ComplexMatrix unitary;    // on C^in ⊗ C^ancilla = C^out ⊗ C^discard
  ComplexVector ancilla;    // initial ancilla state psi_a
  Index in_dim = 0;
  Index ancilla_dim = 0;
  Index out_dim = 0;
  Index discard_dim = 0;    // ell · b, traced out after the unitary
};

/// Unitary dilation of the minimal Stinespring isometry.  The ancilla
/// dimensions are the smallest with in·a = out·ell·b.  Different
/// `completion_seed` values give different unitary completions of the same
/// channel (0 uses a canonical Gram-Schmidt completion).
AncillaForm ancilla_form(const Channel& t, std::uint64_t completion_seed = 0,
                         const Tolerances& tol = {});
/// tr_discard( U (rho ⊗ |psi_a><psi_a|) U^* ).
ComplexMatrix apply_ancilla_form(const AncillaForm& a, const ComplexMatrix& rho);

/// Collection of effects F_x >= 0 with sum F_x = 1.
class Povm {
 public:
  explicit Povm(std::vector<ComplexMatrix> effects, const Tolerances& tol = {});
  const std::vector<ComplexMatrix>& effects() const { return effects_; }
  Index dim() const { return effects_.front().rows(); }
  std::size_t size() const { return effects_.size(); }

 private:
  std::vector<ComplexMatrix> effects_;
};

/// CP maps T_x (Kraus lists, in -> out) with sum_x T_x(1) = 1.
class Instrument {
 public:
  Instrument(Index in_dim, Index out_dim, std::vector<std::string> outcomes,
             std::vector<std::vector<ComplexMatrix>> kraus, const Tolerances& tol = {});

  /// Lüders instrument T_x(A) = p_x A p_x of orthogonal projections.
  static Instrument von_neumann(const std::vector<ComplexMatrix>& projections,
                                const Tolerances& tol = {});

  Index in_dim() const { return in_dim_; }
  Index out_dim() const { return out_dim_; }
  const std::vector<std::string>& outcomes() const { return outcomes_; }
  const std::vector<std::vector<ComplexMatrix>>& kraus() const { return kraus_; }
  std::size_t size() const { return kraus_.size(); }

  /// Heisenberg T_x(B).
  ComplexMatrix apply_heisenberg(std::size_t x, const ComplexMatrix& b) const;
  /// Unnormalized Schrödinger T_{x,*}(rho).
  ComplexMatrix apply_schrodinger(std::size_t x, const ComplexMatrix& rho) const;

  /// Outcome-ignoring marginal sum_x T_x.
  Channel marginal_channel(const Tolerances& tol = {}) const;
  /// State-ignoring marginal F_x = T_x(1).
  Povm marginal_povm(const Tolerances& tol = {}) const;

 private:
  Index in_dim_;
  Index out_dim_;
  std::vector<std::string> outcomes_;
  std::vector<std::vector<ComplexMatrix>> kraus_;
};

/// Output of an instrument: outcome weights and normalized conditional
/// states.  A conditional state is absent when its weight is below the rank
/// threshold.
struct HybridState {
  struct Branch {
    double weight = 0.0;
    std::optional<ComplexMatrix> state;
  };
  std::vector<Branch> branches;

  double total_weight() const;
};

HybridState apply_instrument(const Instrument& inst, const ComplexMatrix& rho,
                             const Tolerances& tol = {});

/// F_x in M_ell with T_x(X) = V^*(X ⊗ F_x)V for the given isometry of the
/// marginal channel (minimal dilation when omitted).  Throws NumericalError
/// when some T_x does not factor through the dilation.
std::vector<ComplexMatrix> radon_nikodym(const Instrument& inst, const Tolerances& tol = {});
std::vector<ComplexMatrix> radon_nikodym(const Instrument& inst, const StinespringIsometry& v,
                                         const Tolerances& tol = {});

/// T(A) = sum_x tr(rho_x A) F_x: measure the POVM, prepare rho_x.
Channel measure_prepare_channel(const Povm& povm, const std::vector<ComplexMatrix>& prep,
                                const Tolerances& tol = {});

/// Largest absolute entry difference of the Heisenberg actions on all
/// matrix units.
double action_distance(const LinearMap& a, const LinearMap& b);
double action_distance(const Channel& a, const Channel& b);

}  // namespace qichan
