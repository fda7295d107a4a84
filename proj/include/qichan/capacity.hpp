#pragma once

// Norms, fidelities, entropies and the computable capacity quantities.
//
// Entropies are in bits.  Norms of maps are suprema over the unit ball of
// the Heisenberg-picture domain, evaluated by multi-restart alternating
// ascent; every estimate is a lower bound on the true supremum and is a
// deterministic function of (map, seed, restarts).

#include <limits>
#include <string>
#include <vector>

#include "qichan/channels.hpp"
#include "qichan/optimize.hpp"
#include "qichan/systems.hpp"

namespace qichan {

// ------------------------------------------------------------- entropies

/// -tr(rho log2 rho); eigenvalues at or below the rank threshold contribute 0.
double von_neumann_entropy(const ComplexMatrix& rho, const Tolerances& tol = {});
double von_neumann_entropy(const State& s, const Tolerances& tol = {});

/// tr(rho (log2 rho - log2 sigma)), +infinity when the support of rho is not
/// contained in the support of sigma.
double relative_entropy(const ComplexMatrix& rho, const ComplexMatrix& sigma, const Tolerances& tol = {});
double relative_entropy(const State& rho, const State& sigma, const Tolerances& tol = {});

/// S(rho^B) - S(rho) for a state on C^dimA ⊗ C^dimB.  May be negative.
double coherent_info_ES(const ComplexMatrix& rho, Index dim_a, Index dim_b, const Tolerances& tol = {});
/// Two-factor quantum state; factor 1 is B.
double coherent_info_ES(const State& rho, const Tolerances& tol = {});

// ---------------------------------------------------------------- Holevo

struct EnsembleState {
  std::vector<double> weights;
  std::vector<ComplexMatrix> states;

  /// Throws InvariantError unless weights are a distribution over states.
  void validate(const Tolerances& tol = {}) const;
};

/// S(sum p_i T_*(rho_i)) - sum p_i S(T_*(rho_i)).
double holevo_chi(const EnsembleState& ens, const Channel& t, const Tolerances& tol = {});

struct HolevoResult {
  double value = 0.0;  // bits
  EnsembleState ensemble;
  int restarts = 0;
  bool converged = false;
};

/// Maximum of chi over ensembles of at most in_dim² pure states.
HolevoResult one_shot_classical_capacity(const Channel& t, const OptimizerConfig& opt = {},
                                         const Tolerances& tol = {});

struct Cs1Result {
  double value = 0.0;  // bits
  ComplexVector input;  // optimal pure input on C^in ⊗ C^in, channel on the second factor
  bool converged = false;
};

/// sup over pure Psi of E_S((id ⊗ T_*)(|Psi><Psi|)).
Cs1Result cs1(const Channel& t, const OptimizerConfig& opt = {}, const Tolerances& tol = {});

// ------------------------------------------------------------------ norms

enum class NormKind { operator_norm, cb_norm };

struct NormEstimate {
  double value = 0.0;
  NormKind kind = NormKind::operator_norm;
  ComplexMatrix certificate;  // unitary A with |T⊗id_n (A)| = value
  Index stabilizer_dim = 1;   // n
  bool converged = false;
};

/// sup { |T(A)| : |A| <= 1 }.
NormEstimate operator_norm(const LinearMap& t, const OptimizerConfig& opt = {});
/// |T ⊗ id_n| with n = dimension of the Heisenberg range (the Schrödinger
/// input dimension), which suffices for maps into M_n.
NormEstimate cb_norm(const LinearMap& t, const OptimizerConfig& opt = {});

/// |S - E∘T∘D|_cb where the coding runs E first, then T, then D
/// (Schrödinger order).
NormEstimate coded_deviation(const Channel& s, const Channel& t, const Channel& e,
                             const Channel& dcd, const OptimizerConfig& opt = {});

// ------------------------------------------------------------- fidelities

struct FidelityResult {
  double value = 0.0;
  ComplexVector phi;
  ComplexVector psi;
  bool converged = false;
};

/// inf_psi <psi, T(|psi><psi|) psi>.
FidelityResult fidelity_worst(const Channel& t, const OptimizerConfig& opt = {});

enum class OffdiagConvention { inf, sup };

/// Extremum over unit pairs of Re <phi, T(|phi><psi|) psi>.  The expression
/// is invariant under relative phases of phi and psi, so only the outer
/// extremum matters.  `inf` (default) is the convention under which the
/// estimate chain holds.
FidelityResult fidelity_offdiag(const Channel& t, const OptimizerConfig& opt = {},
                                OffdiagConvention convention = OffdiagConvention::inf);

struct EstimateChainReport {
  double deviation_norm = 0.0;     // |T - id|
  double deviation_cb = 0.0;       // |T - id|_cb
  double fidelity = 0.0;           // F
  double fidelity_offdiag = 0.0;   // F_%
  double bound_offdiag = 0.0;      // 4 sqrt(1 - F_%)
  double bound_fidelity = 0.0;     // 4 sqrt(1 - F)
  double bound_norm = 0.0;         // 4 sqrt(|T - id|)
  double slack = 1e-3;
  std::vector<std::string> violations;

  bool holds() const { return violations.empty(); }
};

EstimateChainReport estimate_chain_check(const Channel& t, const OptimizerConfig& opt = {},
                                         double slack = 1e-3);

struct TransposeBound {
  double value = 0.0;  // bits, clamped at 0
  double cb = 1.0;     // |Θ∘T|_cb
  bool theta_t_cp = false;
  bool converged = true;
};

/// log2 |Θ∘T|_cb, with Θ the transpose on the output.  Exactly 0 when Θ∘T is
/// completely positive.
TransposeBound transpose_bound(const Channel& t, const OptimizerConfig& opt = {},
                               const Tolerances& tol = {});

// ------------------------------------------------- ideal channel reference

enum class SystemKind { classical, quantum };

/// Capacity of the ideal line (identity channel on a `line_dim`-level system)
/// for transmitting the ideal `source_dim`-level system: 0 when quantum data
/// is sent over a classical line, log(line_dim)/log(source_dim) otherwise.
/// Reference values only; nothing is optimized.
double ideal_capacity(SystemKind source, int source_dim, SystemKind line, int line_dim);

}  // namespace qichan
