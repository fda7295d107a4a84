#pragma once

// CHSH correlations and the Bell-telephone bound.
//
// Outcomes are ±1.  A dichotomic observable is stored by its +1 effect E;
// the -1 effect is 1 - E and the observable itself is A = 2E - 1.

#include <array>

#include "qichan/linalg.hpp"
#include "qichan/systems.hpp"

namespace qichan {

class DichotomicObservable {
 public:
  explicit DichotomicObservable(ComplexMatrix effect_plus, const Tolerances& tol = {});

  /// Spin/polarization measurement in the z-x plane.  The angle is a
  /// polarizer angle: the +1 Bloch direction is (sin 2a, 0, cos 2a), so a
  /// polarizer turned by 90° measures the opposite direction.
  static DichotomicObservable polarizer(double degrees);
  /// +1 effect (1 + n·sigma)/2 for a unit Bloch vector n.
  static DichotomicObservable spin(const BlochVector& n);
  /// Always answers +1.
  static DichotomicObservable trivial(Index d);

  const ComplexMatrix& effect_plus() const { return plus_; }
  ComplexMatrix effect_minus() const { return identity(plus_.rows()) - plus_; }
  /// Effect for outcome `sign` (+1 or -1).
  ComplexMatrix effect(int sign) const;
  /// A = E_+ - E_-.
  ComplexMatrix observable() const { return 2.0 * plus_ - identity(plus_.rows()); }
  /// Same device with its outcome labels exchanged.
  DichotomicObservable relabeled() const;
  Index dim() const { return plus_.rows(); }

 private:
  ComplexMatrix plus_;
};

/// p(a, b) = tr(rho (E_a ⊗ F_b)) for a state on two factors.
double outcome_probability(const State& s, const DichotomicObservable& a, int sign_a,
                           const DichotomicObservable& b, int sign_b);

/// C(A, B) = sum_{a,b} a b p(a, b).
double correlation(const State& s, const DichotomicObservable& a, const DichotomicObservable& b);

/// beta = C(A1,B1) + C(A1,B2) + C(A2,B1) - C(A2,B2).
double chsh_beta(const State& s, const DichotomicObservable& a1, const DichotomicObservable& a2,
                 const DichotomicObservable& b1, const DichotomicObservable& b2);

/// (|01> - |10>)/sqrt 2.
State singlet();

struct ChshSetting {
  DichotomicObservable a1;
  DichotomicObservable a2;
  DichotomicObservable b1;
  DichotomicObservable b2;
};

/// Polarizer settings A1 = 45°, A2 = 0°, B1 = 22.5°, B2 = 67.5°.  Bob's
/// devices report the outcome of the orthogonal polarizer channel, which
/// turns the anticorrelation of the singlet into correlation; with these
/// choices the singlet reaches beta = 2 sqrt 2.
ChshSetting standard_chsh_setting();

/// Maximum of beta over the 16 deterministic local strategies.  `minus_term`
/// (0..3, in the order 11, 12, 21, 22) picks the negated correlation; with
/// `tie_alice` only strategies with a1 = a2 are enumerated.
double classical_chsh_max(int minus_term = 3, bool tie_alice = false);

/// p_i(a, b1, b2), i = 1, 2 (stored at index i - 1), for Alice's device A_i
/// and Bob's joint device B1 & B2.
class JointOutcomeDistribution {
 public:
  JointOutcomeDistribution();

  static int index(int sign);

  double& at(int i, int a, int b1, int b2);
  double at(int i, int a, int b1, int b2) const;

  /// Throws InvariantError on negative entries or when some p_i does not
  /// sum to one.
  void validate(const Tolerances& tol = {}) const;

  /// Correlations induced by the distribution (b1/b2 marginals).
  double correlation(int i, int j) const;
  double beta() const;

 private:
  // [i][a][b1][b2] with index 0 for +1 and 1 for -1
  std::array<std::array<std::array<std::array<double, 2>, 2>, 2>, 2> p_{};
};

/// Distribution of a quantum model: state on two factors, Alice's devices,
/// and Bob's joint device given by four effects G[b1][b2].
JointOutcomeDistribution joint_from_model(const State& s, const DichotomicObservable& a1,
                                          const DichotomicObservable& a2,
                                          const std::array<std::array<ComplexMatrix, 2>, 2>& bob_joint);

/// Largest deviation between the b1/b2 marginals of `dist` and the pair
/// probabilities p(a, b | A_i, B_j) of the model (state, A_i, B_j).
double joint_marginal_residual(const JointOutcomeDistribution& dist, const State& s,
                               const DichotomicObservable& a1, const DichotomicObservable& a2,
                               const DichotomicObservable& b1, const DichotomicObservable& b2);

/// Success probability of Bob's decoding rule (read "A1" iff b1 = b2), with
/// Alice choosing A1 or A2 with probability 1/2.  Validates `dist`.
double telephone_success(const JointOutcomeDistribution& dist, const Tolerances& tol = {});

/// True iff Bob decodes better than chance (p_ok > 1/2).
bool signalling_check(const JointOutcomeDistribution& dist, const Tolerances& tol = {});

}  // namespace qichan
