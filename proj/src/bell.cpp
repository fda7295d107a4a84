#include "qichan/bell.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qichan {

DichotomicObservable::DichotomicObservable(ComplexMatrix effect_plus, const Tolerances& tol)
    : plus_(std::move(effect_plus)) {
  plus_ = Effect(Algebra::quantum(plus_.rows()), plus_, tol).f();
}

DichotomicObservable DichotomicObservable::polarizer(double degrees) {
  const double t = 2.0 * degrees * std::numbers::pi / 180.0;
  return spin({std::sin(t), 0.0, std::cos(t)});
}

DichotomicObservable DichotomicObservable::spin(const BlochVector& n) {
  if (std::abs(bloch_length(n) - 1.0) > 1e-9) throw InvariantError("spin direction must be a unit vector");
  ComplexMatrix e = pauli(0);
  for (int k = 0; k < 3; ++k) e += n[k] * pauli(k + 1);
  return DichotomicObservable(0.5 * e);
}

DichotomicObservable DichotomicObservable::trivial(Index d) { return DichotomicObservable(identity(d)); }

ComplexMatrix DichotomicObservable::effect(int sign) const {
  if (sign == 1) return plus_;
  if (sign == -1) return effect_minus();
  throw InvariantError("outcomes are +1 or -1");
}

DichotomicObservable DichotomicObservable::relabeled() const { return DichotomicObservable(effect_minus()); }

namespace {

void require_bipartite(const State& s, const DichotomicObservable& a, const DichotomicObservable& b) {
  const auto dims = s.algebra().dims();
  if (dims.size() != 2 || dims[0] != a.dim() || dims[1] != b.dim())
    throw DimensionError("observables do not match the two factors of the state");
}

}  // namespace

double outcome_probability(const State& s, const DichotomicObservable& a, int sign_a,
                           const DichotomicObservable& b, int sign_b) {
  require_bipartite(s, a, b);
  return s.expectation(kron(a.effect(sign_a), b.effect(sign_b))).real();
}

double correlation(const State& s, const DichotomicObservable& a, const DichotomicObservable& b) {
  double c = 0.0;
  for (int sa : {1, -1})
    for (int sb : {1, -1}) c += sa * sb * outcome_probability(s, a, sa, b, sb);
  return c;
}

double chsh_beta(const State& s, const DichotomicObservable& a1, const DichotomicObservable& a2,
                 const DichotomicObservable& b1, const DichotomicObservable& b2) {
  return correlation(s, a1, b1) + correlation(s, a1, b2) + correlation(s, a2, b1) -
         correlation(s, a2, b2);
}

State singlet() {
  ComplexVector v = ComplexVector::Zero(4);
  v(1) = 1.0 / std::sqrt(2.0);
  v(2) = -1.0 / std::sqrt(2.0);
  return State::pure(Algebra::qubits(2), v);
}

ChshSetting standard_chsh_setting() {
  return {DichotomicObservable::polarizer(45.0), DichotomicObservable::polarizer(0.0),
          DichotomicObservable::polarizer(22.5).relabeled(),
          DichotomicObservable::polarizer(67.5).relabeled()};
}

double classical_chsh_max(int minus_term, bool tie_alice) {
  if (minus_term < 0 || minus_term > 3) throw InvariantError("minus_term must be 0..3");
  double best = -4.0;
  for (int mask = 0; mask < 16; ++mask) {
    const int a1 = mask & 1 ? -1 : 1;
    const int a2 = mask & 2 ? -1 : 1;
    const int b1 = mask & 4 ? -1 : 1;
    const int b2 = mask & 8 ? -1 : 1;
    if (tie_alice && a1 != a2) continue;
    const std::array<int, 4> c{a1 * b1, a1 * b2, a2 * b1, a2 * b2};
    int beta = 0;
    for (int k = 0; k < 4; ++k) beta += k == minus_term ? -c[k] : c[k];
    best = std::max(best, static_cast<double>(beta));
  }
  return best;
}

JointOutcomeDistribution::JointOutcomeDistribution() = default;

int JointOutcomeDistribution::index(int sign) {
  if (sign == 1) return 0;
  if (sign == -1) return 1;
  throw InvariantError("outcomes are +1 or -1");
}

double& JointOutcomeDistribution::at(int i, int a, int b1, int b2) {
  if (i != 1 && i != 2) throw InvariantError("Alice's setting is 1 or 2");
  return p_[i - 1][index(a)][index(b1)][index(b2)];
}

double JointOutcomeDistribution::at(int i, int a, int b1, int b2) const {
  if (i != 1 && i != 2) throw InvariantError("Alice's setting is 1 or 2");
  return p_[i - 1][index(a)][index(b1)][index(b2)];
}

void JointOutcomeDistribution::validate(const Tolerances& tol) const {
  for (int i = 1; i <= 2; ++i) {
    double sum = 0.0;
    for (int a : {1, -1})
      for (int b1 : {1, -1})
        for (int b2 : {1, -1}) {
          const double q = at(i, a, b1, b2);
          if (!(q >= -tol.alg)) throw InvariantError("negative or undefined probability");
          sum += q;
        }
    if (std::abs(sum - 1.0) > tol.alg)
      throw InvariantError("p_" + std::to_string(i) + " does not sum to 1");
  }
}

double JointOutcomeDistribution::correlation(int i, int j) const {
  if (j != 1 && j != 2) throw InvariantError("Bob's setting is 1 or 2");
  double c = 0.0;
  for (int a : {1, -1})
    for (int b1 : {1, -1})
      for (int b2 : {1, -1}) c += a * (j == 1 ? b1 : b2) * at(i, a, b1, b2);
  return c;
}

double JointOutcomeDistribution::beta() const {
  return correlation(1, 1) + correlation(1, 2) + correlation(2, 1) - correlation(2, 2);
}

JointOutcomeDistribution joint_from_model(const State& s, const DichotomicObservable& a1,
                                          const DichotomicObservable& a2,
                                          const std::array<std::array<ComplexMatrix, 2>, 2>& bob_joint) {
  const Index db = bob_joint[0][0].rows();
  std::vector<ComplexMatrix> effects;
  for (const auto& row : bob_joint)
    for (const auto& g : row) effects.push_back(g);
  ComplexMatrix sum = ComplexMatrix::Zero(db, db);
  for (const auto& g : effects) {
    if (g.rows() != db || min_eigenvalue(g) < -1e-9) throw InvariantError("joint effect is not positive");
    sum += g;
  }
  if ((sum - identity(db)).cwiseAbs().maxCoeff() > 1e-9) throw InvariantError("joint effects do not sum to 1");
  require_bipartite(s, a1, DichotomicObservable::trivial(db));

  JointOutcomeDistribution d;
  const std::array<const DichotomicObservable*, 2> alice{&a1, &a2};
  for (int i = 1; i <= 2; ++i)
    for (int a : {1, -1})
      for (int b1 : {1, -1})
        for (int b2 : {1, -1})
          d.at(i, a, b1, b2) = std::max(
              0.0, s.expectation(kron(alice[static_cast<std::size_t>(i - 1)]->effect(a),
                                      bob_joint[static_cast<std::size_t>(JointOutcomeDistribution::index(b1))]
                                               [static_cast<std::size_t>(JointOutcomeDistribution::index(b2))]))
                       .real());
  return d;
}

double joint_marginal_residual(const JointOutcomeDistribution& dist, const State& s,
                               const DichotomicObservable& a1, const DichotomicObservable& a2,
                               const DichotomicObservable& b1, const DichotomicObservable& b2) {
  const std::array<const DichotomicObservable*, 2> alice{&a1, &a2};
  const std::array<const DichotomicObservable*, 2> bob{&b1, &b2};
  double worst = 0.0;
  for (int i = 1; i <= 2; ++i)
    for (int j = 1; j <= 2; ++j)
      for (int a : {1, -1})
        for (int b : {1, -1}) {
          double marginal = 0.0;
          for (int other : {1, -1})
            marginal += j == 1 ? dist.at(i, a, b, other) : dist.at(i, a, other, b);
          const double pair = outcome_probability(s, *alice[static_cast<std::size_t>(i - 1)], a,
                                                  *bob[static_cast<std::size_t>(j - 1)], b);
          worst = std::max(worst, std::abs(marginal - pair));
        }
  return worst;
}

double telephone_success(const JointOutcomeDistribution& dist, const Tolerances& tol) {
  dist.validate(tol);
  double p_ok = 0.0;
  for (int a : {1, -1})
    for (int b1 : {1, -1})
      for (int b2 : {1, -1}) {
        p_ok += 0.5 * std::abs((b1 + b2) / 2.0) * std::abs(a) * dist.at(1, a, b1, b2);
        p_ok += 0.5 * std::abs((b1 - b2) / 2.0) * std::abs(a) * dist.at(2, a, b1, b2);
      }
  return p_ok;
}

bool signalling_check(const JointOutcomeDistribution& dist, const Tolerances& tol) {
  return telephone_success(dist, tol) > 0.5 + tol.alg;
}

}  // namespace qichan
