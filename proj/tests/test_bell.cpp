#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "qichan/bell.hpp"
#include "qichan/random.hpp"

using namespace qichan;

namespace {

BlochVector zx_direction(double theta) { return {std::sin(theta), 0.0, std::cos(theta)}; }

JointOutcomeDistribution random_distribution(std::mt19937_64& g) {
  JointOutcomeDistribution d;
  for (int i = 1; i <= 2; ++i) {
    const auto p = oracle::random_simplex(8, g);
    std::size_t k = 0;
    for (int a : {1, -1})
      for (int b1 : {1, -1})
        for (int b2 : {1, -1}) d.at(i, a, b1, b2) = p[k++];
  }
  return d;
}

// With probability q Bob decodes perfectly (b1 = b2 = a for setting 1,
// b1 = -b2 = a for setting 2); otherwise all outcomes are uniform.  The
// correlations are all ±q, so beta = 4q.
JointOutcomeDistribution decodable(double q) {
  JointOutcomeDistribution d;
  for (int i = 1; i <= 2; ++i)
    for (int a : {1, -1})
      for (int b1 : {1, -1})
        for (int b2 : {1, -1}) d.at(i, a, b1, b2) = (1 - q) / 8.0;
  for (int a : {1, -1}) {
    d.at(1, a, a, a) += q / 2;
    d.at(2, a, a, -a) += q / 2;
  }
  return d;
}

}  // namespace

TEST_CASE("polarizer observables") {
  const DichotomicObservable z = DichotomicObservable::polarizer(0.0);
  CHECK((z.observable() - pauli(3)).cwiseAbs().maxCoeff() < 1e-15);
  const DichotomicObservable x = DichotomicObservable::polarizer(45.0);
  CHECK((x.observable() - pauli(1)).cwiseAbs().maxCoeff() < 1e-15);
  // a polarizer turned by 90 degrees is the relabeled device
  const DichotomicObservable p30 = DichotomicObservable::polarizer(30.0);
  const DichotomicObservable p120 = DichotomicObservable::polarizer(120.0);
  CHECK((p120.effect_plus() - p30.relabeled().effect_plus()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(DichotomicObservable(2.0 * identity(2)), InvariantError);
  CHECK_THROWS_AS(z.effect(0), InvariantError);
}

TEST_CASE("correlations factorize on product states") {
  Rng rng = make_rng(1);
  const State a(Algebra::quantum(2), random_density(2, rng));
  const State b(Algebra::quantum(2), random_density(2, rng));
  const DichotomicObservable oa = DichotomicObservable::spin(zx_direction(0.3));
  const DichotomicObservable ob = DichotomicObservable::spin(zx_direction(1.1));
  const double ea = a.expectation(oa.observable()).real();
  const double eb = b.expectation(ob.observable()).real();
  CHECK(correlation(tensor(a, b), oa, ob) == doctest::Approx(ea * eb).epsilon(1e-12));
}

TEST_CASE("singlet correlations") {
  const State s = singlet();
  for (double theta : {0.0, std::numbers::pi / 4, std::numbers::pi / 2}) {
    const double c = correlation(s, DichotomicObservable::spin(zx_direction(0.2)),
                                 DichotomicObservable::spin(zx_direction(0.2 + theta)));
    CHECK(std::abs(c - oracle::singlet_correlation(0.2, 0.2 + theta)) < 1e-12);
  }
}

TEST_CASE("CHSH values") {
  const State s = singlet();
  const ChshSetting st = standard_chsh_setting();
  CHECK(std::abs(chsh_beta(s, st.a1, st.a2, st.b1, st.b2) - oracle::tsirelson()) < 1e-9);

  const DichotomicObservable one = DichotomicObservable::trivial(2);
  CHECK(chsh_beta(s, one, one, one, one) == doctest::Approx(2.0));

  // separable states never exceed the classical bound
  Rng rng = make_rng(2);
  for (int k = 0; k < 20; ++k) {
    ComplexMatrix rho = ComplexMatrix::Zero(4, 4);
    for (int m = 0; m < 3; ++m) rho += kron(random_density(2, rng), random_density(2, rng)) / 3.0;
    const State sep(Algebra::qubits(2), rho);
    for (const double a : {0.0, 22.5, 45.0})
      CHECK(std::abs(chsh_beta(sep, st.a1, DichotomicObservable::polarizer(a), st.b1, st.b2)) <= 2.0 + 1e-9);
  }
}

TEST_CASE("classical bound") {
  CHECK(classical_chsh_max() == 2.0);
  CHECK(classical_chsh_max() == oracle::classical_chsh_bruteforce());
  for (int m = 0; m < 4; ++m) CHECK(classical_chsh_max(m) == 2.0);
  CHECK(classical_chsh_max(3, true) == 2.0);
  CHECK_THROWS_AS(classical_chsh_max(4), InvariantError);
}

TEST_CASE("telephone success") {
  JointOutcomeDistribution uniform = decodable(0.0);
  CHECK(telephone_success(uniform) == doctest::Approx(0.5));
  CHECK_FALSE(signalling_check(uniform));

  const JointOutcomeDistribution perfect = decodable(1.0);
  CHECK(telephone_success(perfect) == doctest::Approx(1.0));
  CHECK(perfect.beta() == doctest::Approx(4.0));

  const JointOutcomeDistribution b25 = decodable(0.625);
  CHECK(b25.beta() == doctest::Approx(2.5));
  CHECK(signalling_check(b25));

  std::mt19937_64 g(3);
  for (int k = 0; k < 1000; ++k) {
    const JointOutcomeDistribution d = random_distribution(g);
    CHECK(telephone_success(d) >= d.beta() / 4 - 1e-12);
  }
}

TEST_CASE("telephone at the classical boundary") {
  const JointOutcomeDistribution half = decodable(0.5);
  CHECK(half.beta() == doctest::Approx(2.0));
  CHECK(telephone_success(half) >= 0.5);

  // beta = 2 with p_ok = 1/2 exactly: every correlation is saturated on the
  // decodable half and the other half misleads Bob
  JointOutcomeDistribution eq;
  for (int a : {1, -1}) {
    eq.at(1, a, a, a) = 0.25;
    eq.at(1, a, a, -a) = 0.25;
    eq.at(2, a, a, -a) = 0.25;
    eq.at(2, a, -a, -a) = 0.25;
  }
  CHECK(eq.beta() == doctest::Approx(2.0));
  CHECK(telephone_success(eq) == doctest::Approx(0.5));
  CHECK_FALSE(signalling_check(eq));
}

TEST_CASE("distribution validation") {
  JointOutcomeDistribution d = decodable(0.0);
  d.at(1, 1, 1, 1) += 0.1;
  CHECK_THROWS_AS(telephone_success(d), InvariantError);
  JointOutcomeDistribution n = decodable(0.0);
  n.at(2, 1, 1, 1) = -0.125;
  n.at(2, 1, 1, -1) = 0.375;
  CHECK_THROWS_AS(n.validate(), InvariantError);
  CHECK_THROWS_AS(n.at(3, 1, 1, 1), InvariantError);
}

TEST_CASE("quantum models and no-signalling") {
  const State s = singlet();
  const ChshSetting st = standard_chsh_setting();
  // Bob's joint device: measure B1, report its outcome for both displays
  std::array<std::array<ComplexMatrix, 2>, 2> g;
  for (int b1 : {0, 1})
    for (int b2 : {0, 1}) g[b1][b2] = b1 == b2 ? st.b1.effect(b1 == 0 ? 1 : -1) : ComplexMatrix::Zero(2, 2);
  const JointOutcomeDistribution d = joint_from_model(s, st.a1, st.a2, g);
  CHECK_NOTHROW(d.validate());
  // B1 marginal is reproduced, B2 is not
  CHECK(joint_marginal_residual(d, s, st.a1, st.a2, st.b1, st.b1) < 1e-12);
  CHECK(joint_marginal_residual(d, s, st.a1, st.a2, st.b1, st.b2) > 0.1);
  // a joint model obeys the telephone bound and cannot signal
  CHECK(telephone_success(d) >= d.beta() / 4 - 1e-12);
  CHECK(telephone_success(d) == doctest::Approx(0.5).epsilon(1e-12));

  // Bob's marginals do not depend on Alice's setting
  for (const auto* b : {&st.b1, &st.b2})
    for (int sb : {1, -1}) {
      double m1 = 0.0;
      double m2 = 0.0;
      for (int sa : {1, -1}) {
        m1 += outcome_probability(s, st.a1, sa, *b, sb);
        m2 += outcome_probability(s, st.a2, sa, *b, sb);
      }
      CHECK(std::abs(m1 - m2) < 1e-12);
    }
}
