#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "qichan/capacity.hpp"
#include "qichan/channels.hpp"
#include "qichan/random.hpp"

using namespace qichan;

namespace {

double max_diff(const ComplexMatrix& a, const ComplexMatrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

// Kraus rank is raised to ceil(in/out) when needed, the least a channel allows.
Channel random_channel(Index in, Index out, Index rank, Rng& rng) {
  rank = std::max(rank, (in + out - 1) / out);
  const ComplexMatrix v = random_isometry(out * rank, in, rng);
  std::vector<ComplexMatrix> kraus;
  for (Index x = 0; x < rank; ++x) {
    ComplexMatrix k(out, in);
    for (Index o = 0; o < out; ++o) k.row(o) = v.row(o * rank + x);
    kraus.push_back(k);
  }
  return Channel(in, out, kraus);
}

ComplexVector max_entangled_vector(Index d) {
  ComplexVector v = ComplexVector::Zero(d * d);
  for (Index k = 0; k < d; ++k) v(k * d + k) = 1.0 / std::sqrt(static_cast<double>(d));
  return v;
}

}  // namespace

TEST_CASE("channel validation") {
  CHECK_THROWS_AS(Channel(2, 2, {2.0 * identity(2)}), InvariantError);
  CHECK_THROWS_AS(Channel(2, 3, {identity(2)}), DimensionError);
  CHECK_THROWS_AS(Channel(2, 2, {}), InvariantError);
}

TEST_CASE("Heisenberg action") {
  Rng rng = make_rng(1);
  const ComplexMatrix b = random_ginibre(3, 3, rng);
  CHECK(max_diff(apply_heisenberg(Channel::identity(3), b), b) == 0.0);
  CHECK(max_diff(apply_heisenberg(Channel::unitary(pauli(1)), pauli(3)), -pauli(3)) < 1e-15);
  CHECK_THROWS_AS(apply_heisenberg(Channel::identity(3), identity(2)), DimensionError);
}

TEST_CASE("Schrödinger and Heisenberg pictures are dual") {
  Rng rng = make_rng(2);
  for (int k = 0; k < 50; ++k) {
    const Channel t = random_channel(3, 2, 1 + k % 4, rng);
    const ComplexMatrix rho = random_density(3, rng);
    const ComplexMatrix f = hermitian_part(random_ginibre(2, 2, rng));
    const cplx lhs = (apply_schrodinger(t, rho) * f).trace();
    const cplx rhs = (rho * apply_heisenberg(t, f)).trace();
    CHECK(std::abs(lhs - rhs) < 1e-12);
    CHECK(max_diff(apply_schrodinger(t, rho), oracle::apply_kraus(t.kraus(), rho)) < 1e-12);
  }
}

TEST_CASE("depolarizing and expansion channels") {
  Rng rng = make_rng(3);
  const ComplexMatrix rho2 = random_density(3, rng);
  const Channel dep = Channel::depolarizing_to(2, rho2);
  CHECK(dep.separable());
  for (int k = 0; k < 5; ++k) CHECK(max_diff(apply_schrodinger(dep, random_density(2, rng)), rho2) < 1e-12);

  const ComplexMatrix rho_prime = random_density(2, rng);
  const Channel exp = Channel::expansion(3, rho_prime);
  const ComplexMatrix rho = random_density(3, rng);
  CHECK(max_diff(apply_schrodinger(exp, rho), kron(rho, rho_prime)) < 1e-12);

  const State s = apply_schrodinger(Channel::identity(2), State::maximally_mixed(2));
  CHECK(max_diff(s.rho(), identity(2) / 2.0) == 0.0);
}

TEST_CASE("Choi matrix of the identity is the maximally entangled projector") {
  const ChoiMatrix c = choi_of(Channel::identity(2));
  CHECK(max_diff(c.c, projector(max_entangled_vector(2))) < 1e-15);
  CHECK(c.c.trace().real() == doctest::Approx(1.0));
}

TEST_CASE("Choi round trip") {
  Rng rng = make_rng(4);
  for (int k = 0; k < 20; ++k) {
    const Index in = 2 + k % 3;
    const Index out = 2 + (k / 3) % 2;
    const Channel t = random_channel(in, out, 1 + k % 5, rng);
    const Channel back = channel_from_choi(choi_of(t));
    CHECK(action_distance(t, back) < 1e-9);
    // the Choi matrix of a LinearMap agrees with the Kraus-built one
    CHECK(max_diff(choi_of(LinearMap::from_channel(t)).c, choi_of(t).c) < 1e-12);
    CHECK(action_distance(map_from_choi(choi_of(t)), LinearMap::from_channel(t)) < 1e-12);
  }
  ChoiMatrix bad = choi_of(LinearMap::transpose(2));
  CHECK_THROWS_AS(channel_from_choi(bad), InvariantError);
}

TEST_CASE("product states and depolarizing channels correspond") {
  Rng rng = make_rng(5);
  const ComplexMatrix ra = random_density(2, rng);
  const ComplexMatrix rb = random_density(3, rng);
  const DualityPair p = duality_decompose(kron(ra, rb), 2, 3);
  // T maps everything to rho_B
  for (int k = 0; k < 3; ++k) CHECK(max_diff(apply_schrodinger(p.channel, random_density(p.channel.in_dim(), rng)), rb) < 1e-9);
  CHECK(max_diff(duality_compose(p.psi, 2, p.channel), kron(ra, rb)) < 1e-9);

  // and conversely a depolarizing channel produces a product state
  const ComplexMatrix rho = duality_compose(max_entangled_vector(2), 2, Channel::depolarizing_to(2, rb));
  CHECK(max_diff(rho, kron(identity(2) / 2.0, rb)) < 1e-12);
}

TEST_CASE("separable states and measure-prepare channels correspond") {
  Rng rng = make_rng(6);
  for (int k = 0; k < 5; ++k) {
    const ComplexMatrix u = random_unitary(2, rng);
    const Povm povm({u * matrix_unit(2, 0, 0) * u.adjoint(), u * matrix_unit(2, 1, 1) * u.adjoint()});
    const Channel mp = measure_prepare_channel(povm, {random_density(2, rng), random_density(2, rng)});
    CHECK(mp.separable());
    const ComplexMatrix rho = duality_compose(max_entangled_vector(2), 2, mp);
    const State s(Algebra::qubits(2), rho);
    CHECK(is_separable_necessary(s, {0}).verdict == SeparabilityVerdict::pass);
    const DualityPair p = duality_decompose(rho, 2, 2);
    CHECK(max_diff(duality_compose(p.psi, 2, p.channel), rho) < 1e-9);
  }
  // the identity channel gives an entangled state
  const State omega(Algebra::qubits(2), duality_compose(max_entangled_vector(2), 2, Channel::identity(2)));
  CHECK(is_separable_necessary(omega, {0}).verdict == SeparabilityVerdict::fail);
}

TEST_CASE("complete positivity") {
  Rng rng = make_rng(7);
  for (int k = 0; k < 10; ++k) {
    const Channel t = random_channel(2 + k % 2, 2, 1 + k % 3, rng);
    CHECK(is_completely_positive(LinearMap::from_channel(t)).completely_positive);
  }
  const CpReport r = is_completely_positive(LinearMap::transpose(2));
  CHECK_FALSE(r.completely_positive);
  CHECK(std::abs(r.min_eigenvalue + 0.5) < 1e-12);
  // the witness is the antisymmetric vector
  ComplexVector anti = ComplexVector::Zero(4);
  anti(1) = 1 / std::sqrt(2.0);
  anti(2) = -1 / std::sqrt(2.0);
  CHECK(std::abs(std::abs(r.witness.dot(anti)) - 1.0) < 1e-12);

  // the transpose is positive: diagonal positive inputs stay positive
  const LinearMap theta = LinearMap::transpose(2);
  for (int k = 0; k < 20; ++k) {
    ComplexMatrix p = ComplexMatrix::Zero(2, 2);
    p(0, 0) = std::abs(random_ginibre(1, 1, rng)(0, 0));
    p(1, 1) = std::abs(random_ginibre(1, 1, rng)(0, 0));
    CHECK(min_eigenvalue(theta.apply(p)) >= 0.0);
    CHECK(min_eigenvalue(theta.apply(random_density(2, rng))) > -1e-12);
  }
}

TEST_CASE("Stinespring dilation") {
  Rng rng = make_rng(8);
  const ComplexMatrix u = random_unitary(3, rng);
  const StinespringIsometry single = kraus_to_stinespring(Channel::unitary(u));
  CHECK(single.dilation_dim == 1);
  // Kraus operator of T(A) = U^* A U is U
  CHECK(max_diff(single.v, u) < 1e-12);

  for (int k = 0; k < 20; ++k) {
    const Index rank = 1 + k % 4;
    const Channel t = random_channel(2 + k % 2, 3, rank, rng);
    const StinespringIsometry v = kraus_to_stinespring(t);
    CHECK(max_diff(v.v.adjoint() * v.v, identity(t.in_dim())) < 1e-12);
    // planted Kraus rank = Choi rank = minimal dilation dimension
    const Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(choi_of(t).c);
    CHECK((es.eigenvalues().array() > 1e-10).count() == rank);
    CHECK(v.dilation_dim == rank);
    CHECK(v.minimal);
    for (Index i = 0; i < 3; ++i)
      for (Index j = 0; j < 3; ++j)
        CHECK(max_diff(apply_stinespring(v, matrix_unit(3, i, j)), apply_heisenberg(t, matrix_unit(3, i, j))) < 1e-12);
  }
}

TEST_CASE("Kraus operators from a dilation") {
  Rng rng = make_rng(9);
  const Channel t = random_channel(2, 2, 2, rng);
  const StinespringIsometry v = kraus_to_stinespring(t);
  // orthonormal basis
  const Channel basis = stinespring_to_kraus(v, {basis_vector(2, 0), basis_vector(2, 1)});
  CHECK(basis.kraus().size() == 2);
  CHECK(action_distance(basis, t) < 1e-9);
  // overcomplete: three trine vectors scaled so that sum |chi><chi| = 1
  std::vector<ComplexVector> trine;
  for (int k = 0; k < 3; ++k) {
    const double a = 2.0 * std::numbers::pi * k / 3.0;
    ComplexVector c(2);
    c << std::cos(a), std::sin(a);
    trine.push_back(c * std::sqrt(2.0 / 3.0));
  }
  const Channel over = stinespring_to_kraus(v, trine);
  CHECK(over.kraus().size() == 3);
  CHECK(action_distance(over, t) < 1e-9);
  // incomplete family is rejected
  CHECK_THROWS_AS(stinespring_to_kraus(v, {basis_vector(2, 0)}), InvariantError);
}

TEST_CASE("minimal dilations differ by a unitary on the dilation space") {
  Rng rng = make_rng(10);
  const Channel t = random_channel(2, 2, 2, rng);
  const StinespringIsometry v1 = kraus_to_stinespring(t);
  // a different Kraus set of the same channel
  const ComplexMatrix w = random_unitary(2, rng);
  std::vector<ComplexMatrix> mixed;
  for (Index x = 0; x < 2; ++x) {
    ComplexMatrix k = ComplexMatrix::Zero(2, 2);
    for (Index y = 0; y < 2; ++y) k += w(x, y) * t.kraus()[static_cast<std::size_t>(y)];
    mixed.push_back(k);
  }
  const StinespringIsometry v2 = stinespring_from_kraus(mixed, 2, 2);
  const ComplexMatrix u = dilation_unitary(v1, v2);
  CHECK(is_unitary(u, 1e-9));
  CHECK(max_diff(kron(identity(2), u) * v1.v, v2.v) < 1e-9);
}

TEST_CASE("ancilla form") {
  Rng rng = make_rng(11);
  const AncillaForm id = ancilla_form(Channel::identity(2));
  CHECK(id.ancilla_dim == 1);
  CHECK(max_diff(apply_ancilla_form(id, matrix_unit(2, 0, 1)), matrix_unit(2, 0, 1)) < 1e-12);

  const Channel t = random_channel(2, 2, 2, rng);
  const AncillaForm a0 = ancilla_form(t, 0);
  const AncillaForm a1 = ancilla_form(t, 17);
  CHECK(is_unitary(a0.unitary, 1e-9));
  CHECK(is_unitary(a1.unitary, 1e-9));
  CHECK(max_diff(a0.unitary, a1.unitary) > 1e-3);
  for (Index i = 0; i < 2; ++i)
    for (Index j = 0; j < 2; ++j) {
      const ComplexMatrix e = matrix_unit(2, i, j);
      CHECK(max_diff(apply_ancilla_form(a0, e), apply_schrodinger(t, e)) < 1e-9);
      CHECK(max_diff(apply_ancilla_form(a1, e), apply_schrodinger(t, e)) < 1e-9);
    }

  // unequal dimensions
  const Channel t23 = random_channel(2, 3, 2, rng);
  const AncillaForm a = ancilla_form(t23);
  CHECK(a.in_dim * a.ancilla_dim == a.out_dim * a.discard_dim);
  const ComplexMatrix rho = random_density(2, rng);
  CHECK(max_diff(apply_ancilla_form(a, rho), apply_schrodinger(t23, rho)) < 1e-9);
}

TEST_CASE("instruments") {
  const Instrument vn = Instrument::von_neumann({matrix_unit(2, 0, 0), matrix_unit(2, 1, 1)});
  CHECK(vn.outcomes() == std::vector<std::string>{"0", "1"});
  ComplexVector plus(2);
  plus << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  const HybridState h = apply_instrument(vn, projector(plus));
  REQUIRE(h.branches.size() == 2);
  CHECK(h.branches[0].weight == doctest::Approx(0.5));
  CHECK(h.branches[1].weight == doctest::Approx(0.5));
  CHECK(max_diff(*h.branches[0].state, matrix_unit(2, 0, 0)) < 1e-12);
  CHECK(max_diff(*h.branches[1].state, matrix_unit(2, 1, 1)) < 1e-12);
  CHECK(h.total_weight() == doctest::Approx(1.0));

  // repeatability: a second round never changes the outcome
  for (std::size_t x = 0; x < 2; ++x) {
    const ComplexMatrix first = vn.apply_schrodinger(x, projector(plus));
    for (std::size_t y = 0; y < 2; ++y) {
      const double w = vn.apply_schrodinger(y, first).trace().real();
      CHECK(w == doctest::Approx(x == y ? 0.5 : 0.0));
    }
  }

  // marginals
  Rng rng = make_rng(12);
  const ComplexMatrix u = random_unitary(2, rng);
  const Instrument inst(2, 2, {"a", "b"}, {{std::sqrt(0.3) * u}, {std::sqrt(0.7) * matrix_unit(2, 0, 0), std::sqrt(0.7) * matrix_unit(2, 1, 1)}});
  const Channel bar = inst.marginal_channel();
  const ComplexMatrix b = random_ginibre(2, 2, rng);
  CHECK(max_diff(apply_heisenberg(bar, b), inst.apply_heisenberg(0, b) + inst.apply_heisenberg(1, b)) < 1e-12);
  const Povm f = inst.marginal_povm();
  CHECK(max_diff(f.effects()[0], 0.3 * identity(2)) < 1e-12);
  CHECK(max_diff(f.effects()[1], 0.7 * identity(2)) < 1e-12);

  CHECK_THROWS_AS(Instrument(2, 2, {}, {{0.5 * identity(2)}}), InvariantError);
}

TEST_CASE("Radon-Nikodym densities") {
  const Instrument vn = Instrument::von_neumann({matrix_unit(2, 0, 0), matrix_unit(2, 1, 1)});
  const std::vector<ComplexMatrix> f = radon_nikodym(vn);
  const StinespringIsometry v = kraus_to_stinespring(vn.marginal_channel());
  REQUIRE(f.size() == 2);
  for (std::size_t x = 0; x < 2; ++x) {
    // indicator of one dilation direction
    CHECK(max_diff(f[x] * f[x], f[x]) < 1e-9);
    CHECK(f[x].trace().real() == doctest::Approx(1.0).epsilon(1e-9));
    for (Index i = 0; i < 2; ++i)
      for (Index j = 0; j < 2; ++j) {
        const ComplexMatrix e = matrix_unit(2, i, j);
        const ComplexMatrix rebuilt = v.v.adjoint() * kron(e, f[x]) * v.v;
        CHECK(max_diff(rebuilt, vn.apply_heisenberg(x, e)) < 1e-9);
      }
  }

  // unitary marginal: no information without perturbation
  Rng rng = make_rng(13);
  const ComplexMatrix u = random_unitary(3, rng);
  const std::vector<double> p{0.2, 0.5, 0.3};
  std::vector<std::vector<ComplexMatrix>> kraus;
  for (double px : p) kraus.push_back({std::sqrt(px) * u});
  const Instrument blind(3, 3, {}, kraus);
  const std::vector<ComplexMatrix> g = radon_nikodym(blind);
  for (std::size_t x = 0; x < 3; ++x) CHECK(max_diff(g[x], p[x] * identity(g[x].rows())) < 1e-9);

  const Instrument single(2, 2, {"only"}, {{random_unitary(2, rng)}});
  const std::vector<ComplexMatrix> one = radon_nikodym(single);
  CHECK(max_diff(one[0], identity(one[0].rows())) < 1e-9);
}

TEST_CASE("measure-prepare channels") {
  const Povm z({matrix_unit(2, 0, 0), matrix_unit(2, 1, 1)});
  const Channel copy = measure_prepare_channel(z, {matrix_unit(2, 0, 0), matrix_unit(2, 1, 1)});
  for (Index k = 0; k < 2; ++k) CHECK(max_diff(apply_schrodinger(copy, matrix_unit(2, k, k)), matrix_unit(2, k, k)) < 1e-12);

  Rng rng = make_rng(14);
  const ComplexMatrix rho1 = random_density(2, rng);
  const Channel constant = measure_prepare_channel(Povm({identity(2)}), {rho1});
  CHECK(action_distance(constant, Channel::depolarizing_to(2, rho1)) < 1e-9);

  // no separable channel is the identity: |T - id| stays away from zero.
  // The worst fidelity of an entanglement-breaking qubit channel is at most
  // 2/3, and 1 - F <= |T - id|, so the gap is at least 1/3.
  OptimizerConfig opt;
  opt.restarts = 8;
  for (int k = 0; k < 5; ++k) {
    const ComplexMatrix u = random_unitary(2, rng);
    const Povm b({u * matrix_unit(2, 0, 0) * u.adjoint(), u * matrix_unit(2, 1, 1) * u.adjoint()});
    const Channel mp = measure_prepare_channel(b, {u * matrix_unit(2, 0, 0) * u.adjoint(), u * matrix_unit(2, 1, 1) * u.adjoint()});
    const NormEstimate n = operator_norm(LinearMap::from_channel(mp) - LinearMap::identity(2), opt);
    CHECK(n.value >= 1.0 / 3.0);
  }
}
