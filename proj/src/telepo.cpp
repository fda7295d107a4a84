#include "qichan/telepo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qichan/systems.hpp"

namespace qichan {

namespace {

cplx root_of_unity(Index k, Index d) {
  return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(d));
}

double max_abs(const ComplexMatrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

ComplexVector max_entangled(Index d) {
  if (d < 1) throw DimensionError("dimension must be positive");
  ComplexVector v = ComplexVector::Zero(d * d);
  for (Index k = 0; k < d; ++k) v(k * d + k) = 1.0 / std::sqrt(static_cast<double>(d));
  return v;
}

std::vector<ComplexMatrix> pauli_basis() { return {pauli(0), pauli(1), pauli(2), pauli(3)}; }

std::vector<ComplexMatrix> weyl_basis(Index d) {
  if (d < 2) throw DimensionError("Weyl basis needs d >= 2");
  ComplexMatrix shift = ComplexMatrix::Zero(d, d);
  ComplexMatrix clock = ComplexMatrix::Zero(d, d);
  for (Index k = 0; k < d; ++k) {
    shift((k + 1) % d, k) = 1.0;
    clock(k, k) = root_of_unity(k, d);
  }
  std::vector<ComplexMatrix> out;
  ComplexMatrix sa = identity(d);
  for (Index a = 0; a < d; ++a) {
    ComplexMatrix u = sa;
    for (Index b = 0; b < d; ++b) {
      out.push_back(u);
      u = u * clock;
    }
    sa = shift * sa;
  }
  return out;
}

LatinSquare::LatinSquare(std::vector<std::vector<int>> rows) : rows_(std::move(rows)) {
  const std::size_t d = rows_.size();
  if (d == 0) throw InvariantError("Latin square must be nonempty");
  auto is_permutation = [d](const std::vector<int>& v) {
    std::vector<bool> seen(d, false);
    for (int x : v) {
      if (x < 0 || static_cast<std::size_t>(x) >= d || seen[static_cast<std::size_t>(x)]) return false;
      seen[static_cast<std::size_t>(x)] = true;
    }
    return true;
  };
  for (const auto& r : rows_) {
    if (r.size() != d) throw InvariantError("Latin square must be square");
    if (!is_permutation(r)) throw InvariantError("a row of the Latin square is not a permutation");
  }
  for (std::size_t n = 0; n < d; ++n) {
    std::vector<int> col;
    for (const auto& r : rows_) col.push_back(r[n]);
    if (!is_permutation(col)) throw InvariantError("a column of the Latin square is not a permutation");
  }
}

LatinSquare LatinSquare::cyclic(int d) {
  std::vector<std::vector<int>> rows(static_cast<std::size_t>(d), std::vector<int>(static_cast<std::size_t>(d)));
  for (int i = 0; i < d; ++i)
    for (int n = 0; n < d; ++n) rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(n)] = (i + n) % d;
  return LatinSquare(std::move(rows));
}

ComplexMatrix fourier_matrix(Index d) {
  ComplexMatrix f(d, d);
  for (Index j = 0; j < d; ++j)
    for (Index n = 0; n < d; ++n) f(j, n) = root_of_unity(j * n, d) / std::sqrt(static_cast<double>(d));
  return f;
}

HadamardSet::HadamardSet(std::vector<ComplexMatrix> matrices, const Tolerances& tol)
    : matrices_(std::move(matrices)) {
  if (matrices_.empty()) throw InvariantError("Hadamard set must be nonempty");
  const Index d = matrices_.front().rows();
  if (static_cast<Index>(matrices_.size()) != d)
    throw InvariantError("need exactly d Hadamard matrices of order d");
  const double modulus = 1.0 / std::sqrt(static_cast<double>(d));
  for (const auto& h : matrices_) {
    if (h.rows() != d || h.cols() != d) throw InvariantError("Hadamard matrices must all be d x d");
    if (!is_unitary(h, tol.alg)) throw InvariantError("Hadamard matrix is not unitary");
    if ((h.cwiseAbs().array() - modulus).abs().maxCoeff() > tol.alg)
      throw InvariantError("Hadamard matrix entries must have modulus d^{-1/2}");
  }
}

HadamardSet HadamardSet::fourier(int d) {
  return HadamardSet(std::vector<ComplexMatrix>(static_cast<std::size_t>(d), fourier_matrix(d)));
}

double orthogonality_residual(const std::vector<ComplexMatrix>& unitaries) {
  if (unitaries.empty()) return 0.0;
  const double d = static_cast<double>(unitaries.front().rows());
  double worst = 0.0;
  for (std::size_t x = 0; x < unitaries.size(); ++x)
    for (std::size_t y = 0; y < unitaries.size(); ++y) {
      const cplx t = (unitaries[x].adjoint() * unitaries[y]).trace();
      worst = std::max(worst, std::abs(t - (x == y ? d : 0.0)));
    }
  return worst;
}

std::vector<ComplexMatrix> basis_from_design(const LatinSquare& ls, const HadamardSet& hs,
                                             const Tolerances& tol) {
  const int d = ls.order();
  if (hs.order() != d) throw InvariantError("Latin square and Hadamard matrices have different orders");
  const double root_d = std::sqrt(static_cast<double>(d));
  std::vector<ComplexMatrix> out;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      ComplexMatrix u = ComplexMatrix::Zero(d, d);
      for (int n = 0; n < d; ++n) u(ls(i, n), n) = root_d * hs[static_cast<std::size_t>(i)](j, n);
      out.push_back(std::move(u));
    }
  const double r = orthogonality_residual(out);
  if (r > tol.alg)
    throw NumericalError("design basis fails trace orthogonality (residual " + std::to_string(r) + ")");
  return out;
}

TeleportationScheme assemble_scheme(Index d, const ComplexVector& omega,
                                    std::vector<ComplexMatrix> unitaries) {
  if (omega.size() != d * d) throw DimensionError("resource vector must live in C^d ⊗ C^d");
  TeleportationScheme s;
  s.d = d;
  s.omega = omega;
  s.unitaries = std::move(unitaries);
  const ComplexMatrix one = identity(d);
  for (const auto& u : s.unitaries) {
    if (u.rows() != d || u.cols() != d) throw DimensionError("scheme unitaries must be d x d");
    s.effects.push_back(kron(u, one) * omega);
  }
  return s;
}

TeleportationScheme build_scheme(const std::vector<ComplexMatrix>& unitaries, Index d,
                                 const Tolerances& tol) {
  if (static_cast<Index>(unitaries.size()) != d * d) throw InvariantError("a tight scheme needs d² unitaries");
  for (const auto& u : unitaries)
    if (u.rows() != d || u.cols() != d || !is_unitary(u, tol.alg))
      throw InvariantError("scheme operators must be d x d unitaries");
  const double r = orthogonality_residual(unitaries);
  if (r > tol.alg)
    throw InvariantError("unitaries are not trace-orthogonal (residual " + std::to_string(r) + ")");
  return assemble_scheme(d, max_entangled(d), unitaries);
}

bool SchemeInvariants::holds(double eps) const {
  return omega_residual < eps && orthogonality_residual < eps && unitarity_residual < eps &&
         gram_residual < eps && link_residual < eps && completeness_residual < eps;
}

SchemeInvariants check_scheme(const TeleportationScheme& s) {
  SchemeInvariants r;
  const Index d = s.d;
  const RealVector coeff = Eigen::JacobiSVD<ComplexMatrix>(reshape_vector(s.omega, d, d)).singularValues();
  r.omega_residual = (coeff.array() - 1.0 / std::sqrt(static_cast<double>(d))).abs().maxCoeff();
  r.orthogonality_residual = orthogonality_residual(s.unitaries);
  for (const auto& u : s.unitaries)
    r.unitarity_residual = std::max(r.unitarity_residual, max_abs(u.adjoint() * u - identity(d)));
  const std::size_t n = s.effects.size();
  ComplexMatrix sum = ComplexMatrix::Zero(d * d, d * d);
  for (std::size_t x = 0; x < n; ++x) {
    sum += projector(s.effects[x]);
    for (std::size_t y = 0; y < n; ++y)
      r.gram_residual =
          std::max(r.gram_residual, std::abs(s.effects[x].dot(s.effects[y]) - (x == y ? 1.0 : 0.0)));
    if (x < s.unitaries.size())
      r.link_residual = std::max(
          r.link_residual, (s.effects[x] - kron(s.unitaries[x], identity(d)) * s.omega).cwiseAbs().maxCoeff());
  }
  if (n != s.unitaries.size()) r.link_residual = std::numeric_limits<double>::infinity();
  r.completeness_residual = max_abs(sum - identity(d * d));
  return r;
}

double verify_teleportation(const TeleportationScheme& s) {
  const Index d = s.d;
  // Bob's conditional operation after outcome x, as a map from system 1 to
  // system 3: K_x = (<Φ_x| ⊗ 1)(1 ⊗ |Ω>), then the correction U_x.
  const ComplexMatrix om = reshape_vector(s.omega, d, d);
  std::vector<ComplexMatrix> ops;
  for (std::size_t x = 0; x < s.effects.size(); ++x) {
    const ComplexMatrix k = om.transpose() * reshape_vector(s.effects[x], d, d).adjoint();
    ops.push_back(s.unitaries[x] * k);
  }
  // Alice's effects must form an observable, otherwise each branch can look
  // right while the protocol as a whole is not a measurement.
  ComplexMatrix total = ComplexMatrix::Zero(d * d, d * d);
  for (const auto& f : s.effects) total += f * f.adjoint();
  double worst = max_abs(total - identity(d * d));
  for (Index mu = 0; mu < d; ++mu)
    for (Index nu = 0; nu < d; ++nu) {
      const ComplexMatrix rho = matrix_unit(d, mu, nu);
      ComplexMatrix out = ComplexMatrix::Zero(d, d);
      for (const auto& v : ops) out += v * rho * v.adjoint();
      // tr(out A) for A = e_αβ is out_βα; compare with tr(ρA) = ρ_βα
      worst = std::max(worst, max_abs(out - rho));
    }
  return worst;
}

double verify_dense_coding(const TeleportationScheme& s) {
  const Index d = s.d;
  const ComplexMatrix one = identity(d);
  double worst = 0.0;
  for (std::size_t x = 0; x < s.unitaries.size(); ++x) {
    // tr(ω (T_x ⊗ id)(F_y)) = |<(U_x ⊗ 1)Ω, Φ_y>|²
    const ComplexVector encoded = kron(s.unitaries[x], one) * s.omega;
    for (std::size_t y = 0; y < s.effects.size(); ++y)
      worst = std::max(worst, std::abs(std::norm(encoded.dot(s.effects[y])) - (x == y ? 1.0 : 0.0)));
  }
  return worst;
}

OverlapResult overlap_lambda(const ComplexVector& omega1, const ComplexVector& omega2, Index dim_h,
                             Index dim_k, const Tolerances& tol) {
  if (omega1.size() != dim_k * dim_h || omega2.size() != dim_h * dim_k)
    throw DimensionError("vectors must live in K ⊗ H and H ⊗ K");
  if (std::abs(omega1.norm() - 1.0) > tol.alg || std::abs(omega2.norm() - 1.0) > tol.alg)
    throw InvariantError("overlap vectors must be unit vectors");
  const ComplexMatrix a1 = reshape_vector(omega1, dim_k, dim_h);
  const ComplexMatrix a2 = reshape_vector(omega2, dim_h, dim_k);
  // <e_n ⊗ Ω1, Ω2 ⊗ e_m> = sum_k Ω2(n,k) conj(Ω1(k,m))
  const ComplexMatrix m = a2 * a1.conjugate();
  OverlapResult r;
  r.lambda = m.trace() / static_cast<double>(dim_h);
  r.residual = (m - r.lambda * identity(dim_h)).norm();
  r.exists = r.residual < std::sqrt(tol.alg);
  if (!r.exists) r.lambda = 0.0;

  const double bound = 1.0 / static_cast<double>(dim_h);
  r.maximal = r.exists && std::abs(std::abs(r.lambda) - bound) < std::sqrt(tol.alg);
  const double target = 1.0 / std::sqrt(static_cast<double>(std::min(dim_h, dim_k)));
  const RealVector s1 = Eigen::JacobiSVD<ComplexMatrix>(a1).singularValues();
  const RealVector s2 = Eigen::JacobiSVD<ComplexMatrix>(a2).singularValues();
  r.maximally_entangled = dim_h == dim_k && (s1.array() - target).abs().maxCoeff() < std::sqrt(tol.alg) &&
                          (s2.array() - target).abs().maxCoeff() < std::sqrt(tol.alg);
  // swap-equal up to the phase carried by λ
  if (r.exists && std::abs(r.lambda) > 0) {
    const cplx phase = r.lambda / std::abs(r.lambda);
    r.swap_equal = (a2 - phase * a1.transpose()).cwiseAbs().maxCoeff() < std::sqrt(tol.alg);
  }
  return r;
}

StateIndependence check_state_independence(const std::vector<ComplexMatrix>& unitaries,
                                           const ComplexMatrix& omega1) {
  const Index d = omega1.rows();
  StateIndependence r;
  for (std::size_t x = 0; x < unitaries.size(); ++x)
    for (std::size_t y = 0; y < unitaries.size(); ++y) {
      const cplx t = (omega1 * unitaries[x].adjoint() * unitaries[y]).trace();
      r.skew_residual = std::max(r.skew_residual, std::abs(t - (x == y ? 1.0 : 0.0)));
    }
  r.state_residual = max_abs(omega1 - identity(d) / static_cast<double>(d));
  return r;
}

PauliEquivalence pauli_equivalence(const std::vector<ComplexMatrix>& basis, const Tolerances& tol) {
  PauliEquivalence r;
  if (basis.size() != 4 || basis.front().rows() != 2) throw DimensionError("need four 2x2 unitaries");
  for (const auto& u : basis)
    if (!is_unitary(u, tol.alg)) throw InvariantError("basis element is not unitary");
  if (orthogonality_residual(basis) > tol.alg) return r;

  // V_x = U_0^* U_x = c_x n_x·σ for x = 1..3, with orthonormal real n_x
  const ComplexMatrix u0 = basis[0];
  std::array<BlochVector, 3> n{};
  std::array<cplx, 3> c{};
  for (int x = 1; x <= 3; ++x) {
    const ComplexMatrix v = u0.adjoint() * basis[static_cast<std::size_t>(x)];
    cplx phase = std::sqrt(-v.determinant());
    ComplexMatrix h = v / phase;
    for (int k = 0; k < 3; ++k) n[static_cast<std::size_t>(x - 1)][k] = 0.5 * (h * pauli(k + 1)).trace().real();
    c[static_cast<std::size_t>(x - 1)] = phase;
  }
  // orientation: make (n1, n2, n3) right-handed
  const auto& a = n[0];
  const auto& b = n[1];
  const double triple = n[2][0] * (a[1] * b[2] - a[2] * b[1]) + n[2][1] * (a[2] * b[0] - a[0] * b[2]) +
                        n[2][2] * (a[0] * b[1] - a[1] * b[0]);
  if (triple < 0) {
    for (double& v : n[2]) v = -v;
    c[2] = -c[2];
  }

  auto dot_sigma = [](const BlochVector& v) {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    for (int k = 0; k < 3; ++k) m += v[k] * pauli(k + 1);
    return m;
  };
  // W sends the eigenbasis of n3·σ to that of σz, then a diagonal phase
  // aligns n1·σ with σx
  const HermitianEigen e3 = eigh(dot_sigma(n[2]));
  ComplexMatrix w(2, 2);
  w.row(0) = e3.vectors.col(1).adjoint();  // eigenvalue +1
  w.row(1) = e3.vectors.col(0).adjoint();  // eigenvalue -1
  const ComplexMatrix x1 = w * dot_sigma(n[0]) * w.adjoint();
  const double theta = std::arg(x1(0, 1));
  ComplexMatrix fix = ComplexMatrix::Identity(2, 2);
  fix(1, 1) = std::polar(1.0, theta);
  w = fix * w;

  r.w = w;
  r.phases = {1.0, c[0], c[1], c[2]};
  r.residual = 0.0;
  for (int x = 0; x < 4; ++x) {
    const ComplexMatrix model = r.phases[static_cast<std::size_t>(x)] * u0 * w.adjoint() * pauli(x) * w;
    r.residual = std::max(r.residual, max_abs(model - basis[static_cast<std::size_t>(x)]));
  }
  r.equivalent = r.residual < std::sqrt(tol.alg);
  return r;
}

}  // namespace qichan
