#include "qichan/channels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "qichan/random.hpp"

namespace qichan {

namespace {

void require_square(const ComplexMatrix& m, Index d, const char* what) {
  if (m.rows() != d || m.cols() != d)
    throw DimensionError(std::string(what) + ": expected " + std::to_string(d) + "x" +
                         std::to_string(d) + ", got " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()));
}

// |K>> = sum_i e_i ⊗ K e_i on C^in ⊗ C^out.
ComplexVector vectorize(const ComplexMatrix& k) {
  const Index in = k.cols();
  const Index out = k.rows();
  ComplexVector v(in * out);
  for (Index i = 0; i < in; ++i)
    for (Index o = 0; o < out; ++o) v(i * out + o) = k(o, i);
  return v;
}

ComplexMatrix unvectorize(const ComplexVector& v, Index in, Index out) {
  ComplexMatrix k(out, in);
  for (Index i = 0; i < in; ++i)
    for (Index o = 0; o < out; ++o) k(o, i) = v(i * out + o);
  return k;
}

ComplexMatrix kraus_sum(const std::vector<ComplexMatrix>& kraus, Index in) {
  ComplexMatrix s = ComplexMatrix::Zero(in, in);
  for (const auto& k : kraus) s += k.adjoint() * k;
  return s;
}

// Number of linearly independent operators in the list.
Index kraus_rank(const std::vector<ComplexMatrix>& kraus, const Tolerances& tol) {
  const Index n = static_cast<Index>(kraus.size());
  ComplexMatrix g(n, n);
  for (Index x = 0; x < n; ++x)
    for (Index y = 0; y < n; ++y)
      g(x, y) = (kraus[static_cast<std::size_t>(x)].adjoint() * kraus[static_cast<std::size_t>(y)]).trace();
  const RealVector ev = eigh(g).values;
  const double top = std::max(1.0, ev(n - 1));
  Index r = 0;
  for (Index k = 0; k < n; ++k)
    if (ev(k) > tol.rank * top) ++r;
  return r;
}

}  // namespace

// ---------------------------------------------------------------- LinearMap

LinearMap::LinearMap(Index in_dim, Index out_dim, std::vector<Term> terms)
    : in_dim_(in_dim), out_dim_(out_dim), terms_(std::move(terms)) {
  if (in_dim_ < 1 || out_dim_ < 1) throw DimensionError("map dimensions must be positive");
  for (const auto& t : terms_) {
    if (t.left.rows() != in_dim_ || t.left.cols() != out_dim_ || t.right.rows() != out_dim_ ||
        t.right.cols() != in_dim_)
      throw DimensionError("operator-sum term has the wrong shape");
  }
}

LinearMap LinearMap::from_channel(const Channel& t) {
  std::vector<Term> terms;
  terms.reserve(t.kraus().size());
  for (const auto& k : t.kraus()) terms.push_back({k.adjoint(), k});
  return LinearMap(t.in_dim(), t.out_dim(), std::move(terms));
}

LinearMap LinearMap::identity(Index d) {
  return LinearMap(d, d, {{qichan::identity(d), qichan::identity(d)}});
}

LinearMap LinearMap::transpose(Index d) {
  // e_jk B e_jk = B_kj e_jk
  std::vector<Term> terms;
  for (Index j = 0; j < d; ++j)
    for (Index k = 0; k < d; ++k) terms.push_back({matrix_unit(d, j, k), matrix_unit(d, j, k)});
  return LinearMap(d, d, std::move(terms));
}

ComplexMatrix LinearMap::apply(const ComplexMatrix& b) const {
  require_square(b, out_dim_, "map argument");
  ComplexMatrix out = ComplexMatrix::Zero(in_dim_, in_dim_);
  for (const auto& t : terms_) out.noalias() += t.left * b * t.right;
  return out;
}

ComplexMatrix LinearMap::apply_predual(const ComplexMatrix& r) const {
  require_square(r, in_dim_, "predual argument");
  ComplexMatrix out = ComplexMatrix::Zero(out_dim_, out_dim_);
  for (const auto& t : terms_) out.noalias() += t.right * r * t.left;
  return out;
}

LinearMap LinearMap::tensor_identity(Index n) const {
  const ComplexMatrix one = qichan::identity(n);
  std::vector<Term> terms;
  terms.reserve(terms_.size());
  for (const auto& t : terms_) terms.push_back({kron(t.left, one), kron(t.right, one)});
  return LinearMap(in_dim_ * n, out_dim_ * n, std::move(terms));
}

ComplexMatrix LinearMap::choi_operator() const {
  const Index n = in_dim_ * out_dim_;
  ComplexMatrix j = ComplexMatrix::Zero(n, n);
  for (Index a = 0; a < in_dim_; ++a)
    for (Index b = 0; b < in_dim_; ++b)
      j.block(a * out_dim_, b * out_dim_, out_dim_, out_dim_) =
          apply_predual(matrix_unit(in_dim_, a, b));
  return j;
}

LinearMap LinearMap::operator+(const LinearMap& other) const {
  if (in_dim_ != other.in_dim_ || out_dim_ != other.out_dim_)
    throw DimensionError("cannot add maps of different shapes");
  std::vector<Term> terms = terms_;
  terms.insert(terms.end(), other.terms_.begin(), other.terms_.end());
  return LinearMap(in_dim_, out_dim_, std::move(terms));
}

LinearMap LinearMap::operator-(const LinearMap& other) const { return *this + other.scaled(-1.0); }

LinearMap LinearMap::scaled(cplx c) const {
  std::vector<Term> terms = terms_;
  for (auto& t : terms) t.left *= c;
  return LinearMap(in_dim_, out_dim_, std::move(terms));
}

LinearMap then(const LinearMap& first, const LinearMap& second) {
  if (first.out_dim() != second.in_dim())
    throw DimensionError("composition: output of the first map does not feed the second");
  std::vector<LinearMap::Term> terms;
  for (const auto& t1 : first.terms())
    for (const auto& t2 : second.terms()) terms.push_back({t1.left * t2.left, t2.right * t1.right});
  return LinearMap(first.in_dim(), second.out_dim(), std::move(terms));
}

// ------------------------------------------------------------------ Channel

Channel::Channel(Index in_dim, Index out_dim, std::vector<ComplexMatrix> kraus,
                 const Tolerances& tol)
    : in_dim_(in_dim), out_dim_(out_dim), kraus_(std::move(kraus)) {
  if (in_dim_ < 1 || out_dim_ < 1) throw DimensionError("channel dimensions must be positive");
  if (kraus_.empty()) throw InvariantError("a channel needs at least one Kraus operator");
  for (const auto& k : kraus_)
    if (k.rows() != out_dim_ || k.cols() != in_dim_)
      throw DimensionError("Kraus operator must be out_dim x in_dim");
  const double dev = (kraus_sum(kraus_, in_dim_) - qichan::identity(in_dim_)).cwiseAbs().maxCoeff();
  if (dev > tol.alg)
    throw InvariantError("Kraus operators violate sum K*K = 1 (deviation " + std::to_string(dev) + ")");
}

Channel Channel::identity(Index d) { return Channel(d, d, {qichan::identity(d)}); }

Channel Channel::unitary(const ComplexMatrix& u, const Tolerances& tol) {
  if (u.rows() != u.cols() || !is_unitary(u, tol.alg)) throw InvariantError("matrix is not unitary");
  return Channel(u.rows(), u.rows(), {u}, tol);
}

Channel Channel::depolarizing_to(Index in_dim, const ComplexMatrix& rho, const Tolerances& tol) {
  const State s(Algebra::quantum(rho.rows()), rho, tol);
  const HermitianEigen e = eigh(s.rho());
  std::vector<ComplexMatrix> kraus;
  for (Index k = 0; k < e.values.size(); ++k) {
    if (e.values(k) <= tol.rank) continue;
    const ComplexVector w = std::sqrt(e.values(k)) * e.vectors.col(k);
    for (Index j = 0; j < in_dim; ++j) kraus.push_back(outer(w, basis_vector(in_dim, j)));
  }
  Channel c(in_dim, rho.rows(), std::move(kraus), tol);
  c.mark_separable();
  return c;
}

Channel Channel::expansion(Index in_dim, const ComplexMatrix& rho_prime, const Tolerances& tol) {
  const State s(Algebra::quantum(rho_prime.rows()), rho_prime, tol);
  const HermitianEigen e = eigh(s.rho());
  const Index m = rho_prime.rows();
  std::vector<ComplexMatrix> kraus;
  for (Index k = 0; k < m; ++k) {
    if (e.values(k) <= tol.rank) continue;
    const ComplexMatrix w = std::sqrt(e.values(k)) * e.vectors.col(k);
    kraus.push_back(kron(qichan::identity(in_dim), w));
  }
  return Channel(in_dim, in_dim * m, std::move(kraus), tol);
}

Channel Channel::classical(const std::vector<std::vector<double>>& transition,
                           const Tolerances& tol) {
  if (transition.empty()) throw DimensionError("empty transition matrix");
  const Index nx = static_cast<Index>(transition.size());
  const Index ny = static_cast<Index>(transition.front().size());
  std::vector<ComplexMatrix> kraus;
  for (Index x = 0; x < nx; ++x) {
    const auto& row = transition[static_cast<std::size_t>(x)];
    if (static_cast<Index>(row.size()) != ny) throw DimensionError("ragged transition matrix");
    double sum = 0.0;
    for (Index y = 0; y < ny; ++y) {
      const double p = row[static_cast<std::size_t>(y)];
      if (p < -tol.alg) throw InvariantError("negative transition probability");
      sum += p;
      if (p > 0) kraus.push_back(std::sqrt(p) * outer(basis_vector(ny, y), basis_vector(nx, x)));
    }
    if (std::abs(sum - 1.0) > tol.alg) throw InvariantError("transition matrix row does not sum to 1");
  }
  Channel c(nx, ny, std::move(kraus), tol);
  c.mark_separable();
  return c;
}

ComplexMatrix apply_heisenberg(const Channel& t, const ComplexMatrix& b) {
  require_square(b, t.out_dim(), "Heisenberg argument");
  ComplexMatrix out = ComplexMatrix::Zero(t.in_dim(), t.in_dim());
  for (const auto& k : t.kraus()) out.noalias() += k.adjoint() * b * k;
  return out;
}

ComplexMatrix apply_schrodinger(const Channel& t, const ComplexMatrix& rho) {
  require_square(rho, t.in_dim(), "Schrodinger argument");
  ComplexMatrix out = ComplexMatrix::Zero(t.out_dim(), t.out_dim());
  for (const auto& k : t.kraus()) out.noalias() += k * rho * k.adjoint();
  return out;
}

State apply_schrodinger(const Channel& t, const State& s, const Tolerances& tol) {
  return State(Algebra::quantum(t.out_dim()), apply_schrodinger(t, s.rho()), tol);
}

Channel then(const Channel& first, const Channel& second, const Tolerances& tol) {
  if (first.out_dim() != second.in_dim())
    throw DimensionError("composition: output of the first channel does not feed the second");
  std::vector<ComplexMatrix> kraus;
  kraus.reserve(first.kraus().size() * second.kraus().size());
  for (const auto& k2 : second.kraus())
    for (const auto& k1 : first.kraus()) kraus.push_back(k2 * k1);
  Channel c(first.in_dim(), second.out_dim(), std::move(kraus), tol);
  c.mark_separable(first.separable() || second.separable());
  return c;
}

Channel tensor(const Channel& a, const Channel& b, const Tolerances& tol) {
  std::vector<ComplexMatrix> kraus;
  for (const auto& ka : a.kraus())
    for (const auto& kb : b.kraus()) kraus.push_back(kron(ka, kb));
  return Channel(a.in_dim() * b.in_dim(), a.out_dim() * b.out_dim(), std::move(kraus), tol);
}

// --------------------------------------------------------------------- Choi

ChoiMatrix choi_of(const Channel& t) {
  const Index n = t.in_dim() * t.out_dim();
  ComplexMatrix c = ComplexMatrix::Zero(n, n);
  for (const auto& k : t.kraus()) {
    const ComplexVector v = vectorize(k);
    c.noalias() += v * v.adjoint();
  }
  return {t.in_dim(), t.out_dim(), c / static_cast<double>(t.in_dim())};
}

ChoiMatrix choi_of(const LinearMap& t) {
  return {t.in_dim(), t.out_dim(), t.choi_operator() / static_cast<double>(t.in_dim())};
}

LinearMap map_from_choi(const ChoiMatrix& c) {
  const Index in = c.in_dim;
  const Index out = c.out_dim;
  require_square(c.c, in * out, "Choi matrix");
  // row (a, o) of the Choi operator carries T_*(|a><b|)_{o o'} for all (b, o')
  std::vector<LinearMap::Term> terms;
  for (Index a = 0; a < in; ++a)
    for (Index o = 0; o < out; ++o) {
      ComplexMatrix left(in, out);
      for (Index b = 0; b < in; ++b)
        for (Index o2 = 0; o2 < out; ++o2) left(b, o2) = static_cast<double>(in) * c.c(a * out + o, b * out + o2);
      terms.push_back({left, outer(basis_vector(out, o), basis_vector(in, a))});
    }
  return LinearMap(in, out, std::move(terms));
}

std::vector<ComplexMatrix> minimal_kraus(const ComplexMatrix& choi_operator, Index in_dim,
                                         Index out_dim, const Tolerances& tol) {
  require_square(choi_operator, in_dim * out_dim, "Choi operator");
  const HermitianEigen e = eigh(choi_operator);
  const Index n = e.values.size();
  const double top = std::max(1.0, std::abs(e.values(n - 1)));
  std::vector<ComplexMatrix> kraus;
  for (Index k = n; k-- > 0;) {
    if (e.values(k) <= tol.rank * top) break;
    kraus.push_back(unvectorize(std::sqrt(e.values(k)) * e.vectors.col(k), in_dim, out_dim));
  }
  return kraus;
}

CpReport is_completely_positive(const ChoiMatrix& c, const Tolerances& tol) {
  require_square(c.c, c.in_dim * c.out_dim, "Choi matrix");
  const HermitianEigen e = eigh(c.c);
  CpReport r;
  r.min_eigenvalue = e.values(0);
  r.witness = e.vectors.col(0);
  r.completely_positive = r.min_eigenvalue >= -tol.alg && is_hermitian(c.c, tol.alg);
  return r;
}

CpReport is_completely_positive(const LinearMap& m, const Tolerances& tol) {
  return is_completely_positive(choi_of(m), tol);
}

Channel channel_from_choi(const ChoiMatrix& c, const Tolerances& tol) {
  require_square(c.c, c.in_dim * c.out_dim, "Choi matrix");
  if (!is_hermitian(c.c, tol.alg)) throw InvariantError("Choi matrix is not hermitian");
  const CpReport cp = is_completely_positive(c, tol);
  if (!cp.completely_positive)
    throw InvariantError("Choi matrix is not positive: the map is not completely positive (eigenvalue " +
                         std::to_string(cp.min_eigenvalue) + ")");
  const std::vector<Index> dims{c.in_dim, c.out_dim};
  const std::vector<Index> keep{0};
  const ComplexMatrix marginal = partial_trace(c.c, dims, keep);
  const ComplexMatrix target = qichan::identity(c.in_dim) / static_cast<double>(c.in_dim);
  if ((marginal - target).cwiseAbs().maxCoeff() > tol.alg)
    throw InvariantError("input marginal of the Choi matrix is not 1/in_dim");
  return duality_decompose(c.c, c.in_dim, c.out_dim, tol).channel;
}

// ------------------------------------------------------------------ duality

DualityPair duality_decompose(const ComplexMatrix& rho, Index dim_a, Index dim_b,
                              const Tolerances& tol) {
  require_square(rho, dim_a * dim_b, "bipartite state");
  const State checked(Algebra({{FactorKind::quantum, dim_a}, {FactorKind::quantum, dim_b}}), rho, tol);
  const std::vector<Index> dims{dim_a, dim_b};
  const std::vector<Index> keep{0};
  const ComplexMatrix rho_a = partial_trace(checked.rho(), dims, keep);
  const HermitianEigen e = eigh(rho_a);

  std::vector<Index> support;
  for (Index k = dim_a; k-- > 0;)
    if (e.values(k) > tol.rank) support.push_back(k);
  const Index r = static_cast<Index>(support.size());

  // Psi = (S ⊗ 1) Γ_r and J = (M^* ⊗ 1) rho (M ⊗ 1) with S M^* the support
  // projection, so that (id ⊗ T_*)(|Psi><Psi|) = rho.
  ComplexMatrix s(dim_a, r);
  ComplexMatrix m(dim_a, r);
  if (r == dim_a) {
    s = psd_sqrt(rho_a);
    m = hermitian_function(rho_a, [](double x) { return 1.0 / std::sqrt(x); });
  } else {
    for (Index q = 0; q < r; ++q) {
      const Index k = support[static_cast<std::size_t>(q)];
      s.col(q) = std::sqrt(e.values(k)) * e.vectors.col(k);
      m.col(q) = e.vectors.col(k) / std::sqrt(e.values(k));
    }
  }

  ComplexVector psi = ComplexVector::Zero(dim_a * r);
  for (Index q = 0; q < r; ++q) psi += kron(s.col(q), basis_vector(r, q));
  const ComplexMatrix lift = kron(m, qichan::identity(dim_b));
  const ComplexMatrix j = hermitian_part(lift.adjoint() * checked.rho() * lift);

  std::vector<ComplexMatrix> kraus = minimal_kraus(j, r, dim_b, tol);
  // Trace preservation holds exactly in exact arithmetic; allow a looser
  // check here since the inverse square root amplifies round-off.
  Tolerances loose = tol;
  loose.alg = std::max(tol.alg, 1e-7);
  return {psi, dim_a, Channel(r, dim_b, std::move(kraus), loose)};
}

ComplexMatrix duality_compose(const ComplexVector& psi, Index dim_a, const Channel& t) {
  if (psi.size() != dim_a * t.in_dim()) throw DimensionError("vector length != dimA * channel input");
  const Index n = dim_a * t.out_dim();
  ComplexMatrix rho = ComplexMatrix::Zero(n, n);
  const ComplexMatrix one = qichan::identity(dim_a);
  for (const auto& k : t.kraus()) {
    const ComplexVector v = kron(one, k) * psi;
    rho.noalias() += v * v.adjoint();
  }
  return rho;
}

// -------------------------------------------------------------- Stinespring

StinespringIsometry stinespring_from_kraus(const std::vector<ComplexMatrix>& kraus, Index in_dim,
                                           Index out_dim) {
  const Index ell = static_cast<Index>(kraus.size());
  ComplexMatrix v = ComplexMatrix::Zero(out_dim * ell, in_dim);
  for (Index x = 0; x < ell; ++x) {
    const ComplexMatrix& k = kraus[static_cast<std::size_t>(x)];
    for (Index o = 0; o < out_dim; ++o) v.row(o * ell + x) = k.row(o);
  }
  return {v, in_dim, out_dim, ell, false};
}

StinespringIsometry kraus_to_stinespring(const Channel& t, const Tolerances& tol) {
  // A linearly independent Kraus list is already minimal; keep it so that
  // e.g. a unitary channel dilates to V = U exactly.
  const bool independent = kraus_rank(t.kraus(), tol) == static_cast<Index>(t.kraus().size());
  const std::vector<ComplexMatrix> kraus =
      independent ? t.kraus()
                  : minimal_kraus(choi_of(t).c * static_cast<double>(t.in_dim()), t.in_dim(),
                                  t.out_dim(), tol);
  StinespringIsometry v = stinespring_from_kraus(kraus, t.in_dim(), t.out_dim());
  v.minimal = true;
  return v;
}

Channel stinespring_to_kraus(const StinespringIsometry& v, const std::vector<ComplexVector>& chis,
                             const Tolerances& tol) {
  const Index ell = v.dilation_dim;
  ComplexMatrix completeness = ComplexMatrix::Zero(ell, ell);
  for (const auto& chi : chis) {
    if (chi.size() != ell) throw DimensionError("Kraus vector has the wrong dimension");
    completeness += chi * chi.adjoint();
  }
  if ((completeness - qichan::identity(ell)).cwiseAbs().maxCoeff() > tol.alg)
    throw InvariantError("Kraus vectors do not resolve the identity");
  std::vector<ComplexMatrix> kraus;
  kraus.reserve(chis.size());
  for (const auto& chi : chis) {
    ComplexMatrix k = ComplexMatrix::Zero(v.out_dim, v.in_dim);
    for (Index o = 0; o < v.out_dim; ++o)
      for (Index e = 0; e < ell; ++e) k.row(o) += std::conj(chi(e)) * v.v.row(o * ell + e);
    kraus.push_back(std::move(k));
  }
  return Channel(v.in_dim, v.out_dim, std::move(kraus), tol);
}

ComplexMatrix apply_stinespring(const StinespringIsometry& v, const ComplexMatrix& x) {
  require_square(x, v.out_dim, "Stinespring argument");
  return v.v.adjoint() * kron(x, qichan::identity(v.dilation_dim)) * v.v;
}

ComplexMatrix dilation_unitary(const StinespringIsometry& v1, const StinespringIsometry& v2,
                               const Tolerances& tol) {
  if (v1.dilation_dim != v2.dilation_dim || v1.in_dim != v2.in_dim || v1.out_dim != v2.out_dim)
    throw DimensionError("dilations have different shapes");
  const Index ell = v1.dilation_dim;
  // V(o·ell + e, i) = A[e, (o, i)], and (1 ⊗ W)V1 = V2 reads A2 = W A1
  auto fiber = [&](const StinespringIsometry& v) {
    ComplexMatrix a(ell, v.out_dim * v.in_dim);
    for (Index e = 0; e < ell; ++e)
      for (Index o = 0; o < v.out_dim; ++o)
        for (Index i = 0; i < v.in_dim; ++i) a(e, o * v.in_dim + i) = v.v(o * ell + e, i);
    return a;
  };
  const ComplexMatrix a1 = fiber(v1);
  const ComplexMatrix a2 = fiber(v2);
  const ComplexMatrix w = a2 * a1.completeOrthogonalDecomposition().pseudoInverse();
  if (!is_unitary(w, 1e-7) || (w * a1 - a2).cwiseAbs().maxCoeff() > std::max(tol.alg, 1e-7))
    throw NumericalError("dilations are not related by a unitary (not minimal or different channels)");
  return w;
}

// ------------------------------------------------------------ ancilla form

AncillaForm ancilla_form(const Channel& t, std::uint64_t completion_seed, const Tolerances& tol) {
  const StinespringIsometry v = kraus_to_stinespring(t, tol);
  const Index m = t.in_dim();
  const Index nl = t.out_dim() * v.dilation_dim;
  const Index total = std::lcm(m, nl);
  const Index a = total / m;
  const Index b = total / nl;

  // isometry psi -> (V psi) ⊗ f_0 written in the output ordering
  ComplexMatrix w = ComplexMatrix::Zero(total, m);
  for (Index r = 0; r < nl; ++r) w.row(r * b) = v.v.row(r);

  ComplexMatrix seeds;
  if (completion_seed == 0) {
    seeds = qichan::identity(total);
  } else {
    Rng rng = make_rng(completion_seed, 0);
    seeds = random_unitary(total, rng);
  }
  const ComplexMatrix full = complete_to_unitary(w, seeds, std::max(tol.alg, 1e-9));

  // input column i ⊗ e_0 sits at index i·a; extra columns fill the rest
  ComplexMatrix u(total, total);
  Index extra = m;
  for (Index i = 0; i < m; ++i)
    for (Index s = 0; s < a; ++s)
      u.col(i * a + s) = s == 0 ? full.col(i) : full.col(extra++);

  AncillaForm out;
  out.unitary = std::move(u);
  out.ancilla = basis_vector(a, 0);
  out.in_dim = m;
  out.ancilla_dim = a;
  out.out_dim = t.out_dim();
  out.discard_dim = v.dilation_dim * b;
  return out;
}

ComplexMatrix apply_ancilla_form(const AncillaForm& a, const ComplexMatrix& rho) {
  require_square(rho, a.in_dim, "ancilla-form input");
  const ComplexMatrix big = a.unitary * kron(rho, projector(a.ancilla)) * a.unitary.adjoint();
  const std::vector<Index> dims{a.out_dim, a.discard_dim};
  const std::vector<Index> keep{0};
  return partial_trace(big, dims, keep);
}

// ------------------------------------------------------- POVM, instruments

Povm::Povm(std::vector<ComplexMatrix> effects, const Tolerances& tol) : effects_(std::move(effects)) {
  if (effects_.empty()) throw InvariantError("a POVM needs at least one effect");
  const Index d = effects_.front().rows();
  ComplexMatrix sum = ComplexMatrix::Zero(d, d);
  for (auto& f : effects_) {
    require_square(f, d, "POVM effect");
    if (!is_hermitian(f, tol.alg) || min_eigenvalue(f) < -tol.alg)
      throw InvariantError("POVM effect is not positive");
    f = hermitian_part(f);
    sum += f;
  }
  if ((sum - qichan::identity(d)).cwiseAbs().maxCoeff() > tol.alg)
    throw InvariantError("POVM effects do not sum to the identity");
}

Instrument::Instrument(Index in_dim, Index out_dim, std::vector<std::string> outcomes,
                       std::vector<std::vector<ComplexMatrix>> kraus, const Tolerances& tol)
    : in_dim_(in_dim), out_dim_(out_dim), outcomes_(std::move(outcomes)), kraus_(std::move(kraus)) {
  if (kraus_.empty()) throw InvariantError("an instrument needs at least one outcome");
  if (outcomes_.empty())
    for (std::size_t x = 0; x < kraus_.size(); ++x) outcomes_.push_back(std::to_string(x));
  if (outcomes_.size() != kraus_.size()) throw DimensionError("outcome labels do not match the maps");
  ComplexMatrix sum = ComplexMatrix::Zero(in_dim_, in_dim_);
  for (const auto& list : kraus_)
    for (const auto& k : list) {
      if (k.rows() != out_dim_ || k.cols() != in_dim_)
        throw DimensionError("instrument Kraus operator must be out_dim x in_dim");
      sum += k.adjoint() * k;
    }
  if ((sum - qichan::identity(in_dim_)).cwiseAbs().maxCoeff() > tol.alg)
    throw InvariantError("instrument violates sum_x T_x(1) = 1");
}

Instrument Instrument::von_neumann(const std::vector<ComplexMatrix>& projections,
                                   const Tolerances& tol) {
  if (projections.empty()) throw InvariantError("no projections given");
  const Index d = projections.front().rows();
  std::vector<std::vector<ComplexMatrix>> kraus;
  for (const auto& p : projections) {
    require_square(p, d, "projection");
    if (!is_hermitian(p, tol.alg) || (p * p - p).cwiseAbs().maxCoeff() > tol.alg)
      throw InvariantError("not an orthogonal projection");
    kraus.push_back({p});
  }
  return Instrument(d, d, {}, std::move(kraus), tol);
}

ComplexMatrix Instrument::apply_heisenberg(std::size_t x, const ComplexMatrix& b) const {
  require_square(b, out_dim_, "Heisenberg argument");
  ComplexMatrix out = ComplexMatrix::Zero(in_dim_, in_dim_);
  for (const auto& k : kraus_.at(x)) out.noalias() += k.adjoint() * b * k;
  return out;
}

ComplexMatrix Instrument::apply_schrodinger(std::size_t x, const ComplexMatrix& rho) const {
  require_square(rho, in_dim_, "Schrodinger argument");
  ComplexMatrix out = ComplexMatrix::Zero(out_dim_, out_dim_);
  for (const auto& k : kraus_.at(x)) out.noalias() += k * rho * k.adjoint();
  return out;
}

Channel Instrument::marginal_channel(const Tolerances& tol) const {
  std::vector<ComplexMatrix> all;
  for (const auto& list : kraus_) all.insert(all.end(), list.begin(), list.end());
  return Channel(in_dim_, out_dim_, std::move(all), tol);
}

Povm Instrument::marginal_povm(const Tolerances& tol) const {
  std::vector<ComplexMatrix> effects;
  for (std::size_t x = 0; x < kraus_.size(); ++x)
    effects.push_back(apply_heisenberg(x, qichan::identity(out_dim_)));
  return Povm(std::move(effects), tol);
}

double HybridState::total_weight() const {
  double s = 0.0;
  for (const auto& b : branches) s += b.weight;
  return s;
}

HybridState apply_instrument(const Instrument& inst, const ComplexMatrix& rho, const Tolerances& tol) {
  const State checked(Algebra::quantum(inst.in_dim()), rho, tol);
  HybridState out;
  for (std::size_t x = 0; x < inst.size(); ++x) {
    const ComplexMatrix sigma = inst.apply_schrodinger(x, checked.rho());
    HybridState::Branch b;
    b.weight = std::max(0.0, sigma.trace().real());
    if (b.weight > tol.rank) b.state = hermitian_part(sigma / b.weight);
    out.branches.push_back(std::move(b));
  }
  return out;
}

std::vector<ComplexMatrix> radon_nikodym(const Instrument& inst, const Tolerances& tol) {
  return radon_nikodym(inst, kraus_to_stinespring(inst.marginal_channel(tol), tol), tol);
}

std::vector<ComplexMatrix> radon_nikodym(const Instrument& inst, const StinespringIsometry& v,
                                         const Tolerances& tol) {
  if (v.in_dim != inst.in_dim() || v.out_dim != inst.out_dim())
    throw DimensionError("dilation does not match the instrument");
  const Index ell = v.dilation_dim;
  const Index n = inst.in_dim() * inst.out_dim();

  // columns: the Kraus operators L_a of the dilation, vectorized
  ComplexMatrix basis(n, ell);
  for (Index a = 0; a < ell; ++a) {
    ComplexMatrix l(inst.out_dim(), inst.in_dim());
    for (Index o = 0; o < inst.out_dim(); ++o) l.row(o) = v.v.row(o * ell + a);
    basis.col(a) = vectorize(l);
  }
  const auto solver = basis.completeOrthogonalDecomposition();
  if (solver.rank() < ell)
    throw NumericalError("dilation of the marginal channel is rank deficient");

  const double fit_tol = std::max(tol.alg, 1e-8);
  std::vector<ComplexMatrix> effects;
  ComplexMatrix sum = ComplexMatrix::Zero(ell, ell);
  for (std::size_t x = 0; x < inst.size(); ++x) {
    const auto& list = inst.kraus()[x];
    ComplexMatrix c(static_cast<Index>(list.size()), ell);
    for (std::size_t j = 0; j < list.size(); ++j) {
      const ComplexVector k = vectorize(list[j]);
      const ComplexVector coeff = solver.solve(k);
      if ((basis * coeff - k).norm() > fit_tol * std::max(1.0, k.norm()))
        throw NumericalError("outcome " + inst.outcomes()[x] +
                             " does not factor through the dilation of the marginal channel");
      c.row(static_cast<Index>(j)) = coeff.transpose();
    }
    ComplexMatrix f = hermitian_part(c.adjoint() * c);
    sum += f;
    effects.push_back(std::move(f));
  }
  if ((sum - qichan::identity(ell)).cwiseAbs().maxCoeff() > fit_tol)
    throw NumericalError("Radon-Nikodym densities do not sum to the identity");
  return effects;
}

Channel measure_prepare_channel(const Povm& povm, const std::vector<ComplexMatrix>& prep,
                                const Tolerances& tol) {
  if (prep.size() != povm.size()) throw DimensionError("need one prepared state per POVM outcome");
  const Index in = povm.dim();
  const Index out = prep.front().rows();
  std::vector<ComplexMatrix> kraus;
  for (std::size_t x = 0; x < prep.size(); ++x) {
    const State rho(Algebra::quantum(out), prep[x], tol);
    const HermitianEigen f = eigh(povm.effects()[x]);
    const HermitianEigen q = eigh(rho.rho());
    for (Index j = 0; j < in; ++j) {
      if (f.values(j) <= tol.rank) continue;
      for (Index k = 0; k < out; ++k) {
        if (q.values(k) <= tol.rank) continue;
        kraus.push_back(std::sqrt(f.values(j) * q.values(k)) *
                        outer(q.vectors.col(k), f.vectors.col(j)));
      }
    }
  }
  // dropped tiny eigenvalues can cost up to d·tau_rank in unitality
  Tolerances loose = tol;
  loose.alg = std::max(tol.alg, 1e-8);
  Channel c(in, out, std::move(kraus), loose);
  c.mark_separable();
  return c;
}

double action_distance(const LinearMap& a, const LinearMap& b) {
  if (a.in_dim() != b.in_dim() || a.out_dim() != b.out_dim())
    throw DimensionError("maps have different shapes");
  double worst = 0.0;
  for (Index i = 0; i < a.out_dim(); ++i)
    for (Index j = 0; j < a.out_dim(); ++j) {
      const ComplexMatrix e = matrix_unit(a.out_dim(), i, j);
      worst = std::max(worst, (a.apply(e) - b.apply(e)).cwiseAbs().maxCoeff());
    }
  return worst;
}

double action_distance(const Channel& a, const Channel& b) {
  return action_distance(LinearMap::from_channel(a), LinearMap::from_channel(b));
}

}  // namespace qichan
