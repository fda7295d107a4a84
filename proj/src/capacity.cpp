#include "qichan/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qichan/random.hpp"

namespace qichan {

namespace {

constexpr double kLn2 = 0.69314718055994530942;
// eigenvalue floor for matrix logarithms inside gradients
constexpr double kLogFloor = 1e-13;

ComplexMatrix log_clamped(const ComplexMatrix& rho) {
  return hermitian_function(rho, [](double x) { return std::log(std::max(x, kLogFloor)); });
}

double entropy_nats(const ComplexMatrix& rho, double cutoff) {
  const RealVector ev = eigh(rho).values;
  double s = 0.0;
  for (Index k = 0; k < ev.size(); ++k)
    if (ev(k) > cutoff) s -= ev(k) * std::log(ev(k));
  return s;
}

ComplexMatrix heisenberg_on_b(const Channel& t, Index dim_a, const ComplexMatrix& x) {
  // (id ⊗ T)(X) = sum (1 ⊗ K^*) X (1 ⊗ K)
  const ComplexMatrix one = identity(dim_a);
  ComplexMatrix out = ComplexMatrix::Zero(dim_a * t.in_dim(), dim_a * t.in_dim());
  for (const auto& k : t.kraus()) {
    const ComplexMatrix lk = kron(one, k);
    out.noalias() += lk.adjoint() * x * lk;
  }
  return out;
}

// Column-major superoperator of a linear map: vec(T(B)) = M vec(B).
class SuperOp {
 public:
  explicit SuperOp(const LinearMap& t) : in_(t.in_dim()), out_(t.out_dim()) {
    m_ = ComplexMatrix::Zero(in_ * in_, out_ * out_);
    for (const auto& term : t.terms()) m_ += kron(term.right.transpose(), term.left);
  }

  Index in_dim() const { return in_; }
  Index out_dim() const { return out_; }

  ComplexMatrix apply(const ComplexMatrix& b) const {
    const ComplexVector v = m_ * Eigen::Map<const ComplexVector>(b.data(), b.size());
    return Eigen::Map<const ComplexMatrix>(v.data(), in_, in_);
  }

  // tr(T_*(X) B) = tr(X T(B))
  ComplexMatrix predual(const ComplexMatrix& x) const {
    const ComplexMatrix xt = x.transpose();
    const ComplexVector v = m_.transpose() * Eigen::Map<const ComplexVector>(xt.data(), xt.size());
    return Eigen::Map<const ComplexMatrix>(v.data(), out_, out_).transpose();
  }

 private:
  Index in_;
  Index out_;
  ComplexMatrix m_;
};

struct SeesawResult {
  double value = 0.0;
  ComplexMatrix u;
  bool converged = false;
};

// Alternating maximization of Re <phi, T(U) psi> over unitaries U and unit
// vectors; each half-step is solved exactly, so the value never decreases.
SeesawResult seesaw(const SuperOp& op, ComplexMatrix u, const OptimizerConfig& opt) {
  SeesawResult r;
  r.value = -1.0;
  for (int it = 0; it < opt.max_iter; ++it) {
    const ComplexMatrix b = op.apply(u);
    Eigen::JacobiSVD<ComplexMatrix> svd(b, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const double value = svd.singularValues()(0);
    const bool stalled = value - r.value <= opt.tol * std::max(1.0, value);
    if (value > r.value) {
      r.value = value;
      r.u = u;
    }
    if (stalled) {
      r.converged = true;
      break;
    }
    // <w, T(U) v> = Re tr(T(U) v w^*) = Re tr(U T_*(v w^*))
    const ComplexMatrix x = svd.matrixV().col(0) * svd.matrixU().col(0).adjoint();
    u = maximizing_unitary(op.predual(x));
  }
  return r;
}

NormEstimate maximize_norm(const LinearMap& map, const OptimizerConfig& opt,
                           const std::vector<ComplexMatrix>& extra_starts) {
  const SuperOp op(map);
  const Index n_in = op.in_dim();
  const Index n_out = op.out_dim();

  std::vector<ComplexMatrix> starts = extra_starts;
  starts.push_back(identity(n_out));
  for (Index k = 0; k < n_in; ++k)
    starts.push_back(maximizing_unitary(op.predual(matrix_unit(n_in, k, k))));

  NormEstimate best;
  best.value = -1.0;
  bool all_converged = true;
  auto consider = [&](const ComplexMatrix& u0) {
    const SeesawResult r = seesaw(op, u0, opt);
    all_converged = all_converged && r.converged;
    if (r.value > best.value) {
      best.value = r.value;
      best.certificate = r.u;
    }
  };
  for (const auto& u0 : starts) consider(u0);
  for (int r = 0; r < opt.restarts; ++r) {
    Rng rng = make_rng(opt.seed, static_cast<std::uint64_t>(r));
    consider(random_unitary(n_out, rng));
  }
  best.converged = all_converged;
  return best;
}

}  // namespace

// -------------------------------------------------------------- entropies

double von_neumann_entropy(const ComplexMatrix& rho, const Tolerances& tol) {
  return std::max(0.0, entropy_nats(rho, tol.rank) / kLn2);
}

double von_neumann_entropy(const State& s, const Tolerances& tol) {
  return von_neumann_entropy(s.rho(), tol);
}

double relative_entropy(const ComplexMatrix& rho, const ComplexMatrix& sigma, const Tolerances& tol) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols())
    throw DimensionError("relative entropy of states with different dimensions");
  const HermitianEigen es = eigh(sigma);
  const HermitianEigen er = eigh(rho);
  // support test: weight of rho on the kernel of sigma
  double kernel_weight = 0.0;
  RealVector log_sigma(es.values.size());
  for (Index k = 0; k < es.values.size(); ++k) {
    if (es.values(k) > tol.rank) {
      log_sigma(k) = std::log(es.values(k));
    } else {
      log_sigma(k) = 0.0;
      kernel_weight += (es.vectors.col(k).adjoint() * rho * es.vectors.col(k))(0, 0).real();
    }
  }
  if (kernel_weight > tol.rank) return std::numeric_limits<double>::infinity();
  double rho_log_rho = 0.0;
  for (Index k = 0; k < er.values.size(); ++k)
    if (er.values(k) > tol.rank) rho_log_rho += er.values(k) * std::log(er.values(k));
  const ComplexMatrix ls = es.vectors * log_sigma.asDiagonal() * es.vectors.adjoint();
  const double rho_log_sigma = (rho * ls).trace().real();
  return std::max(0.0, (rho_log_rho - rho_log_sigma) / kLn2);
}

double relative_entropy(const State& rho, const State& sigma, const Tolerances& tol) {
  return relative_entropy(rho.rho(), sigma.rho(), tol);
}

double coherent_info_ES(const ComplexMatrix& rho, Index dim_a, Index dim_b, const Tolerances& tol) {
  if (rho.rows() != dim_a * dim_b) throw DimensionError("state size != dimA * dimB");
  const std::vector<Index> dims{dim_a, dim_b};
  const std::vector<Index> keep{1};
  return von_neumann_entropy(partial_trace(rho, dims, keep), tol) - von_neumann_entropy(rho, tol);
}

double coherent_info_ES(const State& rho, const Tolerances& tol) {
  const auto dims = rho.algebra().dims();
  if (dims.size() != 2 || !rho.algebra().is_purely_quantum())
    throw InvariantError("coherent information needs a bipartite quantum state");
  return coherent_info_ES(rho.rho(), dims[0], dims[1], tol);
}

// ------------------------------------------------------------------ Holevo

void EnsembleState::validate(const Tolerances& tol) const {
  if (weights.size() != states.size() || weights.empty())
    throw InvariantError("ensemble needs one weight per state");
  double sum = 0.0;
  for (double p : weights) {
    if (p < -tol.alg) throw InvariantError("negative ensemble weight");
    sum += p;
  }
  if (std::abs(sum - 1.0) > tol.alg) throw InvariantError("ensemble weights do not sum to 1");
}

double holevo_chi(const EnsembleState& ens, const Channel& t, const Tolerances& tol) {
  ens.validate(tol);
  ComplexMatrix mean = ComplexMatrix::Zero(t.out_dim(), t.out_dim());
  double mixed = 0.0;
  for (std::size_t i = 0; i < ens.states.size(); ++i) {
    const ComplexMatrix out = apply_schrodinger(t, ens.states[i]);
    mean += ens.weights[i] * out;
    mixed += ens.weights[i] * von_neumann_entropy(out, tol);
  }
  return std::max(0.0, von_neumann_entropy(mean, tol) - mixed);
}

namespace {

struct HolevoRun {
  double value = 0.0;
  std::vector<double> p;
  std::vector<ComplexVector> psi;
  bool converged = false;
};

HolevoRun holevo_ascent(const Channel& t, std::vector<ComplexVector> psi, const OptimizerConfig& opt,
                        const Tolerances& tol) {
  const std::size_t n = psi.size();
  const Index dout = t.out_dim();
  std::vector<double> p(n, 1.0 / static_cast<double>(n));
  std::vector<ComplexMatrix> sigma(n);
  std::vector<double> entropy(n);
  for (std::size_t i = 0; i < n; ++i) {
    sigma[i] = apply_schrodinger(t, projector(psi[i]));
    entropy[i] = entropy_nats(sigma[i], tol.rank);
  }
  auto mean_of = [&]() {
    ComplexMatrix m = ComplexMatrix::Zero(dout, dout);
    for (std::size_t i = 0; i < n; ++i) m += p[i] * sigma[i];
    return m;
  };
  auto chi_nats = [&]() {
    double mixed = 0.0;
    for (std::size_t i = 0; i < n; ++i) mixed += p[i] * entropy[i];
    return entropy_nats(mean_of(), tol.rank) - mixed;
  };

  std::vector<double> steps(n, 1.0);
  HolevoRun run;
  double value = chi_nats();
  for (int it = 0; it < opt.max_iter; ++it) {
    const double before = value;

    // Blahut-Arimoto reweighting for fixed output states
    for (int inner = 0; inner < 5; ++inner) {
      const ComplexMatrix mean = mean_of();
      const ComplexMatrix log_mean = log_clamped(mean);
      double z = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        // D(sigma_i || mean) = -S(sigma_i) - tr(sigma_i log mean)
        const double d = -entropy[i] - (sigma[i] * log_mean).trace().real();
        p[i] *= std::exp(std::min(d, 50.0));
        z += p[i];
      }
      for (double& q : p) q /= z;
    }

    // ascent on each signal state with the others held fixed
    for (std::size_t i = 0; i < n; ++i) {
      if (p[i] < 1e-14) continue;
      const ComplexMatrix rest = mean_of() - p[i] * sigma[i];
      double rest_mixed = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) rest_mixed += p[j] * entropy[j];
      const double pi = p[i];
      auto f = [&](const ComplexVector& v) {
        const ComplexMatrix s = apply_schrodinger(t, projector(v));
        return entropy_nats(rest + pi * s, tol.rank) - rest_mixed - pi * entropy_nats(s, tol.rank);
      };
      const ComplexMatrix h =
          apply_heisenberg(t, log_clamped(sigma[i]) - log_clamped(rest + pi * sigma[i]));
      const ComplexVector grad = pi * (h * psi[i]);
      const SphereStep s = armijo_sphere_step(f, psi[i], f(psi[i]), grad, steps[i]);
      if (s.step > 0) {
        psi[i] = s.x;
        sigma[i] = apply_schrodinger(t, projector(psi[i]));
        entropy[i] = entropy_nats(sigma[i], tol.rank);
        steps[i] = std::min(4.0 * s.step, 1e3);
      }
    }

    value = chi_nats();
    if (value - before <= opt.tol * std::max(1.0, std::abs(value))) {
      run.converged = true;
      break;
    }
  }
  run.value = std::max(0.0, value / kLn2);
  run.p = std::move(p);
  run.psi = std::move(psi);
  return run;
}

}  // namespace

HolevoResult one_shot_classical_capacity(const Channel& t, const OptimizerConfig& opt,
                                         const Tolerances& tol) {
  const Index d = t.in_dim();
  const std::size_t n = static_cast<std::size_t>(d * d);
  HolevoResult best;
  best.value = -1.0;
  const int restarts = std::max(1, opt.restarts);
  bool all_converged = true;
  for (int r = 0; r < restarts; ++r) {
    Rng rng = make_rng(opt.seed, static_cast<std::uint64_t>(r));
    std::vector<ComplexVector> psi;
    // the first run starts from the standard basis, padded with random states
    if (r == 0)
      for (Index k = 0; k < d; ++k) psi.push_back(basis_vector(d, k));
    while (psi.size() < n) psi.push_back(random_unit_vector(d, rng));
    const HolevoRun run = holevo_ascent(t, std::move(psi), opt, tol);
    all_converged = all_converged && run.converged;
    if (run.value > best.value) {
      best.value = run.value;
      best.ensemble.weights = run.p;
      best.ensemble.states.clear();
      for (const auto& v : run.psi) best.ensemble.states.push_back(projector(v));
    }
  }
  best.restarts = restarts;
  best.converged = all_converged;
  return best;
}

Cs1Result cs1(const Channel& t, const OptimizerConfig& opt, const Tolerances& tol) {
  const Index d = t.in_dim();
  const Index dout = t.out_dim();
  const std::vector<Index> dims{d, dout};
  const std::vector<Index> keep_b{1};

  auto f = [&](const ComplexVector& psi) {
    const ComplexMatrix rho = duality_compose(psi, d, t);
    return (entropy_nats(partial_trace(rho, dims, keep_b), tol.rank) - entropy_nats(rho, tol.rank)) / kLn2;
  };
  auto grad = [&](const ComplexVector& psi) {
    const ComplexMatrix rho = duality_compose(psi, d, t);
    const ComplexMatrix rho_b = partial_trace(rho, dims, keep_b);
    const ComplexMatrix h = heisenberg_on_b(t, d, log_clamped(rho)) -
                            kron(identity(d), apply_heisenberg(t, log_clamped(rho_b)));
    return ComplexVector(h * psi / kLn2);
  };

  Cs1Result best;
  best.value = -std::numeric_limits<double>::infinity();
  bool all_converged = true;
  const int restarts = std::max(1, opt.restarts);
  for (int r = 0; r < restarts; ++r) {
    ComplexVector x0;
    if (r == 0) {
      x0 = ComplexVector::Zero(d * d);
      for (Index k = 0; k < d; ++k) x0(k * d + k) = 1.0;
    } else {
      Rng rng = make_rng(opt.seed, static_cast<std::uint64_t>(r));
      x0 = random_unit_vector(d * d, rng);
    }
    const AscentResult a = sphere_ascent(f, grad, x0, opt);
    all_converged = all_converged && a.converged;
    if (a.value > best.value) {
      best.value = a.value;
      best.input = a.x;
    }
  }
  best.converged = all_converged;
  return best;
}

// ------------------------------------------------------------------- norms

NormEstimate operator_norm(const LinearMap& t, const OptimizerConfig& opt) {
  NormEstimate e = maximize_norm(t, opt, {});
  e.kind = NormKind::operator_norm;
  e.stabilizer_dim = 1;
  return e;
}

NormEstimate cb_norm(const LinearMap& t, const OptimizerConfig& opt) {
  const Index n = t.in_dim();
  // lifting the operator-norm maximizer keeps cb >= op for the estimates too
  const NormEstimate op = operator_norm(t, opt);
  NormEstimate e = maximize_norm(t.tensor_identity(n), opt, {kron(op.certificate, identity(n))});
  e.kind = NormKind::cb_norm;
  e.stabilizer_dim = n;
  e.converged = e.converged && op.converged;
  return e;
}

NormEstimate coded_deviation(const Channel& s, const Channel& t, const Channel& e,
                             const Channel& dcd, const OptimizerConfig& opt) {
  if (e.in_dim() != s.in_dim() || dcd.out_dim() != s.out_dim())
    throw DimensionError("coding does not match the ideal channel's dimensions");
  const Channel coded = then(then(e, t), dcd);
  return cb_norm(LinearMap::from_channel(s) - LinearMap::from_channel(coded), opt);
}

// -------------------------------------------------------------- fidelities

namespace {

void require_endomorphism(const Channel& t) {
  if (t.in_dim() != t.out_dim()) throw DimensionError("fidelity needs equal input and output dimensions");
}

std::vector<cplx> diagonal_amplitudes(const Channel& t, const ComplexVector& v) {
  std::vector<cplx> a;
  a.reserve(t.kraus().size());
  for (const auto& k : t.kraus()) a.push_back(v.dot(k * v));
  return a;
}

}  // namespace

FidelityResult fidelity_worst(const Channel& t, const OptimizerConfig& opt) {
  require_endomorphism(t);
  const Index d = t.in_dim();
  // maximize -sum |<psi, K psi>|^2
  auto f = [&](const ComplexVector& v) {
    double s = 0.0;
    for (const cplx& a : diagonal_amplitudes(t, v)) s += std::norm(a);
    return -s;
  };
  auto grad = [&](const ComplexVector& v) {
    ComplexVector g = ComplexVector::Zero(d);
    const auto a = diagonal_amplitudes(t, v);
    for (std::size_t x = 0; x < a.size(); ++x) {
      const ComplexMatrix& k = t.kraus()[x];
      g -= std::conj(a[x]) * (k * v) + a[x] * (k.adjoint() * v);
    }
    return g;
  };

  FidelityResult best;
  best.value = std::numeric_limits<double>::infinity();
  bool all_converged = true;
  auto consider = [&](const ComplexVector& x0) {
    const AscentResult a = sphere_ascent(f, grad, x0, opt);
    all_converged = all_converged && a.converged;
    if (-a.value < best.value) {
      best.value = -a.value;
      best.psi = a.x;
    }
  };
  for (Index k = 0; k < d; ++k) consider(basis_vector(d, k));
  for (int r = 0; r < opt.restarts; ++r) {
    Rng rng = make_rng(opt.seed, static_cast<std::uint64_t>(r));
    consider(random_unit_vector(d, rng));
  }
  best.value = std::clamp(best.value, 0.0, 1.0);
  best.phi = best.psi;
  best.converged = all_converged;
  return best;
}

FidelityResult fidelity_offdiag(const Channel& t, const OptimizerConfig& opt,
                                OffdiagConvention convention) {
  require_endomorphism(t);
  const Index d = t.in_dim();
  const bool minimize = convention == OffdiagConvention::inf;
  const double sign = minimize ? 1.0 : -1.0;

  auto extremal = [&](const ComplexMatrix& h) -> ComplexVector {
    const HermitianEigen e = eigh(h);
    return minimize ? ComplexVector(e.vectors.col(0)) : ComplexVector(e.vectors.col(d - 1));
  };
  auto value_of = [&](const ComplexVector& phi, const ComplexVector& psi) {
    const auto a = diagonal_amplitudes(t, phi);
    const auto b = diagonal_amplitudes(t, psi);
    double s = 0.0;
    for (std::size_t x = 0; x < a.size(); ++x) s += (std::conj(a[x]) * b[x]).real();
    return s;
  };

  FidelityResult best;
  best.value = sign * std::numeric_limits<double>::infinity();
  bool all_converged = true;
  auto consider = [&](ComplexVector phi, ComplexVector psi) {
    double value = value_of(phi, psi);
    bool converged = false;
    for (int it = 0; it < opt.max_iter; ++it) {
      // Re sum conj(a_x) <psi, K_x psi> is a quadratic form in psi, and
      // Re sum b_x <phi, K_x^* phi> one in phi
      const auto a = diagonal_amplitudes(t, phi);
      ComplexMatrix h = ComplexMatrix::Zero(d, d);
      for (std::size_t x = 0; x < a.size(); ++x) h += std::conj(a[x]) * t.kraus()[x];
      psi = extremal(hermitian_part(h));
      const auto b = diagonal_amplitudes(t, psi);
      ComplexMatrix g = ComplexMatrix::Zero(d, d);
      for (std::size_t x = 0; x < b.size(); ++x) g += b[x] * t.kraus()[x].adjoint();
      phi = extremal(hermitian_part(g));
      const double next = value_of(phi, psi);
      const double gain = sign * (value - next);
      value = minimize ? std::min(value, next) : std::max(value, next);
      if (gain <= opt.tol * std::max(1.0, std::abs(value))) {
        converged = true;
        break;
      }
    }
    all_converged = all_converged && converged;
    if (sign * value < sign * best.value) {
      best.value = value;
      best.phi = phi;
      best.psi = psi;
    }
  };

  if (minimize) {
    // the diagonal pair of the worst fidelity guarantees F_% <= F
    const FidelityResult w = fidelity_worst(t, opt);
    consider(w.psi, w.psi);
  }
  for (Index k = 0; k < d; ++k) consider(basis_vector(d, k), basis_vector(d, k));
  for (int r = 0; r < opt.restarts; ++r) {
    Rng rng = make_rng(opt.seed, static_cast<std::uint64_t>(r));
    const ComplexVector phi = random_unit_vector(d, rng);
    consider(phi, random_unit_vector(d, rng));
  }
  best.converged = all_converged;
  return best;
}

EstimateChainReport estimate_chain_check(const Channel& t, const OptimizerConfig& opt, double slack) {
  require_endomorphism(t);
  const LinearMap dev = LinearMap::from_channel(t) - LinearMap::identity(t.in_dim());
  EstimateChainReport r;
  r.slack = slack;
  r.deviation_norm = operator_norm(dev, opt).value;
  r.deviation_cb = cb_norm(dev, opt).value;
  r.fidelity = fidelity_worst(t, opt).value;
  r.fidelity_offdiag = fidelity_offdiag(t, opt, OffdiagConvention::inf).value;
  r.bound_offdiag = 4.0 * std::sqrt(std::max(0.0, 1.0 - r.fidelity_offdiag));
  r.bound_fidelity = 4.0 * std::sqrt(std::max(0.0, 1.0 - r.fidelity));
  r.bound_norm = 4.0 * std::sqrt(std::max(0.0, r.deviation_norm));

  auto check = [&](double lhs, double rhs, const char* what) {
    if (lhs > rhs + slack) r.violations.emplace_back(what);
  };
  check(r.deviation_norm, r.deviation_cb, "|T-id| <= |T-id|_cb");
  check(r.deviation_cb, r.bound_offdiag, "|T-id|_cb <= 4 sqrt(1-F_%)");
  check(r.bound_offdiag, r.bound_norm, "4 sqrt(1-F_%) <= 4 sqrt|T-id|");
  check(r.deviation_norm, r.bound_fidelity, "|T-id| <= 4 sqrt(1-F)");
  check(r.bound_fidelity, r.bound_offdiag, "4 sqrt(1-F) <= 4 sqrt(1-F_%)");
  return r;
}

TransposeBound transpose_bound(const Channel& t, const OptimizerConfig& opt, const Tolerances& tol) {
  const LinearMap theta_t = then(LinearMap::from_channel(t), LinearMap::transpose(t.out_dim()));
  TransposeBound b;
  if (is_completely_positive(theta_t, tol).completely_positive) {
    b.theta_t_cp = true;
    return b;
  }
  const NormEstimate cb = cb_norm(theta_t, opt);
  b.cb = cb.value;
  b.value = std::max(0.0, std::log2(cb.value));
  b.converged = cb.converged;
  return b;
}

double ideal_capacity(SystemKind source, int source_dim, SystemKind line, int line_dim) {
  if (source_dim < 2 || line_dim < 1) throw DimensionError("ideal capacity needs source_dim >= 2");
  if (source == SystemKind::quantum && line == SystemKind::classical) return 0.0;
  return std::log(static_cast<double>(line_dim)) / std::log(static_cast<double>(source_dim));
}

}  // namespace qichan
