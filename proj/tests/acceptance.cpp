// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "qichan/bell.hpp"
#include "qichan/capacity.hpp"
#include "qichan/channels.hpp"
#include "qichan/random.hpp"
#include "qichan/telepo.hpp"

using namespace qichan;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail << "first failure: " << what << "; ";
      pass = false;
    }
  }
};

double max_diff(const ComplexMatrix& a, const ComplexMatrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

ComplexMatrix diag(const std::vector<double>& p) {
  ComplexMatrix m = ComplexMatrix::Zero(static_cast<Index>(p.size()), static_cast<Index>(p.size()));
  for (std::size_t k = 0; k < p.size(); ++k) m(static_cast<Index>(k), static_cast<Index>(k)) = p[k];
  return m;
}

ComplexMatrix gram(const std::vector<ComplexMatrix>& us) {
  const Index n = static_cast<Index>(us.size());
  ComplexMatrix g(n, n);
  for (Index x = 0; x < n; ++x)
    for (Index y = 0; y < n; ++y)
      g(x, y) = (us[static_cast<std::size_t>(x)].adjoint() * us[static_cast<std::size_t>(y)]).trace();
  return g;
}

// Kraus operators cut from a random isometry; rank is raised to ceil(in/out)
// so the isometry exists.
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

// (1 - eps) id + eps T_noise
Channel near_identity(Index d, double eps, Rng& rng) {
  const ComplexMatrix v = random_isometry(2 * d, d, rng);
  std::vector<ComplexMatrix> kraus{std::sqrt(1 - eps) * identity(d)};
  for (Index x = 0; x < 2; ++x) {
    ComplexMatrix k(d, d);
    for (Index o = 0; o < d; ++o) k.row(o) = v.row(o * 2 + x);
    kraus.push_back(std::sqrt(eps) * k);
  }
  return Channel(d, d, kraus);
}

Channel fully_depolarizing(Index d) { return Channel::depolarizing_to(d, identity(d) / static_cast<double>(d)); }

Povm basis_measurement(const ComplexMatrix& u) {
  std::vector<ComplexMatrix> p;
  for (Index k = 0; k < u.rows(); ++k) p.push_back(u * matrix_unit(u.rows(), k, k) * u.adjoint());
  return Povm(p);
}

OptimizerConfig seeded(std::uint64_t seed) {
  OptimizerConfig c;  // default restart count
  c.seed = seed;
  return c;
}

// ---------------------------------------------------------------------------

void chsh_value(Outcome& o) {
  const ChshSetting st = standard_chsh_setting();
  const double beta = chsh_beta(singlet(), st.a1, st.a2, st.b1, st.b2);
  const double err = std::abs(beta - oracle::tsirelson());
  o.require(err < 1e-9, "beta off 2 sqrt 2");
  o.detail << "beta = " << beta << ", |beta - 2 sqrt 2| = " << err;
}

void classical_bound(Outcome& o) {
  const double m = classical_chsh_max();
  o.require(m == 2.0, "classical maximum");
  o.require(m == oracle::classical_chsh_bruteforce(), "brute-force oracle");
  std::mt19937_64 g(2024);
  double worst = 1.0;
  for (int k = 0; k < 1000; ++k) {
    JointOutcomeDistribution d;
    for (int i = 1; i <= 2; ++i) {
      const auto p = oracle::random_simplex(8, g);
      std::size_t n = 0;
      for (int a : {1, -1})
        for (int b1 : {1, -1})
          for (int b2 : {1, -1}) d.at(i, a, b1, b2) = p[n++];
    }
    worst = std::min(worst, telephone_success(d) - d.beta() / 4);
  }
  o.require(worst >= -1e-12, "telephone inequality");
  o.detail << "max beta = " << m << ", min(p_ok - beta/4) over 1000 = " << worst;
}

void teleportation(Outcome& o) {
  double worst_good = 0.0;
  {
    const TeleportationScheme s = build_scheme(pauli_basis(), 2);
    worst_good = std::max({worst_good, verify_teleportation(s), verify_dense_coding(s)});
  }
  for (Index d : {3, 4, 5}) {
    const TeleportationScheme s = build_scheme(weyl_basis(d), d);
    worst_good = std::max({worst_good, verify_teleportation(s), verify_dense_coding(s)});
  }
  o.require(worst_good < 1e-10, "valid scheme residual");

  auto us = pauli_basis();
  us[3] = (identity(2) + cplx(0, 1) * pauli(3)) / std::sqrt(2.0);
  const TeleportationScheme bad_u = assemble_scheme(2, max_entangled(2), us);
  ComplexVector skew = ComplexVector::Zero(4);
  skew(0) = std::sqrt(0.8);
  skew(3) = std::sqrt(0.2);
  const TeleportationScheme bad_omega = assemble_scheme(2, skew, pauli_basis());
  const double least_bad = std::min({verify_teleportation(bad_u), verify_dense_coding(bad_u),
                                     verify_teleportation(bad_omega), verify_dense_coding(bad_omega)});
  o.require(least_bad > 1e-2, "corrupted scheme residual");
  o.detail << "max valid residual = " << worst_good << ", min corrupted residual = " << least_bad;
}

void design(Outcome& o) {
  double worst_gram = 0.0;
  double worst_scheme = 0.0;
  for (int d = 2; d <= 5; ++d) {
    const auto basis = basis_from_design(LatinSquare::cyclic(d), HadamardSet::fourier(d));
    worst_gram = std::max(worst_gram, max_diff(gram(basis), static_cast<double>(d) * identity(d * d)));
    const TeleportationScheme s = build_scheme(basis, d);
    worst_scheme = std::max({worst_scheme, verify_teleportation(s), verify_dense_coding(s)});
  }
  o.require(worst_gram < 1e-10, "orthogonality");
  o.require(worst_scheme < 1e-10, "scheme residual");
  o.detail << "max |tr U_x* U_y - d delta| = " << worst_gram << ", max scheme residual = " << worst_scheme;
}

void round_trips(Outcome& o) {
  Rng rng = make_rng(5);
  double choi_err = 0.0;
  double stine_err = 0.0;
  double iso_err = 0.0;
  int rank_mismatch = 0;
  for (int k = 0; k < 50; ++k) {
    const Index in = 1 + k % 4;
    const Index out = 1 + (k / 4) % 4;
    const Channel t = random_channel(in, out, 1 + k % 5, rng);
    choi_err = std::max(choi_err, action_distance(channel_from_choi(choi_of(t)), t));

    const StinespringIsometry v = kraus_to_stinespring(t);
    std::vector<ComplexVector> chis;
    for (Index x = 0; x < v.dilation_dim; ++x) chis.push_back(basis_vector(v.dilation_dim, x));
    stine_err = std::max(stine_err, action_distance(stinespring_to_kraus(v, chis), t));
    iso_err = std::max(iso_err, max_diff(v.v.adjoint() * v.v, identity(in)));

    const Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(choi_of(t).c);
    const Index choi_rank = (es.eigenvalues().array() > 1e-10).count();
    if (v.dilation_dim != choi_rank || !v.minimal) ++rank_mismatch;
  }
  o.require(choi_err < 1e-9, "kraus -> choi -> kraus");
  o.require(stine_err < 1e-9, "kraus -> stinespring -> kraus");
  o.require(iso_err < 1e-12, "V*V = 1");
  o.require(rank_mismatch == 0, "minimal dilation dimension");
  o.detail << "choi " << choi_err << ", stinespring " << stine_err << ", |V*V - 1| " << iso_err
           << ", rank mismatches " << rank_mismatch;
}

void cp_detection(Outcome& o) {
  const CpReport r = is_completely_positive(LinearMap::transpose(2));
  o.require(!r.completely_positive, "transpose flagged");
  o.require(std::abs(r.min_eigenvalue + 0.5) < 1e-12, "eigenvalue -1/2");
  Rng rng = make_rng(6);
  int rejected = 0;
  for (int k = 0; k < 50; ++k) {
    const Channel t = random_channel(1 + k % 4, 1 + (k / 4) % 4, 1 + k % 5, rng);
    if (!is_completely_positive(LinearMap::from_channel(t)).completely_positive) ++rejected;
  }
  o.require(rejected == 0, "channels accepted");
  o.detail << "transpose min eigenvalue = " << r.min_eigenvalue << ", channels rejected = " << rejected;
}

void radon_nikodym_check(Outcome& o) {
  Rng rng = make_rng(7);
  // von Neumann instruments: rebuild T_x from V and F_x
  double vn_err = 0.0;
  for (Index d : {2, 3}) {
    const ComplexMatrix u = random_unitary(d, rng);
    std::vector<ComplexMatrix> proj;
    for (Index k = 0; k < d; ++k) proj.push_back(u * matrix_unit(d, k, k) * u.adjoint());
    const Instrument vn = Instrument::von_neumann(proj);
    const StinespringIsometry v = kraus_to_stinespring(vn.marginal_channel());
    const std::vector<ComplexMatrix> f = radon_nikodym(vn, v);
    for (std::size_t x = 0; x < f.size(); ++x)
      for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j) {
          const ComplexMatrix e = matrix_unit(d, i, j);
          vn_err = std::max(vn_err, max_diff(v.v.adjoint() * kron(e, f[x]) * v.v, vn.apply_heisenberg(x, e)));
        }
  }
  o.require(vn_err < 1e-9, "von Neumann reconstruction");

  // unitary marginal channel
  double density_err = 0.0;
  double prob_err = 0.0;
  std::mt19937_64 g(7);
  for (Index d : {2, 3}) {
    const ComplexMatrix u = random_unitary(d, rng);
    const std::vector<double> p = oracle::random_simplex(3, g);
    std::vector<std::vector<ComplexMatrix>> kraus;
    for (double px : p) kraus.push_back({std::polar(std::sqrt(px), 6.0 * px) * u});
    const Instrument blind(d, d, {}, kraus);
    const std::vector<ComplexMatrix> f = radon_nikodym(blind);
    for (std::size_t x = 0; x < p.size(); ++x)
      density_err = std::max(density_err, max_diff(f[x], p[x] * identity(f[x].rows())));
    for (int k = 0; k < 20; ++k) {
      const ComplexMatrix rho = random_density(d, rng);
      for (std::size_t x = 0; x < p.size(); ++x)
        prob_err = std::max(prob_err, std::abs((rho * blind.apply_heisenberg(x, identity(d))).trace().real() - p[x]));
    }
  }
  o.require(density_err < 1e-9, "F_x = p_x 1");
  o.require(prob_err < 1e-9, "state-independent probabilities");
  o.detail << "von Neumann " << vn_err << ", |F_x - p_x 1| " << density_err << ", probability drift " << prob_err;
}

void entropies(Outcome& o) {
  const double s_half = von_neumann_entropy(identity(2) / 2.0);
  o.require(s_half == 1.0, "S(1/2) = 1");
  std::mt19937_64 g(8);
  double kl_err = 0.0;
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = 2 + static_cast<std::size_t>(k % 4);
    const auto p = oracle::random_simplex(n, g);
    const auto q = oracle::random_simplex(n, g);
    kl_err = std::max(kl_err, std::abs(relative_entropy(diag(p), diag(q)) - oracle::kl_divergence(p, q)));
  }
  o.require(kl_err < 1e-10, "relative entropy vs KL");

  Rng rng = make_rng(8);
  int violations = 0;
  for (int k = 0; k < 100; ++k) {
    const Index d = 2 + k % 3;
    const auto w = oracle::random_simplex(2 + static_cast<std::size_t>(k % 3), g);
    ComplexMatrix mix = ComplexMatrix::Zero(d, d);
    ComplexMatrix mix_s = ComplexMatrix::Zero(d, d);
    double avg_s = 0.0;
    double avg_rel = 0.0;
    for (double wi : w) {
      const ComplexMatrix r = random_density(d, rng);
      const ComplexMatrix s = random_density(d, rng);
      mix += wi * r;
      mix_s += wi * s;
      avg_s += wi * von_neumann_entropy(r);
      avg_rel += wi * relative_entropy(r, s);
    }
    if (von_neumann_entropy(mix) < avg_s - 1e-12) ++violations;
    if (relative_entropy(mix, mix_s) > avg_rel + 1e-12) ++violations;
  }
  o.require(violations == 0, "concavity / joint convexity");
  o.detail << "S(1/2 1) = " << s_half << ", KL error " << kl_err << ", property violations " << violations;
}

void capacities(Outcome& o) {
  const double ideal = one_shot_classical_capacity(Channel::identity(2), seeded(9)).value;
  const double bsc = one_shot_classical_capacity(Channel::classical({{0.9, 0.1}, {0.1, 0.9}}), seeded(9)).value;
  const double dep = one_shot_classical_capacity(fully_depolarizing(2), seeded(9)).value;
  const double cs = cs1(Channel::identity(2), seeded(9)).value;
  const double es = coherent_info_ES(identity(4) / 4.0, 2, 2);
  o.require(std::abs(ideal - 1.0) < 1e-3, "ideal qubit");
  o.require(std::abs(bsc - oracle::bsc_capacity(0.1)) < 1e-3, "BSC(0.1)");
  o.require(std::abs(dep) < 1e-6, "fully depolarizing");
  o.require(std::abs(cs - 1.0) < 1e-3, "C_S1(id)");
  o.require(es == -1.0, "E_S(1/4 1)");
  o.detail << "C1(id) " << ideal << ", C1(BSC) " << bsc << " vs " << oracle::bsc_capacity(0.1) << ", C1(dep) " << dep
           << ", C_S1(id) " << cs << ", E_S " << es;
}

void norms(Outcome& o) {
  Rng rng = make_rng(10);
  double channel_err = 0.0;
  for (int k = 0; k < 20; ++k) {
    const Index d = 2 + k % 2;
    const Channel t = random_channel(d, 2 + (k / 2) % 2, 1 + k % 3, rng);
    channel_err = std::max(channel_err, std::abs(cb_norm(LinearMap::from_channel(t), seeded(k)).value - 1.0));
  }
  o.require(channel_err < 1e-6, "cb norm of channels");

  const double theta = cb_norm(LinearMap::transpose(2), seeded(10)).value;
  o.require(std::abs(theta - 2.0) < 2e-2, "cb norm of transpose");

  std::mt19937_64 g(10);
  double classical_err = 0.0;
  for (int k = 0; k < 20; ++k) {
    const std::size_t n = 2 + static_cast<std::size_t>(k % 2);
    const auto t = oracle::random_stochastic(n, g);
    std::vector<std::vector<double>> delta(n, std::vector<double>(n, 0.0));
    for (std::size_t x = 0; x < n; ++x) delta[x][x] = 1.0;
    const LinearMap diff =
        LinearMap::from_channel(Channel::classical(delta)) - LinearMap::from_channel(Channel::classical(t));
    classical_err = std::max(classical_err, std::abs(cb_norm(diff, seeded(k)).value - oracle::classical_deviation_cb(t)));
  }
  o.require(classical_err < 1e-12, "classical deviation");

  double mp_bound = 0.0;
  for (int k = 0; k < 5; ++k) {
    const Channel mp = measure_prepare_channel(basis_measurement(random_unitary(2, rng)),
                                               {random_density(2, rng), random_density(2, rng)});
    mp_bound = std::max(mp_bound, transpose_bound(mp, seeded(k)).value);
  }
  o.require(mp_bound == 0.0, "transpose bound of measure-prepare");
  o.detail << "|cb - 1| " << channel_err << ", cb(Theta) " << theta << ", classical error " << classical_err
           << ", measure-prepare bound " << mp_bound;
}

void estimate_chain(Outcome& o) {
  Rng rng = make_rng(11);
  std::uniform_real_distribution<double> eps(0.0, 0.3);
  int failures = 0;
  double min_gap = 1e9;
  for (int k = 0; k < 100; ++k) {
    const EstimateChainReport r = estimate_chain_check(near_identity(2 + k % 2, eps(rng), rng), seeded(k), 1e-3);
    if (!r.holds()) ++failures;
    min_gap = std::min({min_gap, r.deviation_cb - r.deviation_norm, r.bound_offdiag - r.deviation_cb,
                        r.bound_norm - r.bound_offdiag});
  }
  o.require(failures == 0, "chain violated");
  o.detail << "violations " << failures << " of 100, smallest link slack " << min_gap;
}

void duality(Outcome& o) {
  Rng rng = make_rng(12);
  double channel_err = 0.0;
  double back_err = 0.0;
  for (int k = 0; k < 10; ++k) {
    const Index da = 2 + k % 2;
    const Index db = 2 + (k / 2) % 2;
    const ComplexMatrix ra = random_density(da, rng);
    const ComplexMatrix rb = random_density(db, rng);
    const DualityPair p = duality_decompose(kron(ra, rb), da, db);
    channel_err = std::max(channel_err, action_distance(p.channel, Channel::depolarizing_to(p.channel.in_dim(), rb)));
    back_err = std::max(back_err, max_diff(duality_compose(p.psi, da, p.channel), kron(ra, rb)));
  }
  o.require(channel_err < 1e-9, "product -> depolarizing");
  o.require(back_err < 1e-9, "round trip");

  double id_err = 0.0;
  for (Index d : {2, 3}) {
    const DualityPair p = duality_decompose(projector(max_entangled(d)), d, d);
    id_err = std::max(id_err, action_distance(p.channel, Channel::identity(d)));
  }
  o.require(id_err < 1e-9, "maximally entangled -> identity");
  o.detail << "depolarizing " << channel_err << ", round trip " << back_err << ", identity " << id_err;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget_s;
    std::function<void(Outcome&)> run;
  };
  const std::vector<Criterion> criteria{
      {"CHSH value", 1, chsh_value},
      {"Classical bound and telephone", 5, classical_bound},
      {"Teleportation and dense coding", 10, teleportation},
      {"Design construction", 10, design},
      {"Representation round trips", 30, round_trips},
      {"CP detection", 1, cp_detection},
      {"Radon-Nikodym", 10, radon_nikodym_check},
      {"Entropies", 10, entropies},
      {"Capacity quantities", 120, capacities},
      {"Norms", 120, norms},
      {"Estimate chain", 120, estimate_chain},
      {"Duality", 5, duality},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    o.detail.precision(12);
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].run(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    // The time budget is reported, not enforced.
    std::printf("%s %2zu %-32s %s [%.2f s, budget %.0f s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].name,
                o.detail.str().c_str(), secs, criteria[i].budget_s);
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
