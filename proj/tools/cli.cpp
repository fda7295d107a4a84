#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <openssl/evp.h>

#include "qichan/bell.hpp"
#include "qichan/capacity.hpp"
#include "qichan/channels.hpp"
#include "qichan/json_io.hpp"
#include "qichan/telepo.hpp"

namespace qichan::cli {

namespace {

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw NumericalError("SHA-256 digest failed");
  std::ostringstream hex;
  for (unsigned int k = 0; k < len; ++k) hex << std::hex << std::setw(2) << std::setfill('0') << int(md[k]);
  return hex.str();
}

void round_numbers(Json& j) {
  if (j.is_number_float()) {
    j = round_significant(j.get<double>(), 9);
  } else if (j.is_structured()) {
    for (auto& child : j) round_numbers(child);
  }
}

Tolerances tolerances_from_env() {
  Tolerances tol;
  if (const char* env = std::getenv("QICHAN_TOL"); env && *env) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(v > 0) || !std::isfinite(v))
      throw FormatError(std::string("QICHAN_TOL must be a positive number, got \"") + env + "\"");
    tol.alg = v;
  }
  return tol;
}

// Everything one invocation needs besides its parsed flags.
struct Session {
  Session(std::istream& i, std::ostream& o, Tolerances t) : in(i), out(o), tol(t) {}

  std::istream& in;
  std::ostream& out;
  Tolerances tol;
  bool pretty = false;
  bool timing = false;
  std::string digest_input;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  Json load(const std::string& path) {
    std::string text;
    if (path == "-") {
      std::stringstream ss;
      ss << in.rdbuf();
      text = ss.str();
    } else {
      std::ifstream file(path, std::ios::binary);
      if (!file) throw FormatError("cannot open " + path);
      std::stringstream ss;
      ss << file.rdbuf();
      text = ss.str();
    }
    digest_input += text;
    return parse_json(text);
  }

  // Reports carry 9 significant digits; data files keep full precision.
  void emit(const Json& j, bool round = true) {
    Json copy = j;
    if (round) round_numbers(copy);
    out << (pretty ? copy.dump(2) : copy.dump()) << '\n';
  }
};

class Report {
 public:
  explicit Report(std::string command) : command_(std::move(command)) {}

  Report& add(const std::string& name, Json value, const std::string& convention = {}) {
    Json r = {{"name", name}, {"value", std::move(value)}};
    if (!convention.empty()) r["convention"] = convention;
    results_.push_back(std::move(r));
    return *this;
  }

  void emit(Session& s, std::uint64_t seed) const {
    Json j = {{"command", command_},
              {"inputs_digest", sha256_hex(s.digest_input)},
              {"results", results_},
              {"seed", seed}};
    if (s.timing)
      j["elapsed_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - s.start)
                            .count();
    s.emit(j);
  }

 private:
  std::string command_;
  Json results_ = Json::array();
};

// ---------------------------------------------------------------- scheme

struct SchemeArgs {
  int dim = 2;
  std::string construction = "pauli";
  std::string latin;
  std::string hadamard;
  std::string out;
  std::string input = "-";
};

int scheme_build(Session& s, const SchemeArgs& a) {
  if (a.dim < 2) throw FormatError("--dim must be at least 2");
  std::vector<ComplexMatrix> unitaries;
  if (a.construction == "pauli") {
    if (a.dim != 2) throw FormatError("the Pauli construction needs --dim 2");
    unitaries = pauli_basis();
  } else if (a.construction == "weyl") {
    unitaries = weyl_basis(a.dim);
  } else {
    const LatinSquare ls = a.latin.empty() ? LatinSquare::cyclic(a.dim) : latin_square_from_json(s.load(a.latin));
    const HadamardSet hs =
        a.hadamard.empty() ? HadamardSet::fourier(a.dim) : hadamard_set_from_json(s.load(a.hadamard), s.tol);
    if (ls.order() != a.dim || hs.order() != a.dim) throw FormatError("design inputs do not match --dim");
    unitaries = basis_from_design(ls, hs, s.tol);
  }
  const TeleportationScheme scheme = build_scheme(unitaries, a.dim, s.tol);
  if (a.out.empty()) {
    s.emit(to_json(scheme), false);
    return ok;
  }
  std::ofstream file(a.out);
  if (!file) throw FormatError("cannot write " + a.out);
  file << to_json(scheme).dump() << '\n';
  const SchemeInvariants inv = check_scheme(scheme);
  Report("scheme build")
      .add("d", a.dim)
      .add("construction", a.construction)
      .add("orthogonality_residual", inv.orthogonality_residual)
      .add("out", a.out)
      .emit(s, 0);
  return ok;
}

int scheme_verify(Session& s, const SchemeArgs& a) {
  const TeleportationScheme scheme = scheme_from_json(s.load(a.input));
  const SchemeInvariants inv = check_scheme(scheme);
  const double tele = verify_teleportation(scheme);
  const double dense = verify_dense_coding(scheme);
  const bool pass = tele < s.tol.alg && dense < s.tol.alg;
  Report("scheme verify")
      .add("d", scheme.d)
      .add("teleportation_residual", tele)
      .add("dense_coding_residual", dense)
      .add("omega_residual", inv.omega_residual)
      .add("orthogonality_residual", inv.orthogonality_residual)
      .add("unitarity_residual", inv.unitarity_residual)
      .add("gram_residual", inv.gram_residual)
      .add("link_residual", inv.link_residual)
      .add("completeness_residual", inv.completeness_residual)
      .add("verified", pass)
      .emit(s, 0);
  return pass ? ok : verification_failed;
}

// --------------------------------------------------------------- channel

struct ChannelArgs {
  std::string input = "-";
  std::string config;
  std::uint64_t seed = 0;
  int restarts = OptimizerConfig{}.restarts;
  int max_iter = OptimizerConfig{}.max_iter;
  bool seed_given = false;
  bool restarts_given = false;
  bool max_iter_given = false;
  bool deviation = false;
  std::string convention = "inf";
};

OptimizerConfig optimizer(Session& s, const ChannelArgs& a) {
  OptimizerConfig c = a.config.empty() ? OptimizerConfig{} : optimizer_config_from_json(s.load(a.config));
  if (a.seed_given || a.config.empty()) c.seed = a.seed;
  if (a.restarts_given) c.restarts = a.restarts;
  if (a.max_iter_given) c.max_iter = a.max_iter;
  if (c.restarts < 0 || c.max_iter < 1) throw FormatError("optimizer flags out of range");
  return c;
}

Json outcome_map(const std::vector<std::string>& labels, const std::vector<ComplexMatrix>& ms) {
  Json j = Json::object();
  for (std::size_t x = 0; x < ms.size(); ++x) j[labels[x]] = to_json(ms[x]);
  return j;
}

Index choi_rank(const ChoiMatrix& c, const Tolerances& tol) {
  const RealVector ev = eigh(hermitian_part(c.c)).values;
  const double top = std::max(1.0, ev.cwiseAbs().maxCoeff());
  return (ev.array() > tol.rank * top).count();
}

int channel_command(Session& s, const std::string& sub, const ChannelArgs& a) {
  const std::string command = "channel " + sub;
  if (sub == "check-cp") {
    const ChoiMatrix c = choi_from_json(s.load(a.input));
    const CpReport r = is_completely_positive(c, s.tol);
    Report(command)
        .add("completely_positive", r.completely_positive)
        .add("min_choi_eigenvalue", r.min_eigenvalue)
        .add("witness", vector_to_json(r.witness))
        .emit(s, 0);
    return r.completely_positive ? ok : verification_failed;
  }
  if (sub == "choi") {
    const ChoiMatrix c = choi_from_json(s.load(a.input));
    Report(command)
        .add("in_dim", c.in_dim)
        .add("out_dim", c.out_dim)
        .add("choi", to_json(c.c), "trace-normalized")
        .add("rank", choi_rank(c, s.tol))
        .emit(s, 0);
    return ok;
  }
  if (sub == "stinespring") {
    const Channel t = channel_from_json(s.load(a.input), s.tol);
    const StinespringIsometry v = kraus_to_stinespring(t, s.tol);
    const double iso = (v.v.adjoint() * v.v - identity(v.in_dim)).cwiseAbs().maxCoeff();
    Report(command)
        .add("dilation_dim", v.dilation_dim)
        .add("choi_rank", choi_rank(choi_of(t), s.tol))
        .add("minimal", v.minimal)
        .add("isometry_residual", iso)
        .add("v", to_json(v.v), "rows o*l+x")
        .emit(s, 0);
    return iso < s.tol.alg ? ok : verification_failed;
  }
  if (sub == "radon-nikodym") {
    const Instrument inst = instrument_from_json(s.load(a.input), s.tol);
    const std::vector<ComplexMatrix> f = radon_nikodym(inst, s.tol);
    ComplexMatrix sum = ComplexMatrix::Zero(inst.in_dim(), inst.in_dim());
    for (const auto& fx : f) sum += fx;
    Report(command)
        .add("densities", outcome_map(inst.outcomes(), f))
        .add("sum_residual", (sum - identity(inst.in_dim())).cwiseAbs().maxCoeff())
        .emit(s, 0);
    return ok;
  }
  if (sub == "cbnorm") {
    const OptimizerConfig opt = optimizer(s, a);
    LinearMap m = map_from_choi(choi_from_json(s.load(a.input)));
    if (a.deviation) {
      if (m.in_dim() != m.out_dim()) throw FormatError("--deviation needs equal input and output dimensions");
      m = m - LinearMap::identity(m.in_dim());
    }
    const NormEstimate op = operator_norm(m, opt);
    const NormEstimate cb = cb_norm(m, opt);
    Report(command)
        .add("operator_norm", op.value, a.deviation ? "T - id" : "T")
        .add("cb_norm", cb.value, a.deviation ? "T - id" : "T")
        .add("stabilizer_dim", cb.stabilizer_dim)
        .add("converged", op.converged && cb.converged)
        .add("restarts", opt.restarts)
        .emit(s, opt.seed);
    return ok;
  }
  if (sub == "holevo") {
    const OptimizerConfig opt = optimizer(s, a);
    const Channel t = channel_from_json(s.load(a.input), s.tol);
    const HolevoResult r = one_shot_classical_capacity(t, opt, s.tol);
    Report(command)
        .add("holevo_capacity", r.value, "bits")
        .add("ensemble_size", r.ensemble.states.size())
        .add("converged", r.converged)
        .add("restarts", r.restarts)
        .emit(s, opt.seed);
    return ok;
  }
  if (sub == "cs1") {
    const OptimizerConfig opt = optimizer(s, a);
    const Channel t = channel_from_json(s.load(a.input), s.tol);
    const Cs1Result r = cs1(t, opt, s.tol);
    Report(command)
        .add("cs1", r.value, "bits")
        .add("converged", r.converged)
        .add("restarts", opt.restarts)
        .emit(s, opt.seed);
    return ok;
  }
  if (sub == "transpose-bound") {
    const OptimizerConfig opt = optimizer(s, a);
    const Channel t = channel_from_json(s.load(a.input), s.tol);
    const TransposeBound r = transpose_bound(t, opt, s.tol);
    Report(command)
        .add("transpose_bound", r.value, "bits")
        .add("theta_t_cb_norm", r.cb)
        .add("theta_t_cp", r.theta_t_cp)
        .add("converged", r.converged)
        .add("restarts", opt.restarts)
        .emit(s, opt.seed);
    return ok;
  }
  if (sub == "fidelity") {
    const OptimizerConfig opt = optimizer(s, a);
    const Channel t = channel_from_json(s.load(a.input), s.tol);
    if (t.in_dim() != t.out_dim()) throw FormatError("fidelity needs equal input and output dimensions");
    const auto conv = a.convention == "sup" ? OffdiagConvention::sup : OffdiagConvention::inf;
    const FidelityResult f = fidelity_worst(t, opt);
    const FidelityResult g = fidelity_offdiag(t, opt, conv);
    Report(command)
        .add("fidelity", f.value, "inf over pure inputs")
        .add("fidelity_offdiag", g.value, a.convention)
        .add("converged", f.converged && g.converged)
        .add("restarts", opt.restarts)
        .emit(s, opt.seed);
    return ok;
  }
  throw FormatError("unknown channel command " + sub);
}

// ------------------------------------------------------------------ bell

struct BellArgs {
  bool singlet = false;
  bool standard = false;
  std::vector<double> angles;
  std::string state;
  int minus_term = 3;
  bool tie_alice = false;
  std::string dist;
};

int bell_chsh(Session& s, const BellArgs& a) {
  std::optional<State> state;
  if (a.singlet) state = singlet();
  if (!a.state.empty()) {
    if (state) throw FormatError("give either --singlet or --state");
    state = State(Algebra::qubits(2), matrix_from_json(s.load(a.state)), s.tol);
  }
  if (!state) throw FormatError("chsh needs --singlet or --state");

  std::optional<ChshSetting> setting;
  if (a.standard) setting = standard_chsh_setting();
  if (!a.angles.empty()) {
    if (setting) throw FormatError("give either --standard-angles or --angles");
    if (a.angles.size() != 4) throw FormatError("--angles takes four polarizer angles A1 A2 B1 B2");
    setting = ChshSetting{DichotomicObservable::polarizer(a.angles[0]), DichotomicObservable::polarizer(a.angles[1]),
                          DichotomicObservable::polarizer(a.angles[2]), DichotomicObservable::polarizer(a.angles[3])};
  }
  if (!setting) throw FormatError("chsh needs --standard-angles or --angles");

  const auto& [a1, a2, b1, b2] = *setting;
  const double beta = chsh_beta(*state, a1, a2, b1, b2);
  Report("bell chsh")
      .add("beta", beta)
      .add("C11", correlation(*state, a1, b1))
      .add("C12", correlation(*state, a1, b2))
      .add("C21", correlation(*state, a2, b1))
      .add("C22", correlation(*state, a2, b2))
      .add("classical_bound", 2.0)
      .add("quantum_bound", 2.0 * std::numbers::sqrt2)
      .add("violates_classical_bound", beta > 2.0 + s.tol.alg)
      .emit(s, 0);
  return ok;
}

int bell_classical_max(Session& s, const BellArgs& a) {
  if (a.minus_term < 0 || a.minus_term > 3) throw FormatError("--minus-term must be 0..3");
  Report("bell classical-max")
      .add("beta_max", classical_chsh_max(a.minus_term, a.tie_alice), a.tie_alice ? "a1 = a2" : "all strategies")
      .emit(s, 0);
  return ok;
}

int bell_telephone(Session& s, const BellArgs& a) {
  if (a.dist.empty()) throw FormatError("telephone needs --dist");
  const JointOutcomeDistribution d = distribution_from_json(s.load(a.dist));
  const double p_ok = telephone_success(d, s.tol);
  const double beta = d.beta();
  const bool holds = p_ok >= beta / 4.0 - s.tol.alg;
  Report("bell telephone")
      .add("p_ok", p_ok)
      .add("beta", beta)
      .add("beta_over_4", beta / 4.0)
      .add("inequality_holds", holds, "p_ok >= beta/4")
      .add("signalling", signalling_check(d, s.tol), "p_ok > 1/2")
      .emit(s, 0);
  return holds ? ok : verification_failed;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"qichan: quantum channels, capacities, Bell correlations and teleportation schemes"};
  app.name("qichan");
  app.require_subcommand(1);
  app.fallthrough();

  bool pretty = false;
  bool timing = false;
  app.add_flag("--pretty", pretty, "Indented JSON output");
  app.add_flag("--timing", timing, "Add elapsed_ms to reports (makes output nondeterministic)");

  // scheme
  SchemeArgs sa;
  auto* scheme = app.add_subcommand("scheme", "Build and verify tight teleportation schemes");
  scheme->require_subcommand(1);
  auto* build = scheme->add_subcommand("build", "Construct a scheme from a unitary basis");
  build->add_option("--dim", sa.dim, "System dimension d")->check(CLI::Range(2, 64));
  build->add_option("--construction", sa.construction, "Unitary basis")
      ->check(CLI::IsMember({"pauli", "weyl", "design"}));
  build->add_option("--latin", sa.latin, "Latin square JSON (design; default cyclic)");
  build->add_option("--hadamard", sa.hadamard, "Hadamard set JSON (design; default Fourier)");
  build->add_option("--out", sa.out, "Write the scheme here instead of standard output");
  auto* verify = scheme->add_subcommand("verify", "Verify teleportation and dense coding for a scheme");
  verify->add_option("input", sa.input, "Scheme JSON, - for standard input");

  // channel
  ChannelArgs ca;
  auto* channel = app.add_subcommand("channel", "Channel diagnostics and capacity quantities");
  channel->require_subcommand(1);
  std::vector<std::pair<std::string, std::string>> channel_cmds = {
      {"check-cp", "Complete positivity from the Choi matrix"},
      {"stinespring", "Minimal Stinespring isometry"},
      {"choi", "Trace-normalized Choi matrix"},
      {"radon-nikodym", "Radon-Nikodym densities of an instrument"},
      {"cbnorm", "Operator and cb norm of a map"},
      {"holevo", "One-shot classical capacity"},
      {"cs1", "One-shot coherent information capacity"},
      {"transpose-bound", "log2 of the cb norm of the transposed channel"},
      {"fidelity", "Worst-case and off-diagonal fidelities"}};
  std::vector<CLI::App*> channel_subs;
  for (const auto& [name, desc] : channel_cmds) {
    auto* sub = channel->add_subcommand(name, desc);
    sub->add_option("input", ca.input, "Channel, map or instrument JSON, - for standard input");
    sub->add_option("--config", ca.config, "Optimizer config JSON");
    sub->add_option("--seed", ca.seed, "Optimizer seed");
    sub->add_option("--restarts", ca.restarts, "Optimizer restarts");
    sub->add_option("--max-iter", ca.max_iter, "Optimizer iteration limit");
    if (name == "cbnorm") sub->add_flag("--deviation", ca.deviation, "Use T - id instead of T");
    if (name == "fidelity")
      sub->add_option("--convention", ca.convention, "Off-diagonal fidelity extremum")
          ->check(CLI::IsMember({"inf", "sup"}));
    channel_subs.push_back(sub);
  }

  // bell
  BellArgs ba;
  auto* bell = app.add_subcommand("bell", "CHSH correlations and the Bell telephone");
  bell->require_subcommand(1);
  auto* chsh = bell->add_subcommand("chsh", "CHSH value beta of a two-qubit state");
  chsh->add_flag("--singlet", ba.singlet, "Use the singlet state");
  chsh->add_option("--state", ba.state, "Two-qubit density matrix JSON");
  chsh->add_flag("--standard-angles", ba.standard, "A1=45, A2=0, B1=22.5, B2=67.5 degrees");
  chsh->add_option("--angles", ba.angles, "Polarizer angles A1 A2 B1 B2 in degrees")->expected(4);
  auto* cmax = bell->add_subcommand("classical-max", "Largest beta over deterministic strategies");
  cmax->add_option("--minus-term", ba.minus_term, "Negated correlation, 0..3 in the order 11 12 21 22");
  cmax->add_flag("--tie-alice", ba.tie_alice, "Only strategies with a1 = a2");
  auto* tele = bell->add_subcommand("telephone", "Bell telephone success probability");
  tele->add_option("--dist", ba.dist, "Joint outcome distribution JSON")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : input_error;
  }

  try {
    Session s(in, out, tolerances_from_env());
    s.pretty = pretty;
    s.timing = timing;
    for (auto* sub : channel_subs) {
      if (!sub->parsed()) continue;
      ca.seed_given = sub->count("--seed") > 0;
      ca.restarts_given = sub->count("--restarts") > 0;
      ca.max_iter_given = sub->count("--max-iter") > 0;
      return channel_command(s, sub->get_name(), ca);
    }
    if (build->parsed()) return scheme_build(s, sa);
    if (verify->parsed()) return scheme_verify(s, sa);
    if (chsh->parsed()) return bell_chsh(s, ba);
    if (cmax->parsed()) return bell_classical_max(s, ba);
    if (tele->parsed()) return bell_telephone(s, ba);
    err << "no command given\n";
    return input_error;
  } catch (const NumericalError& e) {
    err << "verification failed: " << e.what() << '\n';
    return verification_failed;
  } catch (const std::invalid_argument& e) {
    err << "input error: " << e.what() << '\n';
    return input_error;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return input_error;
  }
}

}  // namespace qichan::cli
