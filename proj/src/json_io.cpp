#include "qichan/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace qichan {

namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object()) throw FormatError("expected a JSON object");
  const auto it = j.find(key);
  if (it == j.end()) throw FormatError(std::string("missing field \"") + key + "\"");
  return *it;
}

template <typename T>
T get_as(const Json& j, const char* what) {
  try {
    return j.get<T>();
  } catch (const Json::exception&) {
    throw FormatError(std::string("field ") + what + " has the wrong type");
  }
}

Index get_dim(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_number_integer()) throw FormatError(std::string("field \"") + key + "\" must be an integer");
  const auto d = v.get<std::int64_t>();
  if (d < 0) throw FormatError(std::string("field \"") + key + "\" must be nonnegative");
  return static_cast<Index>(d);
}

cplx entry_from_json(const Json& e) {
  if (e.is_number()) return {e.get<double>(), 0.0};
  if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
    throw FormatError("complex entries are [re, im] pairs");
  return {e[0].get<double>(), e[1].get<double>()};
}

Json entry_to_json(cplx z) { return Json::array({z.real(), z.imag()}); }

const Json& array_field(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_array()) throw FormatError(std::string("field \"") + key + "\" must be an array");
  return v;
}

}  // namespace

double round_significant(double x, int digits) {
  if (x == 0.0) return 0.0;  // drops the sign of -0
  if (!std::isfinite(x)) return x;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return std::strtod(buf, nullptr);
}

Json to_json(const ComplexMatrix& m) {
  Json data = Json::array();
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c) data.push_back(entry_to_json(m(r, c)));
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

ComplexMatrix matrix_from_json(const Json& j) {
  const Index rows = get_dim(j, "rows");
  const Index cols = get_dim(j, "cols");
  const Json& data = array_field(j, "data");
  if (static_cast<Index>(data.size()) != rows * cols)
    throw FormatError("matrix data has " + std::to_string(data.size()) + " entries, expected " +
                      std::to_string(rows * cols));
  ComplexMatrix m(rows, cols);
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) m(r, c) = entry_from_json(data[static_cast<std::size_t>(r * cols + c)]);
  return m;
}

Json vector_to_json(const ComplexVector& v) {
  Json out = Json::array();
  for (Index k = 0; k < v.size(); ++k) out.push_back(entry_to_json(v(k)));
  return out;
}

ComplexVector vector_from_json(const Json& j) {
  if (j.is_object()) {
    const ComplexMatrix m = matrix_from_json(j);
    if (m.cols() != 1) throw FormatError("vector matrix must have one column");
    return m.col(0);
  }
  if (!j.is_array()) throw FormatError("vector must be an array of [re, im] pairs");
  ComplexVector v(static_cast<Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) v(static_cast<Index>(k)) = entry_from_json(j[k]);
  return v;
}

Json to_json(const Algebra& a) {
  Json factors = Json::array();
  for (const auto& f : a.factors())
    factors.push_back({{"kind", f.kind == FactorKind::quantum ? "quantum" : "classical"}, {"dim", f.dim}});
  return {{"factors", std::move(factors)}};
}

Algebra algebra_from_json(const Json& j) {
  std::vector<Factor> factors;
  for (const auto& f : array_field(j, "factors")) {
    const auto kind = get_as<std::string>(field(f, "kind"), "kind");
    Factor factor;
    if (kind == "quantum")
      factor.kind = FactorKind::quantum;
    else if (kind == "classical")
      factor.kind = FactorKind::classical;
    else
      throw FormatError("factor kind must be \"quantum\" or \"classical\"");
    factor.dim = get_dim(f, "dim");
    factors.push_back(factor);
  }
  return Algebra(std::move(factors));
}

Json to_json(const Channel& t) {
  Json kraus = Json::array();
  for (const auto& k : t.kraus()) kraus.push_back(to_json(k));
  return {{"in_dim", t.in_dim()}, {"out_dim", t.out_dim()}, {"kraus", std::move(kraus)}};
}

Channel channel_from_json(const Json& j, const Tolerances& tol) {
  const Index in = get_dim(j, "in_dim");
  const Index out = get_dim(j, "out_dim");
  std::vector<ComplexMatrix> kraus;
  for (const auto& k : array_field(j, "kraus")) kraus.push_back(matrix_from_json(k));
  return Channel(in, out, std::move(kraus), tol);
}

Json to_json(const Instrument& inst) {
  Json kraus = Json::array();
  for (const auto& list : inst.kraus()) {
    Json row = Json::array();
    for (const auto& k : list) row.push_back(to_json(k));
    kraus.push_back(std::move(row));
  }
  return {{"in_dim", inst.in_dim()},
          {"out_dim", inst.out_dim()},
          {"outcomes", inst.outcomes()},
          {"kraus", std::move(kraus)}};
}

Instrument instrument_from_json(const Json& j, const Tolerances& tol) {
  const Index in = get_dim(j, "in_dim");
  const Index out = get_dim(j, "out_dim");
  std::vector<std::string> outcomes;
  if (j.contains("outcomes")) {
    for (const auto& o : array_field(j, "outcomes"))
      outcomes.push_back(o.is_string() ? o.get<std::string>() : o.dump());
  }
  std::vector<std::vector<ComplexMatrix>> kraus;
  for (const auto& list : array_field(j, "kraus")) {
    if (!list.is_array()) throw FormatError("instrument kraus must be a list of lists of matrices");
    std::vector<ComplexMatrix> ops;
    for (const auto& k : list) ops.push_back(matrix_from_json(k));
    kraus.push_back(std::move(ops));
  }
  return Instrument(in, out, std::move(outcomes), std::move(kraus), tol);
}

Json to_json(const ChoiMatrix& c) {
  return {{"in_dim", c.in_dim}, {"out_dim", c.out_dim}, {"choi", to_json(c.c)}};
}

ChoiMatrix choi_from_json(const Json& j) {
  if (j.is_object() && j.contains("kraus")) {
    // any Kraus list defines a CP map; build the Choi matrix without
    // insisting on unitality
    const Index in = get_dim(j, "in_dim");
    const Index out = get_dim(j, "out_dim");
    std::vector<LinearMap::Term> terms;
    for (const auto& k : array_field(j, "kraus")) {
      const ComplexMatrix m = matrix_from_json(k);
      if (m.rows() != out || m.cols() != in) throw FormatError("Kraus operator has the wrong shape");
      terms.push_back({m.adjoint(), m});
    }
    return choi_of(LinearMap(in, out, std::move(terms)));
  }
  ChoiMatrix c;
  c.in_dim = get_dim(j, "in_dim");
  c.out_dim = get_dim(j, "out_dim");
  c.c = matrix_from_json(field(j, "choi"));
  const Index n = c.in_dim * c.out_dim;
  if (c.c.rows() != n || c.c.cols() != n) throw FormatError("Choi matrix must be (in·out) x (in·out)");
  return c;
}

Json to_json(const TeleportationScheme& s) {
  Json us = Json::array();
  for (const auto& u : s.unitaries) us.push_back(to_json(u));
  return {{"d", s.d}, {"omega", vector_to_json(s.omega)}, {"unitaries", std::move(us)}};
}

TeleportationScheme scheme_from_json(const Json& j) {
  const Index d = get_dim(j, "d");
  if (d < 1) throw FormatError("scheme dimension must be positive");
  const ComplexVector omega = vector_from_json(field(j, "omega"));
  std::vector<ComplexMatrix> us;
  for (const auto& u : array_field(j, "unitaries")) us.push_back(matrix_from_json(u));
  return assemble_scheme(d, omega, std::move(us));
}

Json to_json(const LatinSquare& ls) { return {{"order", ls.order()}, {"rows", ls.rows()}}; }

LatinSquare latin_square_from_json(const Json& j) {
  const Index order = get_dim(j, "order");
  std::vector<std::vector<int>> rows;
  for (const auto& r : array_field(j, "rows")) rows.push_back(get_as<std::vector<int>>(r, "rows"));
  if (static_cast<Index>(rows.size()) != order) throw InvariantError("Latin square has the wrong number of rows");
  return LatinSquare(std::move(rows));
}

Json to_json(const HadamardSet& hs) {
  Json ms = Json::array();
  for (std::size_t i = 0; i < hs.size(); ++i) ms.push_back(to_json(hs[i]));
  return {{"order", hs.order()}, {"matrices", std::move(ms)}};
}

HadamardSet hadamard_set_from_json(const Json& j, const Tolerances& tol) {
  const Index order = get_dim(j, "order");
  std::vector<ComplexMatrix> ms;
  for (const auto& m : array_field(j, "matrices")) ms.push_back(matrix_from_json(m));
  if (!ms.empty() && ms.front().rows() != order) throw InvariantError("Hadamard matrices do not match the order");
  return HadamardSet(std::move(ms), tol);
}

Json to_json(const JointOutcomeDistribution& d) {
  Json p = Json::array();
  for (int i = 1; i <= 2; ++i)
    for (int a : {1, -1})
      for (int b1 : {1, -1})
        for (int b2 : {1, -1}) p.push_back({i, a, b1, b2, d.at(i, a, b1, b2)});
  return {{"p", std::move(p)}};
}

JointOutcomeDistribution distribution_from_json(const Json& j) {
  JointOutcomeDistribution d;
  for (const auto& row : array_field(j, "p")) {
    if (!row.is_array() || row.size() != 5) throw FormatError("distribution rows are [i, a, b1, b2, prob]");
    for (std::size_t k = 0; k < 4; ++k)
      if (!row[k].is_number_integer()) throw FormatError("distribution labels must be integers");
    if (!row[4].is_number()) throw FormatError("probability must be a number");
    try {
      d.at(row[0].get<int>(), row[1].get<int>(), row[2].get<int>(), row[3].get<int>()) = row[4].get<double>();
    } catch (const InvariantError& e) {
      throw FormatError(e.what());
    }
  }
  return d;
}

Json to_json(const OptimizerConfig& c) {
  return {{"seed", c.seed}, {"restarts", c.restarts}, {"max_iter", c.max_iter}, {"tol", c.tol}};
}

OptimizerConfig optimizer_config_from_json(const Json& j) {
  if (!j.is_object()) throw FormatError("optimizer config must be an object");
  OptimizerConfig c;
  if (j.contains("seed")) c.seed = get_as<std::uint64_t>(j["seed"], "seed");
  if (j.contains("restarts")) c.restarts = get_as<int>(j["restarts"], "restarts");
  if (j.contains("max_iter")) c.max_iter = get_as<int>(j["max_iter"], "max_iter");
  if (j.contains("tol")) c.tol = get_as<double>(j["tol"], "tol");
  if (c.restarts < 0 || c.max_iter < 1 || !(c.tol > 0)) throw FormatError("optimizer config out of range");
  return c;
}

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw FormatError(std::string("malformed JSON: ") + e.what());
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str());
}

}  // namespace qichan
