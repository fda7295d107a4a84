#pragma once

// JSON encodings shared by the library and the command-line tool.
//
//   matrix        {"rows":n,"cols":m,"data":[[re,im],...]}   row-major
//   vector        [[re,im],...]  or a matrix with one column
//   algebra       {"factors":[{"kind":"quantum","dim":2},...]}
//   channel       {"in_dim":n,"out_dim":m,"kraus":[matrix,...]}
//   instrument    channel fields with "kraus" a list of lists, plus "outcomes"
//   map           {"in_dim":n,"out_dim":m,"choi":matrix}  (trace-normalized)
//   scheme        {"d":int,"omega":vector,"unitaries":[matrix,...]}
//   latin square  {"order":d,"rows":[[...],...]}
//   hadamard set  {"order":d,"matrices":[matrix,...]}
//   distribution  {"p":[[i,a,b1,b2,prob],...]}
//   optimizer     {"seed":u64,"restarts":int,"max_iter":int,"tol":float}
//
// Readers throw FormatError on structural problems; semantic checks are left
// to the constructors they feed (InvariantError, DimensionError).

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "qichan/bell.hpp"
#include "qichan/channels.hpp"
#include "qichan/optimize.hpp"
#include "qichan/systems.hpp"
#include "qichan/telepo.hpp"

namespace qichan {

using Json = nlohmann::json;

class FormatError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// x rounded to `digits` significant decimal digits.
double round_significant(double x, int digits = 9);

Json to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const Json& j);

Json vector_to_json(const ComplexVector& v);
ComplexVector vector_from_json(const Json& j);

Json to_json(const Algebra& a);
Algebra algebra_from_json(const Json& j);

Json to_json(const Channel& t);
Channel channel_from_json(const Json& j, const Tolerances& tol = {});

Json to_json(const Instrument& inst);
Instrument instrument_from_json(const Json& j, const Tolerances& tol = {});

Json to_json(const ChoiMatrix& c);
/// Accepts either the map encoding or a channel (converted to its Choi matrix).
ChoiMatrix choi_from_json(const Json& j);

Json to_json(const TeleportationScheme& s);
/// Effects are recomputed from Ω and the unitaries; nothing else is checked.
TeleportationScheme scheme_from_json(const Json& j);

Json to_json(const LatinSquare& ls);
LatinSquare latin_square_from_json(const Json& j);

Json to_json(const HadamardSet& hs);
HadamardSet hadamard_set_from_json(const Json& j, const Tolerances& tol = {});

Json to_json(const JointOutcomeDistribution& d);
/// Missing entries are zero.
JointOutcomeDistribution distribution_from_json(const Json& j);

Json to_json(const OptimizerConfig& c);
/// Missing fields keep their defaults.
OptimizerConfig optimizer_config_from_json(const Json& j);

/// Parses text, mapping parse errors to FormatError.
Json parse_json(const std::string& text);
Json read_json_file(const std::string& path);

}  // namespace qichan
