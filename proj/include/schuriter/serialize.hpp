#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "schuriter/contraction.hpp"
#include "schuriter/schuralg.hpp"
#include "schuriter/systems.hpp"

namespace schuriter {

using Json = nlohmann::ordered_json;

/// Malformed documents: bad JSON, missing fields, wrong element counts.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// {"rows": r, "cols": c, "data": [[re, im], ...]} in row-major order.
Json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const Json& j);

// {"m", "n", "h", "k", "D", "C", "B", "A"}
Json block_to_json(const BlockMatrix& t);
BlockMatrix block_from_json(const Json& j);

Json classification_to_json(const Classification& c);
Json profile_to_json(const DefectProfile& p);
Json chain_to_json(const SchurChain& chain);
Json report_to_json(const ChainReport& r);

// Parses text; throws ParseError on syntax errors.
Json parse_json(const std::string& text);

/// Serializes with every floating point number written with 17 significant
/// digits, so equal inputs give byte-identical output.
std::string dump_fixed(const Json& j, int indent = 2);

}  // namespace schuriter
