#pragma once

// JSON serialization for everything the CLI reads and writes.
//
// On-disk schemas:
//   function:  {"arity": n, "table": [0/1, ...]}                 (2^n entries)
//   relation:  {"arity": n, "k": K, "incidence": [[0/1, ...]]}   (2^n rows)
//   matrix:    {"rows": r, "cols": c, "data": [row-major reals]}
//   witness:   {"dim": d, "u": {"x,i": [reals], ...}, "v": {...},
//               "sigma": {"x,a": [reals], ...}}
//     with x a 0-based input label and i, a 1-based coordinate / symbol
//     indices; absent keys mean zero (u, v) or structurally absent (sigma).
//     Witness files additionally carry "arity" (and "alphabet") so they are
//     self-describing.
//
// Malformed documents (parse errors, missing or mistyped fields, non-finite
// numbers, out-of-range indices) surface as ConfigError.

#include <string>

#include "advlab/adversary.hpp"
#include "advlab/boolfn.hpp"
#include "advlab/compose.hpp"
#include "advlab/matrix.hpp"
#include "json.hpp"

namespace advlab {

using Json = nlohmann::ordered_json;

Json to_json(const BooleanFunction& g);
Json to_json(const Relation& f);
Json to_json(const DenseMatrix& m);
Json to_json(const FunctionalDualWitness& w);
Json to_json(const RelationalDualWitness& w);
Json to_json(const BoundCertificate& cert);
Json to_json(const VerifiabilityReport& rep);
Json to_json(const CompositionReport& rep);

BooleanFunction function_from_json(const Json& j);
Relation relation_from_json(const Json& j);
DenseMatrix matrix_from_json(const Json& j);
FunctionalDualWitness functional_witness_from_json(const Json& j);
RelationalDualWitness relational_witness_from_json(const Json& j);

Json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const Json& doc);

// 2-space indentation with a trailing newline; the single rendering used for
// files and stdout so byte-level comparisons are meaningful.
std::string pretty(const Json& doc);

}  // namespace advlab
