#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "gmeas/errors.hpp"
#include "gmeas/measurement.hpp"
#include "gmeas/psdgeo.hpp"
#include "gmeas/section.hpp"
#include "gmeas/tester.hpp"
#include "gmeas/verdict.hpp"

// JSON formats.  Complex scalars are [re, im] (a bare number is read as real);
// matrices are row-major nested arrays.
//
//   section    {"type": "full", "dim": d}
//              {"type": "channel", "d_in": a, "d_out": b}
//              {"type": "marginal", "sigma": M, "d_k": k, "compress_singular": true}
//              {"type": "custom", "dim": d, "basis": [M, ...]}
//   tester     {"kind": "tester", "d_in", "d_out", "outcomes": [...], "elements": [M, ...]}
//   gpovm      {"kind": "gpovm", "section": S, "outcomes": [...], "elements": [M, ...]}
//   channel    {"kind": "channel", "d_in", "d_out", "kraus": [M, ...]} or "choi": M
//   projection {"kind": "projection", "matrix": M} or "vectors": [v, ...],
//              optional "complement": true
//   state      {"kind": "state", "matrix": M}
//
// "kind" may be omitted for testers.
namespace gmeas::io {

using Json = nlohmann::json;

/// Structurally malformed input (as opposed to a well-formed but invalid object).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Json to_json(const Matrix& m);
Json to_json(const ComplexVector& v);
Json to_json(const HermitianOperator& x);
Matrix matrix_from_json(const Json& j);
ComplexVector vector_from_json(const Json& j);
HermitianOperator operator_from_json(const Json& j, const Tolerances& tol = {});

Json to_json(const SectionDescriptor& d);
Section section_from_json(const Json& j, const Tolerances& tol = {});

Json to_json(const Tester& t);
Tester tester_from_json(const Json& j, const Tolerances& tol = {});

Json to_json(const GeneralizedPOVM& m);
/// `section` overrides the section stored in the file, if any.
GeneralizedPOVM gpovm_from_json(const Json& j, const std::optional<Section>& section = std::nullopt,
                                const Tolerances& tol = {});

Json to_json(const Channel& t);
Channel channel_from_json(const Json& j, const Tolerances& tol = {});

Json to_json(const Projection& p);
Projection projection_from_json(const Json& j, const Tolerances& tol = {});

Json state_to_json(const HermitianOperator& rho);
/// Throws NotAState unless the matrix is positive with unit trace.
HermitianOperator state_from_json(const Json& j, const Tolerances& tol = {});

Json to_json(const Verdict& v);
Json to_json(const SupportCertificate& c);
Json to_json(const Tolerances& t);

/// "tester", "gpovm", "channel", "projection", "state" or "section".
std::string kind_of(const Json& j);

Json parse(const std::string& text);
Json read_file(const std::string& path);
/// Hex SHA-256 of the compact serialization.
std::string digest(const Json& j);

}  // namespace gmeas::io
