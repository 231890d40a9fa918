#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "gmeas/operator.hpp"

namespace gmeas {

enum class Decision { yes, no, inconclusive };

const char* to_string(Decision d);

/// A two-sided perturbation center +/- epsilon * direction of an
/// outcome-indexed family (a single operator is a family of one).
struct Perturbation {
  std::vector<HermitianOperator> center;
  std::vector<HermitianOperator> direction;
  double epsilon = 0.0;

  std::vector<HermitianOperator> plus() const;
  std::vector<HermitianOperator> minus() const;
};

/// Payload attached to a verdict: nothing, a single operator (a class member
/// or a positive witness), or a perturbation family.
using Witness = std::variant<std::monostate, HermitianOperator, Perturbation>;

/// Result of a certification check.
struct Verdict {
  Decision decision = Decision::no;
  std::string reason;
  std::map<std::string, double> margins;
  Witness witness;

  bool holds() const { return decision == Decision::yes; }
  bool conclusive() const { return decision != Decision::inconclusive; }
  const Perturbation* perturbation() const { return std::get_if<Perturbation>(&witness); }
  const HermitianOperator* operator_witness() const { return std::get_if<HermitianOperator>(&witness); }
};

inline Decision decide(bool b) { return b ? Decision::yes : Decision::no; }

}  // namespace gmeas
