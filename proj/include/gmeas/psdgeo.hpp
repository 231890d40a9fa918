#pragma once

#include <optional>
#include <span>

#include "gmeas/operator.hpp"
#include "gmeas/section.hpp"
#include "gmeas/subspace.hpp"
#include "gmeas/verdict.hpp"

namespace gmeas {

/// C = {base + x : x in directions, base + x >= 0}.
struct Spectrahedron {
  HermitianOperator base;
  HermSubspace directions;
  /// Known upper bound on Tr(X) over C, if any.
  std::optional<double> trace_bound;

  /// The positive part of the class a + K^perp, with the trace bound coming
  /// from a full-rank witness.
  static Spectrahedron of_class(const Section& section, const HermitianOperator& a);
};

/// Largest-support point of a spectrahedron, with evidence.
struct SupportCertificate {
  Projection support;
  /// A point of C with support exactly `support`.
  HermitianOperator point;
  /// Upper bound on max over C of Tr((I - support) X).
  double residual = 0.0;
  /// Smallest eigenvalue of `point` compressed to its support.
  double interior_margin = 0.0;
  /// Z >= 0, orthogonal to the affine hull of C, positive definite on I - support.
  std::optional<HermitianOperator> dual_witness;
  int iterations = 0;
};

struct LinearMaximum {
  double value = 0.0;
  HermitianOperator maximizer;
  /// Solver's bound on the distance to the optimum.
  double gap = 0.0;
};

/// max over C of Tr(P X).  Throws Infeasible if C is empty.
LinearMaximum max_linear(const Spectrahedron& c, const HermitianOperator& objective, const Tolerances& tol = {});

/// Some positive member of base + directions, or nothing.  Of maximal support
/// when a trace bound is given, of minimal trace otherwise.
std::optional<HermitianOperator> feasible_point(const HermitianOperator& base, const HermSubspace& directions,
                                                const Tolerances& tol = {},
                                                std::optional<double> trace_bound = std::nullopt);

/// Throws Infeasible if C is empty.
SupportCertificate max_support_element(const Spectrahedron& c, const Tolerances& tol = {});

/// The K-support s_K(a): the largest support among positive members of a + K^perp.
SupportCertificate k_support(const Section& section, const HermitianOperator& a, const Tolerances& tol = {});

/// Whether p = I - s(b) for some b in the cone generated by K.  The witness b
/// is attached when the answer is yes; margin "interior" is the smallest
/// eigenvalue of the normalized b on I - p.
Verdict is_in_pk(const Section& section, const Projection& p, const Tolerances& tol = {});

/// Projection onto the intersection of the ranges.
Projection projection_meet(std::span<const Projection> projections, const Tolerances& tol = {});

/// Whether a is an extreme point of the positive part of its class.
Verdict class_is_extreme_point(const Section& section, const HermitianOperator& a, const Tolerances& tol = {});

/// Whether a is the only positive member of its class.  When not, the
/// witness is a second positive class member.
Verdict class_is_singleton(const Section& section, const HermitianOperator& a, const Tolerances& tol = {});

/// Largest t with x + t d >= 0 on the support of x (x positive definite there,
/// d supported inside it).  Returns +infinity if d <= 0.
double max_step(const HermitianOperator& x, const HermitianOperator& d, const Tolerances& tol = {});

}  // namespace gmeas
