#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gmeas/operator.hpp"
#include "gmeas/subspace.hpp"

namespace gmeas {

enum class SectionKind { full, channel, marginal, custom };

const char* to_string(SectionKind k);

/// Parameters that rebuild a section through its constructor.
struct SectionDescriptor {
  SectionKind kind = SectionKind::full;
  Index dim = 0;
  Index d_in = 0;
  Index d_out = 0;
  std::optional<HermitianOperator> sigma;
  Index d_k = 0;
  bool compress_singular = true;
  std::vector<HermitianOperator> basis;
};

/// A section K = J \cap S(A) of the state space of a full matrix algebra.
///
/// J is always the real span of K, K^perp its trace-orthogonal complement,
/// and the witness a state of K of maximal support.  Instances are immutable
/// and cheap to copy.
class Section {
 public:
  Index dim() const { return data_->dim; }
  const HermSubspace& span() const { return data_->span; }
  const HermSubspace& annihilator() const { return data_->annihilator; }
  const HermitianOperator& witness() const { return data_->witness; }
  const std::optional<TensorShape>& shape() const { return data_->shape; }
  const SectionDescriptor& descriptor() const { return data_->descriptor; }
  /// Isometry from this section's space into the space it was compressed
  /// from, if any.
  const std::optional<Matrix>& embedding() const { return data_->embedding; }
  bool witness_full_rank() const { return data_->witness_min_eigenvalue > 0.0; }

  /// Upper bound on Tr(b) over the positive members b of the class of a,
  /// available when the witness has full rank.
  std::optional<double> class_trace_bound(const HermitianOperator& a) const;

  /// rho in J, positive, trace one.
  bool contains_state(const HermitianOperator& rho, const Tolerances& tol = {}) const;
  /// Maps an operator of this section's space back to the original space.
  HermitianOperator lift(const HermitianOperator& x) const;
  bool same_as(const Section& other, const Tolerances& tol = {}) const;

  /// Builds a section directly; J must be the span of J \cap S(A) and the
  /// witness a maximal-support state in it.
  static Section from_parts(HermSubspace span, HermitianOperator witness, SectionDescriptor descriptor,
                            std::optional<TensorShape> shape = std::nullopt,
                            std::optional<Matrix> embedding = std::nullopt);

 private:
  struct Data {
    Index dim = 0;
    HermSubspace span;
    HermSubspace annihilator;
    HermitianOperator witness;
    double witness_min_eigenvalue = 0.0;
    std::optional<TensorShape> shape;
    std::optional<Matrix> embedding;
    SectionDescriptor descriptor;
  };
  std::shared_ptr<const Data> data_;
};

Section full_state_space(Index d);
/// States of the form X / d_in with X the Choi matrix of a channel from a
/// d_in-dimensional input to a d_out-dimensional output (output factor first).
Section channel_section(Index d_in, Index d_out);
/// States rho on K (x) H with Tr_K rho = sigma.  A singular sigma compresses the
/// ambient space to K (x) supp(sigma) unless `compress_singular` is false.
Section fixed_marginal_section(const HermitianOperator& sigma, Index d_k, bool compress_singular = true,
                               const Tolerances& tol = {});
/// Section generated by the real span of `spanning`; throws EmptySection if the
/// span contains no state.
Section custom_section(Index d, std::span<const HermitianOperator> spanning, const Tolerances& tol = {});

/// Canonical member of the class a + K^perp: its orthogonal projection onto J.
struct QuotientElement {
  HermitianOperator representative;
  Section section;

  bool equals(const QuotientElement& other, const Tolerances& tol = {}) const;
};

QuotientElement quotient(const Section& section, const HermitianOperator& a);
/// A positive member of a + K^perp, or nothing if the class has none.
std::optional<HermitianOperator> positive_representative(const Section& section, const HermitianOperator& a,
                                                         const Tolerances& tol = {});
/// Restricts the section to the corner p A p; p must dominate the witness support.
Section compress_section(const Section& section, const Projection& p, const Tolerances& tol = {});

}  // namespace gmeas
