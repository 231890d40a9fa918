#pragma once

#include <memory>
#include <string>
#include <vector>

#include "gmeas/operator.hpp"
#include "gmeas/psdgeo.hpp"
#include "gmeas/section.hpp"
#include "gmeas/verdict.hpp"

namespace gmeas {

/// Positive operators {M_u} with sum in I + K^perp.  Labels are opaque; all
/// computations use the element index.
struct GeneralizedPOVM {
  Section section;
  std::vector<std::string> outcomes;
  std::vector<HermitianOperator> elements;

  std::size_t size() const { return elements.size(); }
  HermitianOperator total() const;
};

/// Builds a gPOVM with labels "0", "1", ... unless given.  Does not validate.
GeneralizedPOVM make_gpovm(const Section& section, std::vector<HermitianOperator> elements,
                           std::vector<std::string> outcomes = {});

/// The measurement pi(M): one quotient class per outcome, together with the
/// positive representative it was built from.  K-supports are computed on
/// first use and cached; the cache is not synchronized.
class GeneralizedMeasurement {
 public:
  explicit GeneralizedMeasurement(GeneralizedPOVM representative);

  const Section& section() const { return representative_.section; }
  const GeneralizedPOVM& representative() const { return representative_; }
  const std::vector<QuotientElement>& classes() const { return classes_; }
  std::size_t size() const { return classes_.size(); }

  const std::vector<SupportCertificate>& k_supports(const Tolerances& tol = {}) const;

 private:
  GeneralizedPOVM representative_;
  std::vector<QuotientElement> classes_;
  mutable std::shared_ptr<const std::vector<SupportCertificate>> ksupports_;
};

/// M = Lambda o chi_c with c = sum M_u.  Lambda lives on the corner p = s(c),
/// as r x r matrices in the basis given by p.range().
struct Decomposition {
  HermitianOperator c;
  Projection p;
  std::vector<HermitianOperator> lambda;
  /// chi_c(J) compressed to the corner, as a section on C^r.
  Section pushed_section;
  /// c^{1/2} restricted to the corner.
  HermitianOperator c_sqrt;

  /// chi_c(x) for x on the corner, embedded back into the full space.
  HermitianOperator push_forward(const HermitianOperator& x) const;
};

Verdict validate(const GeneralizedPOVM& m, const Tolerances& tol = {});
/// Outcome probabilities Tr(M_u rho); throws NotInSection unless rho is a state of K.
std::vector<double> apply(const GeneralizedPOVM& m, const HermitianOperator& rho, const Tolerances& tol = {});
GeneralizedMeasurement measurement_of(const GeneralizedPOVM& m);
/// Same measurement; throws SectionMismatch on different sections or outcome counts.
bool equivalent(const GeneralizedPOVM& m, const GeneralizedPOVM& n, const Tolerances& tol = {});

/// Extremality among gPOVMs: the map (D_u) -> proj_J(sum D_u) on
/// (+)_u A^h_{s(M_u)} is injective.  A "no" carries a Perturbation of M.
Verdict is_extremal_gpovm(const GeneralizedPOVM& m, const Tolerances& tol = {});
/// Extremality of pi(M): every (D_u) in (+)_u A^h_{s_K(M_u)} with sum in K^perp
/// has all D_u in K^perp.  A "no" carries a Perturbation around the
/// maximal-support representatives whose two ends are inequivalent.
Verdict is_extremal_measurement(const GeneralizedMeasurement& m, const Tolerances& tol = {});
Verdict is_extremal_measurement(const GeneralizedPOVM& m, const Tolerances& tol = {});
/// sum_u dim(s_u J s_u) <= dim J over the K-supports s_u; "no" rules out
/// extremality of pi(M).
Verdict dimension_bound(const GeneralizedMeasurement& m, const Tolerances& tol = {});

Decomposition decompose(const GeneralizedPOVM& m, const Tolerances& tol = {});
/// Lambda as a gPOVM on the pushed section.
GeneralizedPOVM lambda_povm(const GeneralizedPOVM& m, const Decomposition& dec);

/// Runs the gPOVM engine on Lambda.  With cross_check the direct engine runs
/// too and a disagreement throws CrossCheckFailure.  Witnesses are mapped back
/// through chi_c.
Verdict extremal_gpovm_via_decomposition(const GeneralizedPOVM& m, const Tolerances& tol = {},
                                         bool cross_check = false);
/// Runs the measurement engine on Lambda when s(c) is the join of the
/// K-supports; inconclusive otherwise.
Verdict extremal_measurement_via_decomposition(const GeneralizedPOVM& m, const Tolerances& tol = {},
                                               bool cross_check = false);

/// dim(s J s) for the compression of J to the range of s.
Index compressed_dimension(const HermSubspace& j, const Projection& s, const Tolerances& tol = {});
/// Projection onto the span of the ranges.
Projection projection_join(std::span<const Projection> projections, const Tolerances& tol = {});

/// Elements idempotent and mutually orthogonal within tol.num.
bool is_pvm(std::span<const HermitianOperator> elements, const Tolerances& tol = {});

}  // namespace gmeas
