#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gmeas/measurement.hpp"
#include "gmeas/operator.hpp"
#include "gmeas/section.hpp"
#include "gmeas/verdict.hpp"

namespace gmeas {

/// Completely positive trace-preserving map from C^{d_in} to C^{d_out}.
/// Kraus operators are d_out x d_in; the Choi matrix sum_ij T(|i><j|) (x) |i><j|
/// lives on out (x) in.
class Channel {
 public:
  static Channel from_kraus(std::vector<Matrix> kraus, const Tolerances& tol = {});
  /// Kraus operators are recovered from the spectral decomposition.
  static Channel from_choi(Index d_in, Index d_out, const HermitianOperator& choi, const Tolerances& tol = {});

  Index d_in() const { return d_in_; }
  Index d_out() const { return d_out_; }
  const std::vector<Matrix>& kraus() const { return kraus_; }
  const HermitianOperator& choi() const { return choi_; }

 private:
  Index d_in_ = 0;
  Index d_out_ = 0;
  std::vector<Matrix> kraus_;
  HermitianOperator choi_;
};

HermitianOperator choi_of(const Channel& t);
/// T(rho) = Tr_in(X_T (I (x) rho^T)).
HermitianOperator apply_channel(const Channel& t, const HermitianOperator& rho);
/// T(rho) = sum_k K_k rho K_k^dagger.
HermitianOperator apply_kraus(const Channel& t, const HermitianOperator& rho);
/// (T (x) id)(x) for x on in (x) L, via the Kraus operators.
HermitianOperator apply_kraus_extended(const Channel& t, const HermitianOperator& x, Index d_l);

/// Quantum 1-tester: positive M_u on out (x) in with sum I_out (x) sigma.
struct Tester {
  Index d_in = 0;
  Index d_out = 0;
  std::vector<std::string> outcomes;
  std::vector<HermitianOperator> elements;
  HermitianOperator sigma;

  TensorShape shape() const { return {d_out, d_in}; }
  /// Tr(M_u X_T) for each outcome.
  std::vector<double> probabilities(const Channel& t) const;
};

/// Checks positivity and the marginal condition; throws NotATester.
Tester make_tester(Index d_in, Index d_out, std::vector<HermitianOperator> elements,
                   std::vector<std::string> outcomes = {}, const Tolerances& tol = {});

/// d_in * M_u on the channel section.
GeneralizedPOVM tester_to_gpovm(const Tester& t);
GeneralizedPOVM tester_to_gpovm(const Tester& t, const Section& channel);
/// Inverse of tester_to_gpovm; throws NotATester unless the section is a channel section.
Tester gpovm_to_tester(const GeneralizedPOVM& m, const Tolerances& tol = {});

/// M = Lambda o chi_{I (x) sigma} with Lambda on out (x) qH, q = s(sigma), and
/// the preparation xi on in (x) qH.
struct TesterDecomposition {
  HermitianOperator sigma;
  Projection q;
  /// POVM on out (x) C^{rank q}; sum is the identity.
  std::vector<HermitianOperator> lambda;
  /// Pure state on in (x) C^{rank q}; tracing out the second factor gives sigma^T.
  HermitianOperator xi;

  Index corner_rank() const { return q.rank(); }
};

TesterDecomposition tester_decompose(const Tester& t, const Tolerances& tol = {});
/// Tr(Lambda_u (T (x) id)(xi)), computed through the Kraus operators.
std::vector<double> implemented_probabilities(const TesterDecomposition& dec, const Channel& t);

/// {y Hermitian on the second factor : [x, I (x) y] = 0}.
HermSubspace partial_commutant(const HermitianOperator& x, TensorShape shape, const Tolerances& tol = {});

/// Block form e (x) |psi><psi| + f (x) |psi_perp><psi_perp| of a projection on
/// out (x) C^2, with e, f projections.
struct BlockForm {
  ComplexVector psi;
  ComplexVector psi_perp;
  HermitianOperator e;
  HermitianOperator f;
};
/// Detects the block form through the partial commutant.
std::optional<BlockForm> detect_block_form(const HermitianOperator& lambda0, Index d_out, const Tolerances& tol = {});

struct QubitReport {
  Verdict tester;
  /// rank1-PVM | rank2-PVM-not-form-1
  std::string tester_reason;

  std::optional<Verdict> measurement;
  /// PK-membership | marginal-condition
  std::string measurement_reason;

  /// Agreement of the fast path with independent engines, by engine name.
  std::map<std::string, bool> cross_checks;
  /// The marginal distance lies in the band where the engines resolve it
  /// differently; measurement checks are then recorded but not required.
  bool near_threshold = false;

  /// All required checks agree.
  bool all_agree() const;
};

/// Tester extremality for a two-outcome tester with a qubit input.
QubitReport qubit_tester_extremal(const Tester& t, const Tolerances& tol = {}, bool cross_check = true);
/// Tester and measurement extremality for a two-outcome qubit-to-qubit tester.
QubitReport qubit_measurement_extremal(const Tester& t, const Tolerances& tol = {}, bool cross_check = true);

/// M_1 = (I (x) sigma^{1/2}) |phi><phi| (I (x) sigma^{1/2}), M_2 = I (x) sigma - M_1
/// with phi = cos(theta)|00> + sin(theta)|11>.
Tester example5_tester(double theta, const HermitianOperator& sigma, const Tolerances& tol = {});
ComplexVector example5_vector(double theta);

/// Fast rank-based facts and generic verdicts for a class in a fixed-marginal section.
struct ClassReport {
  Index rank = 0;
  Index d_h = 0;
  Index d_k = 0;
  /// Rank-based implications that apply; unset when the rank does not decide.
  std::optional<bool> singleton_by_rank;
  std::optional<bool> extreme_by_rank;
  Verdict extreme_point;
  Verdict singleton;
  SupportCertificate k_support;
  /// In the 2 x 2 case: singleton iff s_K(a) != I.
  std::optional<bool> singleton_by_support;
  /// All applicable implications agree with the generic verdicts.
  bool consistent = true;
};

ClassReport class_analysis(const Section& marginal, const HermitianOperator& a, const Tolerances& tol = {});

}  // namespace gmeas
