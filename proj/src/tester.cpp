#include "gmeas/tester.hpp"

#include <cmath>

#include "gmeas/errors.hpp"
#include "gmeas/psdgeo.hpp"

namespace gmeas {

namespace {

// (K (x) I) |psi> with |psi> = sum_i |i>|i>, indexed (o, i) -> o * d_in + i.
ComplexVector kraus_vector(const Matrix& k) {
  const Index d_out = k.rows();
  const Index d_in = k.cols();
  ComplexVector v(d_out * d_in);
  for (Index o = 0; o < d_out; ++o)
    for (Index i = 0; i < d_in; ++i) v[o * d_in + i] = k(o, i);
  return v;
}

void require_two_outcome_qubit_input(const Tester& t) {
  if (t.d_in != 2) throw WrongShape("qubit fast path needs a two-dimensional input");
  if (t.elements.size() != 2) throw WrongShape("qubit fast path needs exactly two outcomes");
}

bool same_decision(const Verdict& a, const Verdict& b) { return a.decision == b.decision; }

}  // namespace

Channel Channel::from_kraus(std::vector<Matrix> kraus, const Tolerances& tol) {
  if (kraus.empty()) throw NotAChannel("channel needs at least one Kraus operator");
  Channel t;
  t.d_out_ = kraus.front().rows();
  t.d_in_ = kraus.front().cols();
  Matrix sum = Matrix::Zero(t.d_in_, t.d_in_);
  Matrix choi = Matrix::Zero(t.d_out_ * t.d_in_, t.d_out_ * t.d_in_);
  for (const auto& k : kraus) {
    if (k.rows() != t.d_out_ || k.cols() != t.d_in_) throw NotAChannel("Kraus operators differ in shape");
    sum += k.adjoint() * k;
    const ComplexVector v = kraus_vector(k);
    choi += v * v.adjoint();
  }
  const double err = (sum - Matrix::Identity(t.d_in_, t.d_in_)).norm();
  if (err > 1e2 * tol.num * std::sqrt(static_cast<double>(t.d_in_))) {
    throw NotAChannel("Kraus operators are not trace preserving (error " + std::to_string(err) + ")");
  }
  t.kraus_ = std::move(kraus);
  t.choi_ = HermitianOperator::hermitian_part(choi);
  return t;
}

Channel Channel::from_choi(Index d_in, Index d_out, const HermitianOperator& choi, const Tolerances& tol) {
  if (choi.dim() != d_in * d_out) throw NotAChannel("Choi matrix has the wrong size");
  if (!choi.is_psd(tol)) throw NotAChannel("Choi matrix is not positive");
  const HermitianOperator marginal = partial_trace(choi, {d_out, d_in}, Factor::first);
  if (!approx_equal(marginal, HermitianOperator::identity(d_in), Tolerances{tol.herm, tol.rank, 1e2 * tol.num, tol.sdp})) {
    throw NotAChannel("Choi matrix marginal is not the identity");
  }
  const Spectrum sp = choi.spectrum();
  const double cut = tol.rank * std::max(1.0, choi.norm());
  std::vector<Matrix> kraus;
  for (Index k = 0; k < sp.values.size(); ++k) {
    if (sp.values[k] <= cut) continue;
    Matrix op(d_out, d_in);
    for (Index o = 0; o < d_out; ++o)
      for (Index i = 0; i < d_in; ++i) op(o, i) = std::sqrt(sp.values[k]) * sp.vectors(o * d_in + i, k);
    kraus.push_back(std::move(op));
  }
  Channel t = from_kraus(std::move(kraus), Tolerances{tol.herm, tol.rank, 1e2 * tol.num, tol.sdp});
  t.choi_ = choi;
  return t;
}

HermitianOperator choi_of(const Channel& t) { return t.choi(); }

HermitianOperator apply_channel(const Channel& t, const HermitianOperator& rho) {
  if (rho.dim() != t.d_in()) throw DimensionMismatch("apply_channel: input dimension mismatch");
  const Matrix lifted = kron(Matrix::Identity(t.d_out(), t.d_out()), rho.matrix().transpose());
  return HermitianOperator::hermitian_part(
      partial_trace(Matrix(t.choi().matrix() * lifted), {t.d_out(), t.d_in()}, Factor::second));
}

HermitianOperator apply_kraus(const Channel& t, const HermitianOperator& rho) {
  if (rho.dim() != t.d_in()) throw DimensionMismatch("apply_kraus: input dimension mismatch");
  Matrix out = Matrix::Zero(t.d_out(), t.d_out());
  for (const auto& k : t.kraus()) out += k * rho.matrix() * k.adjoint();
  return HermitianOperator::hermitian_part(out);
}

HermitianOperator apply_kraus_extended(const Channel& t, const HermitianOperator& x, Index d_l) {
  if (x.dim() != t.d_in() * d_l) throw DimensionMismatch("apply_kraus_extended: input dimension mismatch");
  const Matrix id = Matrix::Identity(d_l, d_l);
  Matrix out = Matrix::Zero(t.d_out() * d_l, t.d_out() * d_l);
  for (const auto& k : t.kraus()) {
    const Matrix big = kron(k, id);
    out += big * x.matrix() * big.adjoint();
  }
  return HermitianOperator::hermitian_part(out);
}

std::vector<double> Tester::probabilities(const Channel& t) const {
  if (t.d_in() != d_in || t.d_out() != d_out) throw DimensionMismatch("tester and channel dimensions differ");
  std::vector<double> p;
  for (const auto& e : elements) p.push_back(inner(e, t.choi()));
  return p;
}

Tester make_tester(Index d_in, Index d_out, std::vector<HermitianOperator> elements, std::vector<std::string> outcomes,
                   const Tolerances& tol) {
  if (elements.empty()) throw NotATester("tester needs at least one outcome");
  if (outcomes.empty()) {
    for (std::size_t u = 0; u < elements.size(); ++u) outcomes.push_back(std::to_string(u));
  }
  if (outcomes.size() != elements.size()) throw NotATester("label count differs from element count");
  const Index d = d_in * d_out;
  HermitianOperator total = HermitianOperator::zero(d);
  for (std::size_t u = 0; u < elements.size(); ++u) {
    if (elements[u].dim() != d) throw NotATester("element " + outcomes[u] + " has the wrong size");
    if (!elements[u].is_psd(tol)) throw NotATester("element " + outcomes[u] + " is not positive");
    total += elements[u];
  }
  const HermitianOperator sigma = partial_trace(total, {d_out, d_in}, Factor::first) / static_cast<double>(d_out);
  const HermitianOperator expected = tensor(HermitianOperator::identity(d_out), sigma);
  if ((total - expected).frobenius() > 1e2 * tol.num * std::max(1.0, total.frobenius())) {
    throw NotATester("not a tester: sum of elements is not of the form I (x) sigma");
  }
  if (std::abs(sigma.trace() - 1.0) > 1e2 * tol.num) throw NotATester("not a tester: sigma does not have trace one");
  return {d_in, d_out, std::move(outcomes), std::move(elements), sigma};
}

GeneralizedPOVM tester_to_gpovm(const Tester& t) { return tester_to_gpovm(t, channel_section(t.d_in, t.d_out)); }

GeneralizedPOVM tester_to_gpovm(const Tester& t, const Section& channel) {
  if (channel.dim() != t.d_in * t.d_out) throw DimensionMismatch("tester_to_gpovm: section dimension mismatch");
  std::vector<HermitianOperator> scaled;
  for (const auto& e : t.elements) scaled.push_back(static_cast<double>(t.d_in) * e);
  return make_gpovm(channel, std::move(scaled), t.outcomes);
}

Tester gpovm_to_tester(const GeneralizedPOVM& m, const Tolerances& tol) {
  const SectionDescriptor& desc = m.section.descriptor();
  if (desc.kind != SectionKind::channel) throw NotATester("gpovm_to_tester: not a channel section");
  std::vector<HermitianOperator> scaled;
  for (const auto& e : m.elements) scaled.push_back(e / static_cast<double>(desc.d_in));
  return make_tester(desc.d_in, desc.d_out, std::move(scaled), m.outcomes, tol);
}

TesterDecomposition tester_decompose(const Tester& t, const Tolerances& tol) {
  TesterDecomposition dec;
  dec.sigma = t.sigma;
  dec.q = support(t.sigma, tol);
  const Matrix& q = dec.q.range();
  const Index r = dec.q.rank();
  const HermitianOperator sigma_r = congruence(q.adjoint(), t.sigma);
  const Matrix corner = kron(Matrix::Identity(t.d_out, t.d_out), q);
  const Matrix w = kron(Matrix::Identity(t.d_out, t.d_out), pinv_sqrt(sigma_r, tol).matrix());
  for (const auto& e : t.elements) dec.lambda.push_back(congruence(w, congruence(corner.adjoint(), e)));

  // xi = (I (x) B)|psi><psi|(I (x) B)^dagger with B = q^dagger sigma^{1/2}.
  const Matrix b = q.adjoint() * sqrt_psd(t.sigma, tol).matrix();
  ComplexVector x(t.d_in * r);
  for (Index i = 0; i < t.d_in; ++i)
    for (Index a = 0; a < r; ++a) x[i * r + a] = b(a, i);
  dec.xi = HermitianOperator::outer(x);
  return dec;
}

std::vector<double> implemented_probabilities(const TesterDecomposition& dec, const Channel& t) {
  const HermitianOperator out = apply_kraus_extended(t, dec.xi, dec.corner_rank());
  std::vector<double> p;
  for (const auto& l : dec.lambda) p.push_back(inner(l, out));
  return p;
}

HermSubspace partial_commutant(const HermitianOperator& x, TensorShape shape, const Tolerances& tol) {
  if (x.dim() != shape.total()) throw DimensionMismatch("partial_commutant: shape mismatch");
  const Index d_h = shape.second;
  const Matrix id = Matrix::Identity(shape.first, shape.first);
  const auto basis = hermitian_basis(d_h);
  RealMatrix cols(x.dim() * x.dim(), d_h * d_h);
  for (Index k = 0; k < d_h * d_h; ++k) {
    const Matrix y = kron(id, basis[static_cast<std::size_t>(k)].matrix());
    const Matrix comm = Complex(0.0, 1.0) * (x.matrix() * y - y * x.matrix());
    cols.col(k) = vectorize_matrix(comm);
  }
  const double threshold = tol.sdp * std::max(1.0, x.norm());
  return HermSubspace(d_h, null_space(cols, threshold));
}

std::optional<BlockForm> detect_block_form(const HermitianOperator& lambda0, Index d_out, const Tolerances& tol) {
  if (lambda0.dim() != 2 * d_out) throw WrongShape("detect_block_form: expects out (x) C^2");
  const HermSubspace comm = partial_commutant(lambda0, {d_out, 2}, tol);
  if (comm.dim() <= 1) return std::nullopt;
  // Pick the commutant element farthest from the scalars.
  HermitianOperator best;
  double best_norm = -1.0;
  for (const auto& y : comm.elements()) {
    const HermitianOperator traceless = y - HermitianOperator::identity(2) * (y.trace() / 2.0);
    if (traceless.frobenius() > best_norm) {
      best_norm = traceless.frobenius();
      best = traceless;
    }
  }
  const Spectrum sp = best.spectrum();
  BlockForm form;
  form.psi = sp.vectors.col(1);
  form.psi_perp = sp.vectors.col(0);
  const Matrix id = Matrix::Identity(d_out, d_out);
  form.e = congruence(kron(id, form.psi).adjoint(), lambda0);
  form.f = congruence(kron(id, form.psi_perp).adjoint(), lambda0);
  const HermitianOperator rebuilt =
      tensor(form.e, HermitianOperator::outer(form.psi)) + tensor(form.f, HermitianOperator::outer(form.psi_perp));
  const std::vector<HermitianOperator> ef{form.e};
  const std::vector<HermitianOperator> ff{form.f};
  if (!approx_equal(rebuilt, lambda0, Tolerances{tol.herm, tol.rank, 1e2 * tol.num, tol.sdp})) return std::nullopt;
  if (!is_pvm(ef, tol) || !is_pvm(ff, tol)) return std::nullopt;
  return form;
}

bool QubitReport::all_agree() const {
  for (const auto& [name, ok] : cross_checks) {
    if (!ok && !(near_threshold && name.rfind("measurement:", 0) == 0)) return false;
  }
  return true;
}

QubitReport qubit_tester_extremal(const Tester& t, const Tolerances& tol, bool cross_check) {
  require_two_outcome_qubit_input(t);
  const TesterDecomposition dec = tester_decompose(t, tol);
  QubitReport report;
  Verdict& v = report.tester;
  const Index r = dec.corner_rank();
  v.margins["sigma_rank"] = static_cast<double>(r);
  const bool pvm = is_pvm(dec.lambda, tol);
  if (r == 1) {
    report.tester_reason = "rank1-PVM";
    v.decision = decide(pvm);
    v.reason = pvm ? "rank-one sigma and projective elements" : "rank-one sigma and a non-projective element";
  } else {
    report.tester_reason = "rank2-PVM-not-form-1";
    const HermSubspace comm = partial_commutant(dec.lambda.front(), {t.d_out, 2}, tol);
    v.margins["commutant_dim"] = static_cast<double>(comm.dim());
    if (!pvm) {
      v.decision = Decision::no;
      v.reason = "implementing POVM is not projective";
    } else if (detect_block_form(dec.lambda.front(), t.d_out, tol)) {
      v.decision = Decision::no;
      v.reason = "first element is block diagonal e (x) psi + f (x) psi_perp";
    } else {
      v.decision = Decision::yes;
      v.reason = "projective and not block diagonal";
    }
  }
  if (cross_check) {
    const Verdict generic = is_extremal_gpovm(tester_to_gpovm(t), tol);
    report.cross_checks["tester:generic"] = same_decision(v, generic);
    if (!v.holds()) v.witness = generic.witness;
  }
  return report;
}

QubitReport qubit_measurement_extremal(const Tester& t, const Tolerances& tol, bool cross_check) {
  require_two_outcome_qubit_input(t);
  if (t.d_out != 2) throw WrongShape("qubit measurement fast path needs a two-dimensional output");
  QubitReport report = qubit_tester_extremal(t, tol, cross_check);
  const TesterDecomposition dec = tester_decompose(t, tol);
  const Section channel = channel_section(t.d_in, t.d_out);

  // Tester extremality together with s(M_u) in P_K.
  Verdict by_pk;
  by_pk.decision = report.tester.decision;
  by_pk.reason = report.tester.holds() ? "tester extremal" : "tester not extremal";
  if (report.tester.holds()) {
    for (std::size_t u = 0; u < t.elements.size(); ++u) {
      const Verdict pk = is_in_pk(channel, support(t.elements[u], tol), tol);
      by_pk.margins["pk_interior_" + t.outcomes[u]] = pk.margins.count("interior") ? pk.margins.at("interior") : 0.0;
      if (!pk.holds()) {
        by_pk.decision = Decision::no;
        by_pk.reason = "support of element " + t.outcomes[u] + " is not in P_K";
      }
    }
    if (by_pk.holds()) by_pk.reason = "tester extremal and every support in P_K";
  }

  // Rank-one implementing element with full-rank sigma: extremal iff its
  // marginal equals sigma.
  std::optional<Verdict> by_marginal;
  if (dec.corner_rank() == 2) {
    const HermitianOperator sigma_r = congruence(dec.q.range().adjoint(), t.sigma);
    for (std::size_t u = 0; u < dec.lambda.size(); ++u) {
      const HermitianOperator& l = dec.lambda[u];
      const std::vector<HermitianOperator> single{l};
      if (support(l, tol).rank() != 1 || !is_pvm(single, tol)) continue;
      const HermitianOperator marginal = partial_trace(l, {t.d_out, 2}, Factor::first);
      Verdict m;
      const double gap = (marginal - sigma_r).frobenius();
      m.margins["marginal_distance"] = gap;
      // Class members leaving the support grow with the square of this distance.
      m.decision = decide(gap * gap <= tol.after_solve());
      report.near_threshold = gap > 10.0 * tol.num && gap < 3.0 * std::sqrt(tol.after_solve());
      m.reason = m.holds() ? "rank-one element with marginal sigma" : "rank-one element with marginal other than sigma";
      by_marginal = m;
      break;
    }
  }

  if (by_marginal) {
    report.measurement = *by_marginal;
    report.measurement_reason = "marginal-condition";
    report.cross_checks["measurement:pk-membership"] = same_decision(*by_marginal, by_pk);
  } else {
    report.measurement = by_pk;
    report.measurement_reason = "PK-membership";
  }

  if (cross_check) {
    const GeneralizedPOVM m = tester_to_gpovm(t, channel);
    const Verdict generic = is_extremal_measurement(m, tol);
    report.cross_checks["measurement:generic"] = same_decision(*report.measurement, generic);
    if (!report.measurement->holds()) report.measurement->witness = generic.witness;

    // Implementing-POVM form: Lambda extremal as a tester on qH and
    // s(Lambda_u) in P of the fixed-marginal section for sigma on qH.
    const Index r = dec.corner_rank();
    std::vector<HermitianOperator> scaled;
    for (const auto& l : dec.lambda) scaled.push_back(l / static_cast<double>(r));
    const Tester lambda_tester = make_tester(r, t.d_out, scaled, t.outcomes, tol);
    bool by_lambda = is_extremal_gpovm(tester_to_gpovm(lambda_tester), tol).holds();
    if (by_lambda) {
      const HermitianOperator sigma_r = congruence(dec.q.range().adjoint(), t.sigma);
      const Section marginal = fixed_marginal_section(sigma_r / sigma_r.trace(), t.d_out, true, tol);
      for (const auto& l : dec.lambda) by_lambda = by_lambda && is_in_pk(marginal, support(l, tol), tol).holds();
    }
    report.cross_checks["measurement:decomposition"] = report.measurement->holds() == by_lambda;
  }
  return report;
}

ComplexVector example5_vector(double theta) {
  ComplexVector phi = ComplexVector::Zero(4);
  phi[0] = std::cos(theta);
  phi[3] = std::sin(theta);
  return phi;
}

Tester example5_tester(double theta, const HermitianOperator& sigma, const Tolerances& tol) {
  if (sigma.dim() != 2) throw WrongShape("example5_tester: sigma must be a qubit state");
  if (!sigma.is_psd(tol) || std::abs(sigma.trace() - 1.0) > 1e2 * tol.num) throw NotAState("example5_tester: sigma is not a state");
  if (support(sigma, tol).rank() < 2) throw SigmaSingular("example5_tester: sigma must have full rank");
  const Matrix root = kron(Matrix::Identity(2, 2), sqrt_psd(sigma, tol).matrix());
  const HermitianOperator m1 = congruence(root, HermitianOperator::outer(example5_vector(theta)));
  const HermitianOperator m2 = tensor(HermitianOperator::identity(2), sigma) - m1;
  return make_tester(2, 2, {m1, m2}, {"1", "2"}, tol);
}

ClassReport class_analysis(const Section& marginal, const HermitianOperator& a, const Tolerances& tol) {
  const SectionDescriptor& desc = marginal.descriptor();
  if (desc.kind != SectionKind::marginal || !desc.sigma) throw WrongShape("class_analysis: needs a fixed-marginal section");
  if (support(*desc.sigma, tol).rank() < desc.sigma->dim()) {
    throw SigmaSingular("class_analysis: sigma must have full rank; compress first");
  }
  ClassReport rep;
  rep.d_h = desc.sigma->dim();
  rep.d_k = desc.d_k;
  rep.rank = support(a, tol).rank();
  const Index dim_j = rep.d_h * rep.d_h * rep.d_k * rep.d_k - rep.d_h * rep.d_h + 1;
  if (rep.rank < rep.d_k) rep.singleton_by_rank = true;
  if (rep.rank * rep.rank > dim_j) rep.singleton_by_rank = false;
  if (rep.rank < 2 * rep.d_k) rep.extreme_by_rank = true;

  rep.extreme_point = class_is_extreme_point(marginal, a, tol);
  rep.singleton = class_is_singleton(marginal, a, tol);
  rep.k_support = k_support(marginal, a, tol);
  if (rep.d_h == 2 && rep.d_k == 2) rep.singleton_by_support = rep.k_support.support.rank() != 4;

  if (rep.singleton_by_rank && *rep.singleton_by_rank != rep.singleton.holds()) rep.consistent = false;
  if (rep.extreme_by_rank && *rep.extreme_by_rank != rep.extreme_point.holds()) rep.consistent = false;
  if (rep.singleton_by_support && *rep.singleton_by_support != rep.singleton.holds()) rep.consistent = false;
  return rep;
}

}  // namespace gmeas
