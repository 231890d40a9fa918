#include "gmeas/section.hpp"

#include <cmath>

#include "gmeas/errors.hpp"
#include "gmeas/psdgeo.hpp"

namespace gmeas {

const char* to_string(SectionKind k) {
  switch (k) {
    case SectionKind::full: return "full";
    case SectionKind::channel: return "channel";
    case SectionKind::marginal: return "marginal";
    case SectionKind::custom: return "custom";
  }
  return "unknown";
}

Section Section::from_parts(HermSubspace span, HermitianOperator witness, SectionDescriptor descriptor,
                            std::optional<TensorShape> shape, std::optional<Matrix> embedding) {
  if (span.ambient() != witness.dim()) throw DimensionMismatch("section: witness dimension differs from J");
  auto data = std::make_shared<Data>();
  data->dim = span.ambient();
  data->annihilator = orthocomplement(span);
  data->span = std::move(span);
  data->witness_min_eigenvalue = witness.min_eigenvalue();
  data->witness = std::move(witness);
  data->shape = shape;
  data->embedding = std::move(embedding);
  data->descriptor = std::move(descriptor);
  Section s;
  s.data_ = std::move(data);
  return s;
}

std::optional<double> Section::class_trace_bound(const HermitianOperator& a) const {
  const double lmin = data_->witness_min_eigenvalue;
  if (!(lmin > 0.0)) return std::nullopt;
  // Tr(rho b) = Tr(rho a) for every b in the class, and Tr(rho b) >= lmin Tr(b).
  return std::max(0.0, inner(witness(), a)) / lmin;
}

bool Section::contains_state(const HermitianOperator& rho, const Tolerances& tol) const {
  if (rho.dim() != dim()) return false;
  return span().contains(rho, tol) && rho.is_psd(tol) && std::abs(rho.trace() - 1.0) <= tol.num * 10.0;
}

HermitianOperator Section::lift(const HermitianOperator& x) const {
  if (!embedding()) return x;
  return congruence(*embedding(), x);
}

bool Section::same_as(const Section& other, const Tolerances& tol) const {
  return same_subspace(span(), other.span(), tol);
}

Section full_state_space(Index d) {
  if (d < 1) throw DimensionMismatch("full_state_space: dimension must be positive");
  SectionDescriptor desc;
  desc.kind = SectionKind::full;
  desc.dim = d;
  return Section::from_parts(HermSubspace::full(d), HermitianOperator::identity(d) / static_cast<double>(d), desc);
}

Section channel_section(Index d_in, Index d_out) {
  if (d_in < 1 || d_out < 1) throw DimensionMismatch("channel_section: dimensions must be positive");
  const Index d = d_in * d_out;
  // K^perp = I_out (x) {traceless on the input}.
  std::vector<HermitianOperator> kperp;
  const auto id_out = HermitianOperator::identity(d_out) / std::sqrt(static_cast<double>(d_out));
  for (const auto& y : traceless_basis(d_in)) kperp.push_back(tensor(id_out, y));
  const HermSubspace annihilator = HermSubspace::span(d, kperp);
  SectionDescriptor desc;
  desc.kind = SectionKind::channel;
  desc.dim = d;
  desc.d_in = d_in;
  desc.d_out = d_out;
  return Section::from_parts(orthocomplement(annihilator), HermitianOperator::identity(d) / static_cast<double>(d),
                             desc, TensorShape{d_out, d_in});
}

Section fixed_marginal_section(const HermitianOperator& sigma, Index d_k, bool compress_singular,
                               const Tolerances& tol) {
  if (d_k < 1) throw DimensionMismatch("fixed_marginal_section: d_K must be positive");
  if (!sigma.is_psd(tol) || std::abs(sigma.trace() - 1.0) > 1e3 * tol.num) {
    throw NotAState("fixed_marginal_section: sigma is not a state");
  }
  const Index d_h = sigma.dim();
  SectionDescriptor desc;
  desc.kind = SectionKind::marginal;
  desc.dim = d_k * d_h;
  desc.sigma = sigma;
  desc.d_k = d_k;
  desc.compress_singular = compress_singular;

  const Projection q = support(sigma, tol);
  if (q.rank() < d_h && compress_singular) {
    const HermitianOperator reduced = congruence(q.range().adjoint(), sigma);
    const Section inner_section = fixed_marginal_section(reduced / reduced.trace(), d_k, true, tol);
    const Matrix embedding = kron(Matrix::Identity(d_k, d_k), q.range());
    SectionDescriptor inner_desc = desc;
    inner_desc.dim = inner_section.dim();
    return Section::from_parts(inner_section.span(), inner_section.witness(), inner_desc,
                               TensorShape{d_k, q.rank()}, embedding);
  }

  const Index d = d_k * d_h;
  const std::vector<HermitianOperator> sig{sigma};
  const HermSubspace sigma_perp = orthocomplement(HermSubspace::span(d_h, sig, tol));
  std::vector<HermitianOperator> kperp;
  const auto id_k = HermitianOperator::identity(d_k) / std::sqrt(static_cast<double>(d_k));
  for (const auto& y : sigma_perp.elements()) kperp.push_back(tensor(id_k, y));
  HermSubspace span = orthocomplement(HermSubspace::span(d, kperp, tol));
  if (q.rank() < d_h) {
    // Restrict J to the span of K, which lives in the corner I_K (x) supp(sigma).
    const Projection corner = Projection::from_isometry(kron(Matrix::Identity(d_k, d_k), q.range()));
    span = intersect(span, HermSubspace::corner(corner), tol);
  }
  const HermitianOperator witness = tensor(HermitianOperator::identity(d_k) / static_cast<double>(d_k), sigma);
  return Section::from_parts(std::move(span), witness, desc, TensorShape{d_k, d_h});
}

Section custom_section(Index d, std::span<const HermitianOperator> spanning, const Tolerances& tol) {
  const HermSubspace generated = HermSubspace::span(d, spanning, tol);
  const HermitianOperator id = HermitianOperator::identity(d);
  const HermitianOperator id_part = generated.project(id);
  const double t = id_part.trace();  // = ||id_part||^2
  if (!(t > tol.num)) throw EmptySection("custom_section: span contains no trace-one element");
  const std::vector<HermitianOperator> id_list{id};
  const HermSubspace traceless = orthocomplement(HermSubspace::span(d, id_list, tol));
  const Spectrahedron states{id_part / t, intersect(generated, traceless, tol), 1.0};

  SupportCertificate cert;
  try {
    cert = max_support_element(states, tol);
  } catch (const Infeasible&) {
    throw EmptySection("custom_section: span contains no state");
  }
  SectionDescriptor desc;
  desc.kind = SectionKind::custom;
  desc.dim = d;
  desc.basis.assign(spanning.begin(), spanning.end());
  HermSubspace span = cert.support.is_identity()
                          ? generated
                          : intersect(generated, HermSubspace::corner(cert.support), tol);
  HermitianOperator witness = cert.point / cert.point.trace();
  return Section::from_parts(std::move(span), std::move(witness), desc);
}

bool QuotientElement::equals(const QuotientElement& other, const Tolerances& tol) const {
  return approx_equal(representative, other.representative, tol);
}

QuotientElement quotient(const Section& section, const HermitianOperator& a) {
  if (a.dim() != section.dim()) throw DimensionMismatch("quotient: operator dimension mismatch");
  return {section.span().project(a), section};
}

std::optional<HermitianOperator> positive_representative(const Section& section, const HermitianOperator& a,
                                                         const Tolerances& tol) {
  if (a.dim() != section.dim()) throw DimensionMismatch("positive_representative: dimension mismatch");
  if (a.is_psd(tol)) return a;
  std::optional<double> bound;
  if (section.witness_full_rank()) bound = section.class_trace_bound(a);
  if (bound && *bound <= 0.0) return std::nullopt;
  return feasible_point(a, section.annihilator(), tol, bound);
}

Section compress_section(const Section& section, const Projection& p, const Tolerances& tol) {
  if (p.dim() != section.dim()) throw DimensionMismatch("compress_section: projection dimension mismatch");
  const HermitianOperator& w = section.witness();
  const HermitianOperator pwp = congruence(p.op().matrix(), w);
  if (!approx_equal(pwp, w, Tolerances{tol.herm, tol.rank, 1e3 * tol.num, tol.sdp})) {
    throw InvalidCompression("compress_section: projection does not dominate the support of K");
  }
  if (p.is_identity()) return section;
  const Matrix& v = p.range();
  HermSubspace span = restrict_to(section.span(), v, tol);
  HermitianOperator witness = congruence(v.adjoint(), w);
  witness = witness / witness.trace();
  Matrix embedding = section.embedding() ? Matrix(*section.embedding() * v) : v;
  SectionDescriptor desc;
  desc.kind = SectionKind::custom;
  desc.dim = p.rank();
  desc.basis = span.elements();
  return Section::from_parts(std::move(span), std::move(witness), desc, std::nullopt, std::move(embedding));
}

}  // namespace gmeas
