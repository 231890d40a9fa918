#include "gmeas/psdgeo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gmeas/errors.hpp"
#include "gmeas/lmi.hpp"
#include "gmeas/log.hpp"

namespace gmeas {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Gap to which central-path points are driven before reading off a face.
constexpr double kFaceGap = 1e-12;
// Relative eigenvalue threshold for reading a support off solver output.
constexpr double kFaceThreshold = 1e-6;

double operator_scale(const HermitianOperator& x) {
  const double n = x.norm();
  return n > 0.0 ? n : 1.0;
}

// (a + W) restricted to the corner of an isometry V: points a + w with
// a + w = V X V^dagger, expressed through X.
struct Slice {
  Matrix isometry;
  HermitianOperator base;
  HermSubspace directions;

  HermitianOperator lift(const HermitianOperator& x) const { return congruence(isometry, x); }
};

std::optional<Slice> slice_to_corner(const HermitianOperator& a, const HermSubspace& w, const Projection& s,
                                     double scale, const Tolerances& tol) {
  const Index d = a.dim();
  if (s.is_identity()) return Slice{Matrix::Identity(d, d), a, w};
  const Matrix& sm = s.op().matrix();
  auto outside = [&](const Matrix& x) -> Matrix { return x - sm * x * sm; };
  const Index m = w.dim();
  RealMatrix lhs(d * d, m);
  for (Index k = 0; k < m; ++k) lhs.col(k) = vectorize_matrix(outside(w.element(k).matrix()));
  const RealVector rhs = -vectorize_matrix(outside(a.matrix()));

  RealVector y = RealVector::Zero(m);
  RealMatrix null = RealMatrix::Identity(m, m);
  if (m > 0) {
    Eigen::JacobiSVD<RealMatrix> svd(lhs, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const RealVector& sv = svd.singularValues();
    const double threshold = tol.rank * std::max(1.0, sv.size() ? sv[0] : 0.0);
    Index r = 0;
    while (r < sv.size() && sv[r] > threshold) ++r;
    const RealVector ub = svd.matrixU().leftCols(r).transpose() * rhs;
    y = svd.matrixV().leftCols(r) * (ub.array() / sv.head(r).array()).matrix();
    null = svd.matrixV().rightCols(m - r);
  }
  const double residual = (lhs * y - rhs).norm();
  if (residual > tol.sdp * scale) return std::nullopt;

  const Matrix& v = s.range();
  const HermitianOperator base = congruence(v.adjoint(), a + (m > 0 ? w.combine(y) : HermitianOperator::zero(d)));
  HermSubspace dirs = HermSubspace::zero(v.cols());
  if (null.cols() > 0) {
    const HermSubspace moving = HermSubspace::span_vectors(d, w.basis_matrix() * null, tol);
    dirs = restrict_to(moving, v, tol);
  }
  return Slice{v, base, std::move(dirs)};
}

// maximize t subject to base + sum y_i d_i - t I >= 0 (and the trace bound).
struct TSolution {
  double t = -kInf;
  double upper = kInf;
  HermitianOperator x;
};

TSolution solve_t_problem(const HermitianOperator& base, const HermSubspace& dirs, std::optional<double> trace_bound,
                          const RealVector* start, double decide_at, const Tolerances& tol) {
  const Index r = base.dim();
  if (r == 0) return {kInf, kInf, base};
  const Index k = dirs.dim();
  const double scale = operator_scale(base);
  const auto elements = dirs.elements();

  lmi::Problem problem;
  problem.constant = base.matrix();
  for (const auto& e : elements) problem.coefficients.push_back(e.matrix());
  problem.coefficients.push_back(-Matrix::Identity(r, r));
  problem.objective = RealVector::Zero(k + 1);
  problem.objective[k] = 1.0;

  RealVector z = RealVector::Zero(k + 1);
  if (start) z.head(k) = *start;
  HermitianOperator x0 = base;
  for (Index i = 0; i < k; ++i) x0 += z[i] * elements[static_cast<std::size_t>(i)];
  const double lmin = x0.min_eigenvalue();
  z[k] = lmin - 0.5 * scale;
  const double t_floor = lmin - 2.0 * scale;
  problem.scalar_offset.push_back(-t_floor);
  RealVector trow = RealVector::Zero(k + 1);
  trow[k] = 1.0;
  problem.scalar_rows.push_back(trow);

  if (trace_bound) {
    RealVector row = RealVector::Zero(k + 1);
    for (Index i = 0; i < k; ++i) row[i] = -elements[static_cast<std::size_t>(i)].trace();
    if (row.norm() > 1e-12) {
      const double slack = *trace_bound - x0.trace();
      // Widen the bound if the start point sits on or beyond it.
      const double bound = slack > 1e-6 * scale ? *trace_bound : x0.trace() + std::max(1.0, scale);
      problem.scalar_offset.push_back(bound - base.trace());
      problem.scalar_rows.push_back(row);
    }
  }

  lmi::Options opts;
  opts.gap = kFaceGap * scale;
  opts.tau_initial = 1.0 / scale;
  opts.max_newton_steps = tol.max_newton_steps;
  opts.stop = [&](const RealVector&, double value, double gap) {
    return value > 1e2 * decide_at || value + gap < -1e2 * decide_at;
  };
  const lmi::Result res = lmi::maximize(problem, z, opts);
  HermitianOperator x = base;
  for (Index i = 0; i < k; ++i) x += res.z[i] * elements[static_cast<std::size_t>(i)];
  return {res.value, res.value + res.gap, x};
}

// Isometry onto the eigenvectors of x (r x r) kept by the face threshold;
// always drops at least the smallest eigenvalue.
Matrix shrink_face(const HermitianOperator& x) {
  const Spectrum sp = x.spectrum();
  const Index r = x.dim();
  const double top = std::max(sp.values.cwiseAbs().maxCoeff(), 0.0);
  Index first_kept = 0;
  while (first_kept < r && sp.values[first_kept] <= kFaceThreshold * top) ++first_kept;
  first_kept = std::max<Index>(first_kept, 1);
  if (top == 0.0) first_kept = r;
  return sp.vectors.rightCols(r - first_kept);
}

struct DualCertificate {
  HermitianOperator z;
  double margin = 0.0;
  double residual = kInf;
};

// Z >= 0 orthogonal to the affine hull of C and positive definite on I - s.
std::optional<DualCertificate> dual_certificate(const Spectrahedron& c, const Projection& s, double diameter,
                                                const Tolerances& tol) {
  const Index d = c.base.dim();
  const Projection rest = s.complement();
  const std::vector<HermitianOperator> base_list{c.base};
  const HermSubspace hull = add(c.directions, HermSubspace::span(d, base_list, tol), tol);
  const HermSubspace ortho = orthocomplement(hull);
  const HermSubspace in_corner = intersect(ortho, HermSubspace::corner(rest), tol);
  const HermSubspace restricted = restrict_to(in_corner, rest.range(), tol);
  const Index r = rest.rank();
  const HermitianOperator id_part = restricted.project(HermitianOperator::identity(r));
  const double tr = id_part.trace();
  if (!(tr > 1e-10)) return std::nullopt;
  const std::vector<HermitianOperator> id_list{HermitianOperator::identity(r)};
  const HermSubspace traceless = orthocomplement(HermSubspace::span(r, id_list, tol));
  const TSolution sol = solve_t_problem(id_part / tr, intersect(restricted, traceless, tol), std::nullopt, nullptr,
                                        tol.after_solve(), tol);
  if (!(sol.t > tol.after_solve())) return std::nullopt;
  DualCertificate cert;
  cert.z = congruence(rest.range(), sol.x);
  cert.margin = sol.t;
  // For X = a + w in C: Tr((I - s) X) <= Tr(Z X) / margin.
  const double leak = std::abs(inner(cert.z, c.base)) + c.directions.project(cert.z).frobenius() * diameter;
  cert.residual = leak / sol.t;
  return cert;
}

// max Tr(P X) over {X in a + W : X >= -eps I}, started from a point b of C.
LinearMaximum relaxed_max_linear(const Spectrahedron& c, const HermitianOperator& objective,
                                 const HermitianOperator& b, const Tolerances& tol) {
  const Index d = c.base.dim();
  const double scale = std::max(operator_scale(c.base), operator_scale(b));
  const auto elements = c.directions.elements();
  const Index k = c.directions.dim();
  const double eps = std::max(1e-10 * scale, 2.0 * std::max(0.0, -b.min_eigenvalue()) + 1e-12 * scale);

  lmi::Problem problem;
  problem.constant = c.base.matrix() + eps * Matrix::Identity(d, d);
  problem.objective.resize(k);
  for (Index i = 0; i < k; ++i) {
    problem.coefficients.push_back(elements[static_cast<std::size_t>(i)].matrix());
    problem.objective[i] = inner(objective, elements[static_cast<std::size_t>(i)]);
  }
  const RealVector start = c.directions.coordinates(b - c.base);
  if (c.trace_bound) {
    RealVector row(k);
    for (Index i = 0; i < k; ++i) row[i] = -elements[static_cast<std::size_t>(i)].trace();
    if (row.norm() > 1e-12) {
      const double bound = std::max(*c.trace_bound, b.trace() + scale);
      problem.scalar_offset.push_back(bound - c.base.trace());
      problem.scalar_rows.push_back(row);
    }
  }
  lmi::Options opts;
  opts.gap = 1e-10 * scale;
  opts.tau_initial = 1.0 / scale;
  opts.max_newton_steps = tol.max_newton_steps;
  const lmi::Result res = lmi::maximize(problem, start, opts);
  const HermitianOperator x = c.base + (k > 0 ? c.directions.combine(res.z) : HermitianOperator::zero(d));
  return {inner(objective, x), x, res.gap};
}

double diameter_bound(const Spectrahedron& c, const HermitianOperator& point) {
  const double frob = c.base.frobenius();
  if (c.trace_bound) return *c.trace_bound + frob;
  return 1e6 * std::max(1.0, point.frobenius() + frob);
}

}  // namespace

Spectrahedron Spectrahedron::of_class(const Section& section, const HermitianOperator& a) {
  return {a, section.annihilator(), section.class_trace_bound(a)};
}

double max_step(const HermitianOperator& x, const HermitianOperator& d, const Tolerances& tol) {
  const Projection s = support(x, tol);
  const Matrix& sm = s.op().matrix();
  const Matrix outside = d.matrix() - sm * d.matrix() * sm;
  if (outside.norm() > 1e3 * tol.num * std::max(1.0, d.frobenius())) return 0.0;
  const HermitianOperator xr = congruence(s.range().adjoint(), x);
  const HermitianOperator dr = congruence(s.range().adjoint(), d);
  const HermitianOperator w = pinv_sqrt(xr, tol);
  const double lmin = congruence(w.matrix(), dr).min_eigenvalue();
  return lmin < 0.0 ? -1.0 / lmin : kInf;
}

SupportCertificate max_support_element(const Spectrahedron& c, const Tolerances& tol) {
  const Index d = c.base.dim();
  if (c.directions.ambient() != d) throw DimensionMismatch("spectrahedron: direction space dimension mismatch");
  double scale = operator_scale(c.base);
  if (c.trace_bound) scale = std::max(scale, *c.trace_bound);
  const double decide = tol.after_solve() * scale;

  if (c.directions.dim() == 0) {
    if (!c.base.is_psd(tol)) throw Infeasible("spectrahedron is empty");
    SupportCertificate cert;
    cert.support = support(c.base, tol);
    cert.point = c.base;
    const HermitianOperator on_support = congruence(cert.support.range().adjoint(), c.base);
    cert.interior_margin = on_support.dim() ? on_support.min_eigenvalue() : kInf;
    return cert;
  }

  // Phase 1: locate the face by following the central path of max lambda_min.
  Projection candidate = Projection::identity(d);
  HermitianOperator point;
  double margin = 0.0;
  int iterations = 0;
  std::optional<double> bound = c.trace_bound;
  if (!bound) bound = 1e4 * (c.base.matrix().cwiseAbs().sum() + 1.0);
  // Last face whose t-problem had a strictly positive optimum; a face whose
  // smallest eigenvalues sit just under the decision threshold may not be
  // reducible, in which case it is kept.
  struct Fallback {
    Projection face;
    HermitianOperator point;
    double t = 0.0;
  };
  std::optional<Fallback> fallback;
  auto give_up = [&](const char* what) {
    if (!fallback) throw Infeasible(what);
    logger().debug("max_support_element: keeping rank {} face with margin {:.3e}", fallback->face.rank(), fallback->t);
    candidate = fallback->face;
    point = fallback->point;
    margin = fallback->t;
  };
  while (true) {
    ++iterations;
    const auto slice = slice_to_corner(c.base, c.directions, candidate, scale, tol);
    if (!slice) {
      if (candidate.is_identity()) throw Infeasible("spectrahedron is empty");
      give_up("face reduction lost feasibility");
      break;
    }
    if (candidate.rank() == 0) {
      point = slice->lift(slice->base);
      margin = kInf;
      break;
    }
    const TSolution sol = solve_t_problem(slice->base, slice->directions, bound, nullptr, decide, tol);
    logger().debug("max_support_element: rank {} face, t in [{:.3e}, {:.3e}], decide {:.3e}", candidate.rank(), sol.t,
                   sol.upper, decide);
    if (sol.t > decide) {
      point = slice->lift(sol.x);
      margin = sol.t;
      break;
    }
    if (sol.upper < -decide) {
      if (candidate.is_identity()) throw Infeasible("spectrahedron is empty");
      give_up("face reduction lost feasibility");
      break;
    }
    if (sol.t > 1e2 * kFaceGap * scale) {
      fallback = Fallback{candidate, slice->lift(sol.x), sol.t};
    } else {
      fallback.reset();
    }
    const Matrix keep = shrink_face(sol.x);
    candidate = Projection::from_isometry(slice->isometry * keep);
    if (iterations > d + 1) throw Infeasible("face reduction did not terminate");
  }

  // Phase 2: certify that no point of C leaves the face, or enlarge it.
  Projection face = candidate;
  for (int round = 0; round <= d; ++round) {
    SupportCertificate cert;
    cert.support = face;
    cert.point = point;
    cert.interior_margin = margin;
    cert.iterations = iterations + round;
    if (face.is_identity()) return cert;
    const double diameter = diameter_bound(c, point);
    if (auto dual = dual_certificate(c, face, diameter, tol)) {
      cert.residual = dual->residual;
      cert.dual_witness = dual->z;
      return cert;
    }
    const HermitianOperator escape = face.complement().op();
    const LinearMaximum lm = relaxed_max_linear(c, escape, point, tol);
    if (lm.value <= tol.sdp * scale) {
      cert.residual = std::max(0.0, lm.value) + lm.gap;
      return cert;
    }
    const HermitianOperator mid = 0.5 * (point + lm.maximizer);
    const Projection grown = support_with_threshold(mid, kFaceThreshold);
    if (grown.rank() <= face.rank()) {
      logger().warn("max_support_element: escape value {:.3e} did not enlarge the support", lm.value);
      cert.residual = lm.value;
      return cert;
    }
    face = grown;
    const auto slice = slice_to_corner(c.base, c.directions, face, scale, tol);
    point = mid;
    margin = congruence(face.range().adjoint(), mid).min_eigenvalue();
    if (slice) {
      const TSolution sol = solve_t_problem(slice->base, slice->directions, bound, nullptr, decide, tol);
      if (sol.t > decide) {
        point = slice->lift(sol.x);
        margin = sol.t;
      }
    }
  }
  throw Infeasible("max_support_element did not converge");
}

LinearMaximum max_linear(const Spectrahedron& c, const HermitianOperator& objective, const Tolerances& tol) {
  const SupportCertificate cert = max_support_element(c, tol);
  const Index d = c.base.dim();
  double scale = operator_scale(c.base);
  if (c.trace_bound) scale = std::max(scale, *c.trace_bound);
  if (c.directions.dim() == 0) return {inner(objective, c.base), c.base, 0.0};
  if (!cert.support.is_identity() && !cert.dual_witness) {
    return relaxed_max_linear(c, objective, cert.point, tol);
  }
  const auto slice = slice_to_corner(c.base, c.directions, cert.support, scale, tol);
  if (!slice) return relaxed_max_linear(c, objective, cert.point, tol);
  const Index r = slice->base.dim();
  if (r == 0 || slice->directions.dim() == 0) return {inner(objective, cert.point), cert.point, 0.0};

  const HermitianOperator obj_r = congruence(slice->isometry.adjoint(), objective);
  const auto elements = slice->directions.elements();
  const Index k = slice->directions.dim();
  lmi::Problem problem;
  problem.constant = slice->base.matrix();
  problem.objective.resize(k);
  for (Index i = 0; i < k; ++i) {
    problem.coefficients.push_back(elements[static_cast<std::size_t>(i)].matrix());
    problem.objective[i] = inner(obj_r, elements[static_cast<std::size_t>(i)]);
  }
  const HermitianOperator start_r = congruence(slice->isometry.adjoint(), cert.point);
  RealVector start = slice->directions.coordinates(start_r - slice->base);
  if (!lmi::strictly_feasible(problem, start)) {
    // Fall back to the slice's own interior point.
    const TSolution sol = solve_t_problem(slice->base, slice->directions, c.trace_bound, nullptr, 0.0, tol);
    start = slice->directions.coordinates(sol.x - slice->base);
  }
  if (c.trace_bound) {
    RealVector row(k);
    for (Index i = 0; i < k; ++i) row[i] = -elements[static_cast<std::size_t>(i)].trace();
    if (row.norm() > 1e-12) {
      const double bound = std::max(*c.trace_bound, cert.point.trace() + scale);
      problem.scalar_offset.push_back(bound - slice->base.trace());
      problem.scalar_rows.push_back(row);
    }
  }
  lmi::Options opts;
  opts.gap = 1e-10 * scale;
  opts.tau_initial = 1.0 / scale;
  opts.max_newton_steps = tol.max_newton_steps;
  const lmi::Result res = lmi::maximize(problem, start, opts);
  HermitianOperator x = slice->base + slice->directions.combine(res.z);
  const HermitianOperator lifted = slice->lift(x);
  (void)d;
  return {inner(objective, lifted), lifted, res.gap};
}

std::optional<HermitianOperator> feasible_point(const HermitianOperator& base, const HermSubspace& directions,
                                                const Tolerances& tol, std::optional<double> trace_bound) {
  if (base.is_psd(tol)) return base;
  const Spectrahedron c{base, directions, trace_bound};
  try {
    if (trace_bound) return max_support_element(c, tol).point;
    // Unbounded slice: the minimal-trace member stays at the scale of the input.
    return max_linear(c, -HermitianOperator::identity(base.dim()), tol).maximizer;
  } catch (const Infeasible&) {
    return std::nullopt;
  }
}

SupportCertificate k_support(const Section& section, const HermitianOperator& a, const Tolerances& tol) {
  if (a.dim() != section.dim()) throw DimensionMismatch("k_support: dimension mismatch");
  if (!a.is_psd(tol)) throw NotPositive("k_support: operator is not positive semidefinite");
  const Spectrahedron c = Spectrahedron::of_class(section, a);
  if (c.directions.dim() == 0) {
    SupportCertificate cert;
    cert.support = support(a, tol);
    cert.point = a;
    const HermitianOperator on = congruence(cert.support.range().adjoint(), a);
    cert.interior_margin = on.dim() ? on.min_eigenvalue() : kInf;
    return cert;
  }
  return max_support_element(c, tol);
}

Verdict is_in_pk(const Section& section, const Projection& p, const Tolerances& tol) {
  if (p.dim() != section.dim()) throw DimensionMismatch("is_in_pk: dimension mismatch");
  Verdict v;
  const Index d = section.dim();
  if (p.is_identity()) {
    v.decision = Decision::yes;
    v.reason = "identity (b = 0)";
    v.witness = HermitianOperator::zero(d);
    return v;
  }
  const Projection rest = p.complement();
  const Index r = rest.rank();
  const HermSubspace in_corner = intersect(section.span(), HermSubspace::corner(rest), tol);
  const HermSubspace restricted = restrict_to(in_corner, rest.range(), tol);
  const HermitianOperator id_part = restricted.project(HermitianOperator::identity(r));
  const double tr = id_part.trace();
  v.margins["cone_dimension"] = static_cast<double>(restricted.dim());
  if (!(tr > 1e-10)) {
    v.decision = Decision::no;
    v.reason = "no nonzero element of the cone is supported on I - p";
    v.margins["interior"] = -kInf;
    return v;
  }
  const std::vector<HermitianOperator> id_list{HermitianOperator::identity(r)};
  const HermSubspace traceless = orthocomplement(HermSubspace::span(r, id_list, tol));
  const TSolution sol = solve_t_problem(id_part / tr, intersect(restricted, traceless, tol), std::nullopt, nullptr,
                                        tol.after_solve(), tol);
  v.margins["interior"] = sol.t;
  if (sol.t > tol.after_solve()) {
    v.decision = Decision::yes;
    v.reason = "cone element with support exactly I - p";
    v.witness = congruence(rest.range(), sol.x);
  } else {
    v.decision = Decision::no;
    v.reason = "every cone element supported on I - p is singular there";
  }
  return v;
}

Projection projection_meet(std::span<const Projection> projections, const Tolerances& tol) {
  if (projections.empty()) throw DimensionMismatch("projection_meet: empty list");
  const Index d = projections.front().dim();
  Matrix sum = Matrix::Zero(d, d);
  for (const auto& p : projections) {
    if (p.dim() != d) throw DimensionMismatch("projection_meet: dimension mismatch");
    sum += p.complement().op().matrix();
  }
  const Spectrum sp = HermitianOperator::hermitian_part(sum).spectrum();
  Index k = 0;
  while (k < d && sp.values[k] <= 1e3 * tol.num) ++k;
  return Projection::from_isometry(sp.vectors.leftCols(k));
}

Verdict class_is_extreme_point(const Section& section, const HermitianOperator& a, const Tolerances& tol) {
  if (a.dim() != section.dim()) throw DimensionMismatch("class_is_extreme_point: dimension mismatch");
  if (!a.is_psd(tol)) throw NotPositive("class_is_extreme_point: operator is not positive semidefinite");
  const Projection s = support(a, tol);
  const Index r = s.rank();
  Verdict v;
  v.margins["rank"] = static_cast<double>(r);
  if (r == 0) {
    v.decision = Decision::yes;
    v.reason = "zero operator";
    return v;
  }
  // Columns: the basis of J compressed into the corner, in Herm(r) coordinates.
  const Index m = section.span().dim();
  RealMatrix map(r * r, m);
  for (Index k = 0; k < m; ++k) map.col(k) = vectorize(congruence(s.range().adjoint(), section.span().element(k)));
  // Kernel of the transpose = K^perp inside the corner.
  RealVector sv;
  const RealMatrix kernel = null_space(map.transpose(), tol.after_solve(), &sv);
  const Index compressed_dim = r * r - kernel.cols();
  v.margins["dim_sJs"] = static_cast<double>(compressed_dim);
  v.margins["dim_corner"] = static_cast<double>(r * r);
  v.margins["smallest_singular_value"] = sv.size() >= r * r ? sv[r * r - 1] : 0.0;
  if (kernel.cols() == 0) {
    v.decision = Decision::yes;
    v.reason = "dim(sJs) = dim(A_s)";
    return v;
  }
  const HermitianOperator k = congruence(s.range(), devectorize(kernel.col(0), r));
  const double step = std::min(max_step(a, k, tol), max_step(a, -k, tol));
  Perturbation pert;
  pert.center = {a};
  pert.direction = {k};
  pert.epsilon = 0.5 * step;
  v.decision = Decision::no;
  v.reason = "K^perp meets the support corner";
  v.witness = std::move(pert);
  return v;
}

Verdict class_is_singleton(const Section& section, const HermitianOperator& a, const Tolerances& tol) {
  const Verdict extreme = class_is_extreme_point(section, a, tol);
  const Projection s = support(a, tol);
  const Verdict pk = is_in_pk(section, s, tol);
  Verdict v;
  v.margins = extreme.margins;
  v.margins["pk_interior"] = pk.margins.count("interior") ? pk.margins.at("interior") : 0.0;
  if (extreme.holds() && pk.holds()) {
    v.decision = Decision::yes;
    v.reason = "s(a) in P_K and a extreme";
    return v;
  }
  v.decision = Decision::no;
  if (!extreme.holds()) {
    v.reason = "a is not an extreme point of its class";
    const Perturbation& p = *extreme.perturbation();
    v.witness = a + p.epsilon * p.direction.front();
    return v;
  }
  v.reason = "s(a) is not in P_K";
  const SupportCertificate cert = k_support(section, a, tol);
  v.margins["k_support_rank"] = static_cast<double>(cert.support.rank());
  const HermitianOperator direction = cert.point - a;
  if (direction.frobenius() <= 0.0) return v;
  // Push along b - a as far as positivity allows, to separate the members clearly.
  const double reach = max_step(cert.point, direction, tol);
  const double t = std::isfinite(reach) ? std::max(1.0, 0.5 * (1.0 + reach)) : 2.0;
  v.witness = a + t * direction;
  return v;
}

}  // namespace gmeas
