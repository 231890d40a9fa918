// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "gmeas/analysis.hpp"
#include "gmeas/errors.hpp"
#include "gmeas/log.hpp"
#include "support.hpp"

using namespace gmeas;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail << "first failure: " << what << "; ";
      pass = false;
    }
  }
};

int failures = 0;

void criterion(int number, const char* title, const std::function<void(Outcome&)>& body) {
  Outcome out;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(out);
  } catch (const std::exception& e) {
    out.pass = false;
    out.detail << "exception: " << e.what() << "; ";
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%s criterion %d: %s (%s%.2f s)\n", out.pass ? "PASS" : "FAIL", number, title, out.detail.str().c_str(),
              secs);
  std::fflush(stdout);
  if (!out.pass) ++failures;
}

HermitianOperator marginal_of_phi(double theta) {
  return partial_trace(HermitianOperator::outer(example5_vector(theta)), {2, 2}, Factor::first);
}

// Independent dim(s J s): rank of the compressed spanning set.
Index reference_compressed_dim(const HermSubspace& j, const Projection& s) {
  const Index d = j.ambient();
  RealMatrix cols(2 * d * d, j.dim());
  const Matrix& p = s.op().matrix();
  for (Index k = 0; k < j.dim(); ++k) cols.col(k) = fixtures::flatten(p * j.element(k).matrix() * p);
  return fixtures::reference_rank(cols);
}

struct Instance {
  Tester tester;
  GeneralizedPOVM gpovm;
};

std::vector<Instance> qubit_population(int count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Instance> out;
  for (int i = 0; i < count; ++i) {
    const Index n = 2 + i % 3;
    const Index rank = 1 + (i / 3) % 2;
    const auto kind = static_cast<PovmKind>((i / 6) % 3);
    const Tester t = random_tester(2, 2, n, random_state(2, rng, rank), rng, kind);
    out.push_back({t, tester_to_gpovm(t)});
  }
  return out;
}

// M+ and M- valid, distinct at the requested level, averaging to the input class.
bool witness_sound(const GeneralizedPOVM& m, const Verdict& v, bool measurement_level, std::string& why,
                   const Tolerances& tol) {
  const Perturbation* p = v.perturbation();
  if (!p) {
    why = "no perturbation attached";
    return false;
  }
  const GeneralizedPOVM plus = make_gpovm(m.section, p->plus(), m.outcomes);
  const GeneralizedPOVM minus = make_gpovm(m.section, p->minus(), m.outcomes);
  if (!validate(plus, tol).holds() || !validate(minus, tol).holds()) {
    why = "witness does not validate";
    return false;
  }
  std::vector<HermitianOperator> mid;
  for (std::size_t u = 0; u < m.size(); ++u) mid.push_back(0.5 * (p->plus()[u] + p->minus()[u]));
  if (fixtures::quotient_distance(m.section, mid, m.elements) > 1e-8) {
    why = "average leaves the class";
    return false;
  }
  if (measurement_level) {
    if (equivalent(plus, minus, tol)) {
      why = "ends are equivalent";
      return false;
    }
  } else {
    double gap = 0.0;
    for (std::size_t u = 0; u < m.size(); ++u) gap = std::max(gap, (plus.elements[u] - minus.elements[u]).frobenius());
    if (gap < 1e-6) {
      why = "ends coincide";
      return false;
    }
  }
  return true;
}

}  // namespace

int main() {
  const Tolerances tol;
  logger().set_level(spdlog::level::err);
  std::vector<GeneralizedPOVM> extremal_measurements;

  criterion(1, "qubit tester table for cos|00> + sin|11>", [&](Outcome& out) {
    const auto start = std::chrono::steady_clock::now();
    struct Row {
      double theta;
      bool tester;
      bool measurement;
    };
    const Row rows[] = {{0.0, false, false},    {kPi / 2, false, false}, {kPi / 12, true, false}, {kPi / 6, true, false},
                        {kPi / 3, true, false}, {kPi / 4, true, true}};
    int checked = 0;
    for (const Row& row : rows) {
      const Tester t = example5_tester(row.theta, fixtures::half_identity(), tol);
      const AnalysisReport r = analyze(tester_to_gpovm(t), t, {tol, true});
      out.require(r.tester_extremal->holds() == row.tester, "tester verdict at theta " + std::to_string(row.theta));
      out.require(r.measurement_extremal.holds() == row.measurement,
                  "measurement verdict at theta " + std::to_string(row.theta));
      if (r.measurement_extremal.holds()) extremal_measurements.push_back(tester_to_gpovm(t));
      ++checked;
    }
    for (int k = 1; k < 12; ++k) {
      const double theta = k * kPi / 24;
      const Tester t = example5_tester(theta, marginal_of_phi(theta), tol);
      const AnalysisReport r = analyze(tester_to_gpovm(t), t, {tol, true});
      out.require(r.measurement_extremal.holds(), "own-marginal measurement at theta " + std::to_string(theta));
      extremal_measurements.push_back(tester_to_gpovm(t));
      ++checked;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.require(secs < 10.0, "time budget");
    out.detail << checked << " instances, cross-checked; ";
  });

  const std::vector<Instance> population = qubit_population(240, 12345);

  criterion(2, "direct, decomposition and qubit fast-path engines agree", [&](Outcome& out) {
    int disagreements = 0;
    int decomposition_skipped = 0;
    int fast_path = 0;
    int near_threshold = 0;
    int counts[4] = {0, 0, 0, 0};
    for (const Instance& inst : population) {
      const Verdict g = is_extremal_gpovm(inst.gpovm, tol);
      const Verdict gd = extremal_gpovm_via_decomposition(inst.gpovm, tol);
      const Verdict m = is_extremal_measurement(inst.gpovm, tol);
      const Verdict md = extremal_measurement_via_decomposition(inst.gpovm, tol);
      bool ok = g.decision == gd.decision;
      if (md.conclusive()) ok = ok && md.decision == m.decision;
      else ++decomposition_skipped;
      if (inst.tester.elements.size() == 2) {
        ++fast_path;
        const QubitReport q = qubit_measurement_extremal(inst.tester, tol, true);
        ok = ok && q.all_agree() && q.tester.decision == g.decision;
        if (q.near_threshold) ++near_threshold;
        else ok = ok && q.measurement->decision == m.decision;
      }
      if (!ok) ++disagreements;
      counts[2 * g.holds() + m.holds()]++;
      if (m.holds()) extremal_measurements.push_back(inst.gpovm);
    }
    out.require(disagreements == 0, std::to_string(disagreements) + " disagreements");
    out.require(near_threshold == 0, std::to_string(near_threshold) + " instances near a decision threshold");
    out.detail << population.size() << " testers, " << fast_path << " via fast paths, " << decomposition_skipped
               << " outside the decomposition hypothesis, (tester, measurement) counts nn=" << counts[0]
               << " ny=" << counts[1] << " yn=" << counts[2] << " yy=" << counts[3] << ", 0 disagreements allowed; ";
  });

  criterion(3, "non-extremal and non-singleton verdicts ship sound witnesses", [&](Outcome& out) {
    int gpovm_witnesses = 0;
    int measurement_witnesses = 0;
    int class_witnesses = 0;
    std::vector<GeneralizedPOVM> pool;
    for (const Instance& inst : population) pool.push_back(inst.gpovm);
    Rng rng(7);
    for (int i = 0; i < 40; ++i) {
      const Index d = 2 + i % 3;
      pool.push_back(make_gpovm(full_state_space(d), random_povm(d, 2 + i % 3, rng)));
    }
    pool.push_back(make_gpovm(full_state_space(2), {fixtures::half_identity(), fixtures::half_identity()}));
    for (const GeneralizedPOVM& m : pool) {
      std::string why;
      const Verdict g = is_extremal_gpovm(m, tol);
      if (!g.holds()) {
        ++gpovm_witnesses;
        out.require(witness_sound(m, g, false, why, tol), "gPOVM witness: " + why);
      }
      const Verdict e = is_extremal_measurement(m, tol);
      if (!e.holds()) {
        ++measurement_witnesses;
        out.require(witness_sound(m, e, true, why, tol), "measurement witness: " + why);
      }
    }
    for (std::size_t i = 0; i < population.size(); i += 3) {
      const GeneralizedPOVM& m = population[i].gpovm;
      for (const auto& a : m.elements) {
        const Verdict v = class_is_singleton(m.section, a, tol);
        if (v.holds()) continue;
        ++class_witnesses;
        const HermitianOperator* b = v.operator_witness();
        out.require(b != nullptr, "class witness missing");
        if (!b) continue;
        out.require(b->is_psd(tol), "class witness not positive");
        out.require((*b - a).frobenius() >= 1e-6, "class witness too close");
        out.require(m.section.span().project(*b - a).frobenius() <= 1e-8, "class witness outside the class");
      }
    }
    out.detail << gpovm_witnesses << " gPOVM, " << measurement_witnesses << " measurement, " << class_witnesses
               << " class witnesses checked; ";
  });

  criterion(4, "rank rules on 2x2 fixed-marginal classes", [&](Outcome& out) {
    Rng rng(2024);
    int violations = 0;
    int checked = 0;
    int at_tolerance = 0;
    for (Index rank = 1; rank <= 4; ++rank) {
      for (int i = 0; i < 100; ++i) {
        const HermitianOperator sigma = random_state(2, rng);
        const Section s = fixed_marginal_section(sigma, 2, true, tol);
        const HermitianOperator a = random_psd(4, rank, rng);
        const ClassReport rep = class_analysis(s, a, tol);
        const Index dim_j = s.span().dim();
        std::string broken;
        if (rank < 2 && !rep.singleton.holds()) broken = "rank-1 class not a singleton";
        if (rank < 4 && !rep.extreme_point.holds()) broken = "low-rank class not extreme";
        if (rank == 4 && rank * rank > dim_j && rep.singleton.holds()) broken = "full-rank class is a singleton";
        const Projection& sk = rep.k_support.support;
        // No dual certificate and a nonzero escape: s_K is only resolved up to the solver tolerance.
        const bool resolved = rep.k_support.dual_witness || rep.k_support.residual <= 10.0 * tol.num;
        if (!resolved) ++at_tolerance;
        const bool flat = intersect(s.annihilator(), HermSubspace::corner(sk), tol).dim() == 0;
        if (resolved && rep.singleton.holds() != flat) broken = "singleton disagrees with K-perp on the s_K corner";
        if (rep.singleton.holds() && !sk.leq(support(a, tol), tol)) broken = "singleton class with s_K above s(a)";
        if (!broken.empty() && violations++ == 0) {
          out.detail << "first violation: rank " << rank << " #" << i << " " << broken << " (s_K rank "
                     << rep.k_support.support.rank() << ", singleton " << rep.singleton.reason << "); ";
        }
        ++checked;
      }
    }
    out.require(violations == 0, std::to_string(violations) + " violations");
    out.require(100 * at_tolerance <= checked, std::to_string(at_tolerance) + " classes resolved only at tolerance");
    out.detail << checked << " classes, " << violations << " violations, " << at_tolerance
               << " s_K comparisons left at solver tolerance; ";
  });

  criterion(5, "K-support certificates, hit-and-run, meet closure", [&](Outcome& out) {
    Rng rng(555);
    double worst_residual = 0.0;
    double worst_escape = 0.0;
    int supports = 0;
    int walks = 0;
    const std::vector<Section> sections{channel_section(2, 2), fixed_marginal_section(random_state(2, rng), 2),
                                        channel_section(2, 3)};
    for (const Section& s : sections) {
      for (int i = 0; i < 8; ++i) {
        const HermitianOperator a = random_psd(s.dim(), 1 + i % s.dim(), rng);
        const SupportCertificate cert = k_support(s, a, tol);
        ++supports;
        worst_residual = std::max(worst_residual, cert.residual);
        out.require(support(a, tol).leq(cert.support, tol), "s(a) not below s_K(a)");
        out.require(is_in_pk(s, cert.support, tol).holds(), "s_K(a) not in P_K");
        if (i < 4) {
          ++walks;
          const HermitianOperator outside = cert.support.complement().op();
          for (const auto& x : fixtures::hit_and_run(s, cert.point, cert.support, 500, rng)) {
            worst_escape = std::max(worst_escape, inner(outside, x));
          }
        }
      }
    }
    out.require(worst_residual <= 1e-6, "residual above 1e-6");
    out.require(worst_escape <= 1e-6, "walk escaped the K-support");

    int meets = 0;
    for (int i = 0; i < 10; ++i) {
      const Section s = channel_section(2, 2);
      const Channel t1 = random_channel(2, 2, 1 + i % 3, rng);
      const Channel t2 = random_channel(2, 2, 1 + (i + 1) % 2, rng);
      const std::vector<Projection> ps{support(t1.choi(), tol).complement(), support(t2.choi(), tol).complement()};
      out.require(is_in_pk(s, ps[0], tol).holds() && is_in_pk(s, ps[1], tol).holds(), "sampled element not in P_K");
      out.require(is_in_pk(s, projection_meet(ps, tol), tol).holds(), "meet not in P_K");
      ++meets;
    }
    out.detail << supports << " supports (worst residual " << worst_residual << "), " << walks
               << " walks x 500 (worst escape " << worst_escape << "), " << meets << " meets; ";
  });

  criterion(6, "tester probabilities equal the implementing POVM's", [&](Outcome& out) {
    Rng rng(66);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const Index d_in = 1 + i % 3;
      const Index d_out = 1 + (i / 3) % 3;
      const Tester t =
          random_tester(d_in, d_out, 2 + i % 3, random_state(d_in, rng, 1 + i % d_in), rng, static_cast<PovmKind>(i % 3));
      const Channel ch = random_channel(d_in, d_out, std::max<Index>(1 + i % (d_in * d_out), (d_in + d_out - 1) / d_out), rng);
      const auto direct = t.probabilities(ch);
      const auto implemented = implemented_probabilities(tester_decompose(t, tol), ch);
      for (std::size_t u = 0; u < direct.size(); ++u) worst = std::max(worst, std::abs(direct[u] - implemented[u]));
    }
    out.require(worst <= 1e-9, "difference above 1e-9");
    out.detail << "100 pairs up to 3x3, worst " << worst << "; ";
  });

  criterion(7, "ordinary POVMs: both notions equal weak independence", [&](Outcome& out) {
    Rng rng(77);
    int checked = 0;
    int extremal = 0;
    for (int i = 0; i < 90; ++i) {
      const Index d = 2 + i % 3;
      const Index n = 2 + (i / 3) % 4;
      std::vector<Index> ranks;
      for (Index u = 0; u < n; ++u) ranks.push_back(1 + (i + u) % d);
      const GeneralizedPOVM m = make_gpovm(full_state_space(d), random_povm(d, n, rng, ranks));
      const bool oracle = fixtures::weakly_independent(m.elements);
      const bool g = is_extremal_gpovm(m, tol).holds();
      const bool e = is_extremal_measurement(m, tol).holds();
      out.require(g == oracle && e == oracle, "mismatch with weak independence");
      if (e) extremal_measurements.push_back(m);
      extremal += oracle;
      ++checked;
    }
    // Rank-one elements with n <= d^2 are generically weakly independent.
    for (int i = 0; i < 30; ++i) {
      const Index d = 2 + i % 2;
      const Index n = d + (i / 2) % (d * d - d + 1);
      const GeneralizedPOVM m = make_gpovm(full_state_space(d), random_povm(d, n, rng, std::vector<Index>(n, 1)));
      const bool oracle = fixtures::weakly_independent(m.elements);
      const bool g = is_extremal_gpovm(m, tol).holds();
      const bool e = is_extremal_measurement(m, tol).holds();
      out.require(g == oracle && e == oracle, "mismatch with weak independence");
      if (e) extremal_measurements.push_back(m);
      extremal += oracle;
      ++checked;
    }
    for (Index d = 2; d <= 4; ++d) {
      for (Index n = 2; n <= d; ++n) {
        const GeneralizedPOVM m = make_gpovm(full_state_space(d), random_pvm(d, n, rng));
        out.require(is_extremal_gpovm(m, tol).holds() && is_extremal_measurement(m, tol).holds(), "PVM not extremal");
        extremal_measurements.push_back(m);
        ++checked;
      }
      const HermitianOperator half = HermitianOperator::identity(d) / 2.0;
      const GeneralizedPOVM coin = make_gpovm(full_state_space(d), {half, half});
      out.require(!is_extremal_gpovm(coin, tol).holds() && !is_extremal_measurement(coin, tol).holds(),
                  "{I/2, I/2} extremal");
      ++checked;
    }
    out.detail << checked << " POVMs (" << extremal << " random ones extremal); ";
  });

  criterion(8, "dimension bound on extremal measurements", [&](Outcome& out) {
    const Index dim_j = channel_section(2, 2).span().dim();
    out.require(dim_j == 13 && fixtures::channel_span_dimension(2, 2) == 13, "qubit channel span dimension");
    int checked = 0;
    for (const GeneralizedPOVM& m : extremal_measurements) {
      const GeneralizedMeasurement meas = measurement_of(m);
      const auto& ks = meas.k_supports(tol);
      Index total = 0;
      for (const auto& c : ks) total += reference_compressed_dim(m.section.span(), c.support);
      out.require(total <= m.section.span().dim(), "bound violated");
      out.require(dimension_bound(meas, tol).holds(), "library bound verdict");
      ++checked;
    }
    out.detail << "dim J = " << dim_j << ", " << checked << " extremal measurements; ";
  });

  std::printf("%s: %d failing criteria\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
