#include "gmeas/analysis.hpp"

#include <chrono>
#include <cmath>

#include "gmeas/errors.hpp"
#include "gmeas/log.hpp"

namespace gmeas {

namespace {

class Stopwatch {
 public:
  explicit Stopwatch(std::map<std::string, double>& sink) : sink_(sink) {}

  template <class F>
  auto time(const std::string& name, F&& f) {
    const auto start = std::chrono::steady_clock::now();
    auto result = f();
    sink_[name] += std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return result;
  }

 private:
  std::map<std::string, double>& sink_;
};

void require_agreement(std::map<std::string, bool>& checks, const std::string& name, const Verdict& a,
                       const Verdict& b) {
  const bool ok = a.decision == b.decision;
  checks[name] = ok;
  if (!ok) {
    throw CrossCheckFailure(name + ": " + to_string(a.decision) + " vs " + to_string(b.decision));
  }
}

void run_qubit_paths(AnalysisReport& r, const Tester& t, const Tolerances& tol) {
  if (t.d_in != 2 || t.elements.size() != 2) return;
  QubitReport q = t.d_out == 2 ? qubit_measurement_extremal(t, tol, true) : qubit_tester_extremal(t, tol, true);
  for (const auto& [name, ok] : q.cross_checks) r.cross_checks["qubit:" + name] = ok;
  if (!q.all_agree()) {
    std::string failed;
    for (const auto& [name, ok] : q.cross_checks) {
      if (!ok) failed += (failed.empty() ? "" : ", ") + name;
    }
    throw CrossCheckFailure("qubit fast path disagrees with " + failed);
  }
  require_agreement(r.cross_checks, "qubit:tester-vs-report", q.tester, *r.tester_extremal);
  if (q.near_threshold) {
    logger().warn("qubit measurement verdict is near the decision threshold; engines may differ");
  } else if (q.measurement) require_agreement(r.cross_checks, "qubit:measurement-vs-report", *q.measurement, r.measurement_extremal);
  r.qubit = std::move(q);
}

}  // namespace

AnalysisReport analyze(const GeneralizedPOVM& m, const std::optional<Tester>& tester, const AnalysisOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  const Tolerances& tol = opts.tol;
  AnalysisReport r;
  r.tol = tol;
  r.kind = tester ? "tester" : "gpovm";
  r.section = m.section.descriptor();
  r.dim_j = m.section.span().dim();

  const Verdict valid = validate(m, tol);
  if (!valid.holds()) throw NotAGeneralizedPOVM(valid.reason);

  Stopwatch clock(r.timings_ms);
  const GeneralizedMeasurement meas = measurement_of(m);
  const auto& ks = clock.time("k_supports", [&] { return meas.k_supports(tol); });
  for (std::size_t u = 0; u < m.size(); ++u) {
    OutcomeReport o;
    o.label = m.outcomes[u];
    o.support = support(m.elements[u], tol);
    o.k_support = ks[u];
    o.compressed_dim = compressed_dimension(m.section.span(), ks[u].support, tol);
    o.class_singleton = clock.time("class_singleton", [&] { return class_is_singleton(m.section, m.elements[u], tol); });
    r.outcomes.push_back(std::move(o));
  }

  r.gpovm_extremal = clock.time("gpovm_extremal", [&] { return is_extremal_gpovm(m, tol); });
  if (tester) r.tester_extremal = r.gpovm_extremal;
  r.measurement_extremal = clock.time("measurement_extremal", [&] { return is_extremal_measurement(meas, tol); });
  r.dimension_bound = clock.time("dimension_bound", [&] { return dimension_bound(meas, tol); });

  const Decomposition dec = clock.time("decomposition", [&] { return decompose(m, tol); });
  r.decomposition.corner_rank = dec.p.rank();
  r.decomposition.pushed_section_dim = dec.pushed_section.span().dim();
  r.decomposition.lambda = dec.lambda;

  if (opts.cross_check) {
    r.decomposition.gpovm_extremal =
        clock.time("cross_check", [&] { return extremal_gpovm_via_decomposition(m, tol, true); });
    r.cross_checks["gpovm:decomposition"] = true;
    r.decomposition.measurement_extremal =
        clock.time("cross_check", [&] { return extremal_measurement_via_decomposition(m, tol, true); });
    if (r.decomposition.measurement_extremal->conclusive()) r.cross_checks["measurement:decomposition"] = true;
    if (tester) {
      clock.time("cross_check", [&] {
        run_qubit_paths(r, *tester, tol);
        return 0;
      });
    }
    if (r.measurement_extremal.holds()) {
      r.cross_checks["measurement:dimension-bound"] = r.dimension_bound.holds();
      if (!r.dimension_bound.holds()) throw CrossCheckFailure("extremal measurement violates the dimension bound");
    }
  }

  r.timings_ms["total"] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  logger().debug("analysis of {} outcomes took {:.1f} ms", m.size(), r.timings_ms["total"]);
  return r;
}

AnalysisReport analyze_json(const io::Json& input, const std::optional<Section>& section, const AnalysisOptions& opts) {
  const std::string kind = io::kind_of(input);
  AnalysisReport r;
  if (kind == "tester") {
    if (section) throw io::ParseError("a section override applies to gpovm inputs only");
    const Tester t = io::tester_from_json(input, opts.tol);
    r = analyze(tester_to_gpovm(t), t, opts);
  } else if (kind == "gpovm") {
    r = analyze(io::gpovm_from_json(input, section, opts.tol), std::nullopt, opts);
  } else {
    throw io::ParseError("cannot analyze an object of kind " + kind);
  }
  r.input = input;
  r.digest = io::digest(input);
  return r;
}

namespace io {

namespace {

Json operation(const char* name, Json result) {
  result["operation"] = name;
  return result;
}

}  // namespace

Json to_json(const AnalysisReport& r) {
  Json j;
  j["digest"] = r.digest;
  j["kind"] = r.kind;
  j["section"] = to_json(r.section);
  j["dim_J"] = r.dim_j;

  Json outcomes = Json::array();
  for (const auto& o : r.outcomes) {
    Json e;
    e["label"] = o.label;
    e["support_rank"] = o.support.rank();
    e["support"] = to_json(o.support.op());
    e["k_support"] = operation("k_support", to_json(o.k_support));
    e["dim_sJs"] = o.compressed_dim;
    e["class_singleton"] = operation("class_is_singleton", to_json(o.class_singleton));
    outcomes.push_back(std::move(e));
  }
  j["outcomes"] = std::move(outcomes);

  if (r.tester_extremal) {
    j["tester_extremal"] = r.tester_extremal->holds();
  }
  j["measurement_extremal"] = r.measurement_extremal.holds();
  Json verdicts;
  if (r.tester_extremal) verdicts["tester_extremal"] = operation("is_extremal_gpovm", to_json(*r.tester_extremal));
  verdicts["gpovm_extremal"] = operation("is_extremal_gpovm", to_json(r.gpovm_extremal));
  verdicts["measurement_extremal"] = operation("is_extremal_measurement", to_json(r.measurement_extremal));
  verdicts["dimension_bound"] = operation("dimension_bound", to_json(r.dimension_bound));
  j["verdicts"] = std::move(verdicts);

  Json dec;
  dec["corner_rank"] = r.decomposition.corner_rank;
  dec["pushed_section_dim"] = r.decomposition.pushed_section_dim;
  Json lambda = Json::array();
  for (const auto& l : r.decomposition.lambda) lambda.push_back(to_json(l));
  dec["lambda"] = std::move(lambda);
  if (r.decomposition.gpovm_extremal) {
    dec["gpovm_extremal"] =
        operation("extremal_gpovm_via_decomposition", to_json(*r.decomposition.gpovm_extremal));
  }
  if (r.decomposition.measurement_extremal) {
    dec["measurement_extremal"] =
        operation("extremal_measurement_via_decomposition", to_json(*r.decomposition.measurement_extremal));
  }
  j["decomposition"] = std::move(dec);

  if (r.qubit) {
    Json q;
    q["tester"] = to_json(r.qubit->tester);
    q["tester_reason"] = r.qubit->tester_reason;
    q["near_threshold"] = r.qubit->near_threshold;
    if (r.qubit->measurement) {
      q["measurement"] = to_json(*r.qubit->measurement);
      q["measurement_reason"] = r.qubit->measurement_reason;
    }
    j["qubit"] = std::move(q);
  }
  j["cross_checks"] = r.cross_checks;
  j["tolerances"] = to_json(r.tol);
  j["runtime_ms"] = r.timings_ms;
  j["input"] = r.input;
  return j;
}

}  // namespace io

}  // namespace gmeas
