#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gmeas/io.hpp"
#include "gmeas/measurement.hpp"
#include "gmeas/tester.hpp"

namespace gmeas {

struct AnalysisOptions {
  Tolerances tol;
  /// Also run the decomposition and qubit fast-path engines; a disagreement
  /// throws CrossCheckFailure.
  bool cross_check = false;
};

struct OutcomeReport {
  std::string label;
  Projection support;
  SupportCertificate k_support;
  /// dim(s J s) for the K-support s.
  Index compressed_dim = 0;
  Verdict class_singleton;
};

struct DecompositionReport {
  Index corner_rank = 0;
  Index pushed_section_dim = 0;
  std::vector<HermitianOperator> lambda;
  std::optional<Verdict> gpovm_extremal;
  std::optional<Verdict> measurement_extremal;
};

struct AnalysisReport {
  std::string digest;
  std::string kind;
  io::Json input;
  SectionDescriptor section;
  Index dim_j = 0;
  std::vector<OutcomeReport> outcomes;
  /// Set for tester inputs; same engine as gpovm_extremal on the channel section.
  std::optional<Verdict> tester_extremal;
  Verdict gpovm_extremal;
  Verdict measurement_extremal;
  Verdict dimension_bound;
  DecompositionReport decomposition;
  std::optional<QubitReport> qubit;
  std::map<std::string, bool> cross_checks;
  Tolerances tol;
  std::map<std::string, double> timings_ms;
};

/// Analyzes a gPOVM; `tester` enables the tester-specific engines.
AnalysisReport analyze(const GeneralizedPOVM& m, const std::optional<Tester>& tester, const AnalysisOptions& opts = {});
/// Parses a tester or gPOVM file and analyzes it.  `section` overrides the
/// section of a gPOVM file.
AnalysisReport analyze_json(const io::Json& input, const std::optional<Section>& section = std::nullopt,
                            const AnalysisOptions& opts = {});

namespace io {
Json to_json(const AnalysisReport& r);
}

}  // namespace gmeas
