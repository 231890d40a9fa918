#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "gmeas/analysis.hpp"
#include "gmeas/errors.hpp"
#include "gmeas/io.hpp"
#include "gmeas/log.hpp"
#include "gmeas/random.hpp"

namespace {

using gmeas::io::Json;

enum Exit { kOk = 0, kInvalid = 1, kParse = 2, kDisagreement = 3 };

struct Failure {
  int code;
  std::string message;
};

// Runs `f` and maps exceptions to the exit-code contract.
template <class F>
std::optional<Failure> guarded(F&& f) {
  try {
    f();
    return std::nullopt;
  } catch (const gmeas::CrossCheckFailure& e) {
    return Failure{kDisagreement, std::string("cross-check disagreement: ") + e.what()};
  } catch (const gmeas::io::ParseError& e) {
    return Failure{kParse, e.what()};
  } catch (const Json::exception& e) {
    return Failure{kParse, std::string("malformed input: ") + e.what()};
  } catch (const gmeas::Error& e) {
    return Failure{kInvalid, e.what()};
  } catch (const std::invalid_argument& e) {
    return Failure{kInvalid, e.what()};
  }
}

struct Common {
  gmeas::Tolerances tol;
  std::string output;
  bool verbose = false;
};

void add_tolerances(CLI::App* cmd, gmeas::Tolerances& tol) {
  cmd->add_option("--tol", tol.sdp, "Solver accuracy; decisions on solver output use 10x this")->capture_default_str();
  cmd->add_option("--tol-herm", tol.herm, "Hermiticity tolerance")->capture_default_str();
  cmd->add_option("--tol-rank", tol.rank, "Relative eigenvalue threshold for supports")->capture_default_str();
  cmd->add_option("--tol-num", tol.num, "Relative tolerance for operator equalities")->capture_default_str();
}

void emit(const Json& j, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream out(path);
  if (!out) throw gmeas::io::ParseError("cannot write " + path);
  out << j.dump(2) << "\n";
}

Json load(const std::string& path) {
  if (path == "-") {
    std::string text((std::istreambuf_iterator<char>(std::cin)), std::istreambuf_iterator<char>());
    return gmeas::io::parse(text);
  }
  return gmeas::io::read_file(path);
}

// Inline JSON, "full:d", "channel:d_in,d_out", or a path to a JSON file.
gmeas::Section parse_section(const std::string& text, const gmeas::Tolerances& tol) {
  if (text.rfind("full:", 0) == 0) return gmeas::full_state_space(std::stol(text.substr(5)));
  if (text.rfind("channel:", 0) == 0) {
    const std::string dims = text.substr(8);
    const auto comma = dims.find(',');
    if (comma == std::string::npos) throw gmeas::io::ParseError("expected channel:d_in,d_out");
    return gmeas::channel_section(std::stol(dims.substr(0, comma)), std::stol(dims.substr(comma + 1)));
  }
  const Json j = (!text.empty() && text.front() == '{') ? gmeas::io::parse(text) : gmeas::io::read_file(text);
  return gmeas::io::section_from_json(j, tol);
}

gmeas::HermitianOperator parse_sigma(const std::string& text, double theta, const gmeas::Tolerances& tol) {
  using gmeas::HermitianOperator;
  if (text == "half") return HermitianOperator::identity(2) / 2.0;
  if (text == "marginal") {
    const auto phi = HermitianOperator::outer(gmeas::example5_vector(theta));
    return gmeas::partial_trace(phi, {2, 2}, gmeas::Factor::first);
  }
  const Json j = (!text.empty() && text.front() == '[') ? gmeas::io::parse(text) : gmeas::io::read_file(text);
  return gmeas::io::operator_from_json(j.is_object() ? j.at("matrix") : j, tol);
}

Json error_json(const Failure& f) { return {{"error", f.message}, {"exit_code", f.code}}; }

int finish(const std::optional<Failure>& f) {
  if (!f) return kOk;
  std::cerr << "gmeas: " << f->message << "\n";
  std::cout << error_json(*f).dump(2) << "\n";
  return f->code;
}

Json validate_json(const Json& input, const gmeas::Tolerances& tol, int& code) {
  const std::string kind = gmeas::io::kind_of(input);
  Json report{{"kind", kind}};
  auto mark_invalid = [&](const std::string& reason) {
    report["valid"] = false;
    report["reason"] = reason;
    code = kInvalid;
  };
  report["valid"] = true;
  code = kOk;
  try {
    if (kind == "tester") {
      const gmeas::Tester t = gmeas::io::tester_from_json(input, tol);
      const gmeas::Verdict v = gmeas::validate(gmeas::tester_to_gpovm(t), tol);
      report["margins"] = gmeas::io::to_json(v)["margins"];
      report["sigma"] = gmeas::io::to_json(t.sigma);
      report["reason"] = "valid tester";
    } else if (kind == "gpovm") {
      const gmeas::Verdict v = gmeas::validate(gmeas::io::gpovm_from_json(input, std::nullopt, tol), tol);
      report["margins"] = gmeas::io::to_json(v)["margins"];
      if (v.holds()) report["reason"] = v.reason;
      else mark_invalid(v.reason);
    } else if (kind == "channel") {
      const gmeas::Channel c = gmeas::io::channel_from_json(input, tol);
      report["kraus_rank"] = c.kraus().size();
      report["reason"] = "valid channel";
    } else if (kind == "projection") {
      report["rank"] = gmeas::io::projection_from_json(input, tol).rank();
      report["reason"] = "valid projection";
    } else if (kind == "state") {
      report["min_eigenvalue"] = gmeas::io::state_from_json(input, tol).min_eigenvalue();
      report["reason"] = "valid state";
    } else {
      report["dim_J"] = gmeas::io::section_from_json(input, tol).span().dim();
      report["reason"] = "valid section";
    }
  } catch (const gmeas::io::ParseError&) {
    throw;
  } catch (const gmeas::CrossCheckFailure&) {
    throw;
  } catch (const gmeas::Error& e) {
    mark_invalid(e.what());
  }
  return report;
}

gmeas::GeneralizedPOVM load_gpovm(const Json& input, const std::optional<gmeas::Section>& section,
                                  const gmeas::Tolerances& tol) {
  const std::string kind = gmeas::io::kind_of(input);
  if (kind == "tester") {
    if (section) throw gmeas::io::ParseError("a section override applies to gpovm inputs only");
    return gmeas::tester_to_gpovm(gmeas::io::tester_from_json(input, tol));
  }
  if (kind == "gpovm") return gmeas::io::gpovm_from_json(input, section, tol);
  throw gmeas::io::ParseError("expected a tester or gpovm file, got " + kind);
}

std::size_t element_index(const gmeas::GeneralizedPOVM& m, const std::string& which) {
  const auto it = std::find(m.outcomes.begin(), m.outcomes.end(), which);
  if (it != m.outcomes.end()) return static_cast<std::size_t>(it - m.outcomes.begin());
  std::size_t pos = 0;
  const unsigned long u = std::stoul(which, &pos);
  if (pos != which.size() || u >= m.size()) throw std::invalid_argument("no outcome " + which);
  return u;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized measurements on sections of quantum state spaces"};
  app.require_subcommand(1);
  Common common;
  app.add_flag("-v,--verbose", common.verbose, "Debug logging to stderr");

  // validate
  std::string validate_file;
  auto* validate = app.add_subcommand("validate", "Check the invariants of a tester, gPOVM, channel, state, projection or section");
  validate->add_option("file", validate_file, "Input JSON ('-' for stdin)")->required();
  add_tolerances(validate, common.tol);

  // analyze
  std::vector<std::string> analyze_files;
  std::string analyze_section;
  bool cross_check = false;
  unsigned jobs = 1;
  auto* analyze = app.add_subcommand("analyze", "Full extremality report for testers and gPOVMs");
  analyze->add_option("files", analyze_files, "Input JSON files")->required();
  analyze->add_option("--section", analyze_section, "Section override for gPOVM inputs: JSON, file, full:d or channel:a,b");
  analyze->add_flag("--cross-check", cross_check, "Run the decomposition and qubit engines and require agreement");
  analyze->add_option("-j,--jobs", jobs, "Parallel workers over input files")->check(CLI::PositiveNumber);
  analyze->add_option("-o,--output", common.output, "Output file");
  add_tolerances(analyze, common.tol);

  // generate
  std::string gen_kind;
  long d_in = 2, d_out = 2, outcomes = 2, rank = 0, kraus_rank = 0, dim = 2;
  std::uint64_t seed = 0;
  std::string povm_kind = "generic";
  auto* generate = app.add_subcommand("generate", "Seeded random tester, channel, state or POVM");
  generate->add_option("kind", gen_kind, "tester | channel | state | povm")
      ->required()
      ->check(CLI::IsMember({"tester", "channel", "state", "povm"}));
  generate->add_option("--din", d_in, "Input dimension")->check(CLI::PositiveNumber);
  generate->add_option("--dout", d_out, "Output dimension")->check(CLI::PositiveNumber);
  generate->add_option("--dim", dim, "Dimension for state and povm")->check(CLI::PositiveNumber);
  generate->add_option("--outcomes", outcomes, "Number of outcomes")->check(CLI::PositiveNumber);
  generate->add_option("--rank", rank, "Rank of sigma (tester) or of the state; 0 for full")->check(CLI::NonNegativeNumber);
  generate->add_option("--kraus-rank", kraus_rank, "Kraus rank of the channel; 0 for d_in * d_out")
      ->check(CLI::NonNegativeNumber);
  generate->add_option("--povm", povm_kind, "pvm | generic | low-rank")
      ->check(CLI::IsMember({"pvm", "generic", "low-rank"}));
  generate->add_option("--seed", seed, "Random seed");
  generate->add_option("-o,--output", common.output, "Output file");

  // example5
  double theta = std::numbers::pi / 4;
  std::string sigma_text = "half";
  auto* example5 = app.add_subcommand("example5", "Two-outcome qubit tester built from cos(theta)|00> + sin(theta)|11>");
  example5->add_option("--theta", theta, "Angle")->capture_default_str();
  example5->add_option("--sigma", sigma_text, "half | marginal | JSON matrix or file")->capture_default_str();
  example5->add_option("-o,--output", common.output, "Output file");

  // ksupport
  std::string ks_file, ks_element = "0", ks_section;
  auto* ksupport = app.add_subcommand("ksupport", "K-support of one outcome's class");
  ksupport->add_option("file", ks_file, "Tester or gPOVM file")->required();
  ksupport->add_option("--element", ks_element, "Outcome label or index")->capture_default_str();
  ksupport->add_option("--section", ks_section, "Section override for gPOVM inputs");
  add_tolerances(ksupport, common.tol);

  // pk
  std::string pk_file, pk_section;
  auto* pk = app.add_subcommand("pk", "Membership of a projection in P_K");
  pk->add_option("file", pk_file, "Projection file")->required();
  pk->add_option("--section", pk_section, "Section: JSON, file, full:d or channel:a,b")->required();
  add_tolerances(pk, common.tol);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kParse;
  }
  if (common.verbose) gmeas::logger().set_level(spdlog::level::debug);
  const gmeas::Tolerances& tol = common.tol;

  if (*validate) {
    int code = kOk;
    const auto failure = guarded([&] { emit(validate_json(load(validate_file), tol, code), ""); });
    return failure ? finish(failure) : code;
  }

  if (*analyze) {
    gmeas::AnalysisOptions opts;
    opts.tol = tol;
    opts.cross_check = cross_check;
    std::optional<gmeas::Section> section;
    if (const auto f = guarded([&] {
          if (!analyze_section.empty()) section = parse_section(analyze_section, tol);
        })) {
      return finish(f);
    }

    const std::size_t n = analyze_files.size();
    std::vector<Json> results(n);
    std::vector<std::optional<Failure>> failures(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i = next++; i < n; i = next++) {
        failures[i] = guarded([&] {
          results[i] = gmeas::io::to_json(gmeas::analyze_json(load(analyze_files[i]), section, opts));
        });
      }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < std::min<std::size_t>(jobs, n); ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    int code = kOk;
    for (std::size_t i = 0; i < n; ++i) {
      if (failures[i]) {
        std::cerr << "gmeas: " << analyze_files[i] << ": " << failures[i]->message << "\n";
        results[i] = error_json(*failures[i]);
        code = std::max(code, failures[i]->code);
      }
    }
    Json out;
    if (n == 1) {
      out = results.front();
    } else {
      out = Json::array();
      for (std::size_t i = 0; i < n; ++i) out.push_back({{"file", analyze_files[i]}, {"result", results[i]}});
    }
    if (const auto f = guarded([&] { emit(out, common.output); })) return finish(f);
    return code;
  }

  if (*generate) {
    return finish(guarded([&] {
      gmeas::Rng rng(seed);
      const gmeas::PovmKind kind = povm_kind == "pvm"       ? gmeas::PovmKind::pvm
                                   : povm_kind == "low-rank" ? gmeas::PovmKind::low_rank
                                                             : gmeas::PovmKind::generic;
      Json j;
      if (gen_kind == "tester") {
        const auto sigma = gmeas::random_state(d_in, rng, rank);
        j = gmeas::io::to_json(gmeas::random_tester(d_in, d_out, outcomes, sigma, rng, kind));
      } else if (gen_kind == "channel") {
        j = gmeas::io::to_json(gmeas::random_channel(d_in, d_out, kraus_rank > 0 ? kraus_rank : d_in * d_out, rng));
      } else if (gen_kind == "state") {
        j = gmeas::io::state_to_json(gmeas::random_state(dim, rng, rank));
      } else {
        auto elems = kind == gmeas::PovmKind::pvm ? gmeas::random_pvm(dim, outcomes, rng)
                                                  : gmeas::random_povm(dim, outcomes, rng);
        j = gmeas::io::to_json(gmeas::make_gpovm(gmeas::full_state_space(dim), std::move(elems)));
      }
      j["seed"] = seed;
      emit(j, common.output);
    }));
  }

  if (*example5) {
    return finish(guarded([&] {
      const auto sigma = parse_sigma(sigma_text, theta, tol);
      Json j = gmeas::io::to_json(gmeas::example5_tester(theta, sigma, tol));
      j["theta"] = theta;
      emit(j, common.output);
    }));
  }

  if (*ksupport) {
    return finish(guarded([&] {
      std::optional<gmeas::Section> section;
      if (!ks_section.empty()) section = parse_section(ks_section, tol);
      const gmeas::GeneralizedPOVM m = load_gpovm(load(ks_file), section, tol);
      const std::size_t u = element_index(m, ks_element);
      const auto cert = gmeas::k_support(m.section, m.elements[u], tol);
      Json j;
      j["element"] = m.outcomes[u];
      j["support_rank"] = gmeas::support(m.elements[u], tol).rank();
      j["k_support_rank"] = cert.support.rank();
      j["k_support"] = gmeas::io::to_json(cert);
      j["tolerances"] = gmeas::io::to_json(tol);
      emit(j, "");
    }));
  }

  if (*pk) {
    return finish(guarded([&] {
      const gmeas::Section section = parse_section(pk_section, tol);
      const gmeas::Projection p = gmeas::io::projection_from_json(load(pk_file), tol);
      const gmeas::Verdict v = gmeas::is_in_pk(section, p, tol);
      Json j;
      j["in_pk"] = v.holds();
      j["rank"] = p.rank();
      j["verdict"] = gmeas::io::to_json(v);
      j["tolerances"] = gmeas::io::to_json(tol);
      emit(j, "");
    }));
  }
  return kOk;
}
