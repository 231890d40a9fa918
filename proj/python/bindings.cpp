#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gmeas/analysis.hpp"
#include "gmeas/errors.hpp"
#include "gmeas/io.hpp"
#include "gmeas/measurement.hpp"
#include "gmeas/psdgeo.hpp"
#include "gmeas/random.hpp"
#include "gmeas/section.hpp"
#include "gmeas/tester.hpp"

namespace py = pybind11;
using namespace gmeas;

namespace {

HermitianOperator herm(const Matrix& m, const Tolerances& tol) { return HermitianOperator(m, tol.herm); }

std::vector<HermitianOperator> herm_list(const std::vector<Matrix>& ms, const Tolerances& tol) {
  std::vector<HermitianOperator> out;
  out.reserve(ms.size());
  for (const auto& m : ms) out.push_back(herm(m, tol));
  return out;
}

std::vector<Matrix> matrices(const std::vector<HermitianOperator>& xs) {
  std::vector<Matrix> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(x.matrix());
  return out;
}

py::object to_python(const io::Json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

io::Json from_python(const py::object& o) {
  return io::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Extremality of generalized POVMs, testers and measurements on sections of the state space";

  auto base = py::register_exception<Error>(m, "GmeasError", PyExc_ValueError);
  py::register_exception<CrossCheckFailure>(m, "CrossCheckFailure", base.ptr());
  py::register_exception<io::ParseError>(m, "ParseError", PyExc_ValueError);

  py::class_<Tolerances>(m, "Tolerances")
      .def(py::init([](double herm, double rank, double num, double sdp) { return Tolerances{herm, rank, num, sdp}; }),
           py::arg("herm") = 1e-9, py::arg("rank") = 1e-9, py::arg("num") = 1e-9, py::arg("sdp") = 1e-7)
      .def_readwrite("herm", &Tolerances::herm)
      .def_readwrite("rank", &Tolerances::rank)
      .def_readwrite("num", &Tolerances::num)
      .def_readwrite("sdp", &Tolerances::sdp)
      .def_property_readonly("after_solve", &Tolerances::after_solve);

  py::class_<Verdict>(m, "Verdict")
      .def_property_readonly("decision", [](const Verdict& v) { return std::string(to_string(v.decision)); })
      .def_property_readonly("holds", &Verdict::holds)
      .def_readonly("reason", &Verdict::reason)
      .def_readonly("margins", &Verdict::margins)
      .def("to_dict", [](const Verdict& v) { return to_python(io::to_json(v)); })
      .def("__bool__", &Verdict::holds)
      .def("__repr__", [](const Verdict& v) { return "<Verdict " + std::string(to_string(v.decision)) + ": " + v.reason + ">"; });

  py::class_<Section>(m, "Section")
      .def_property_readonly("dim", &Section::dim)
      .def_property_readonly("span_dim", [](const Section& s) { return s.span().dim(); })
      .def_property_readonly("annihilator_dim", [](const Section& s) { return s.annihilator().dim(); })
      .def_property_readonly("kind", [](const Section& s) { return std::string(to_string(s.descriptor().kind)); })
      .def("contains_state", [](const Section& s, const Matrix& rho, const Tolerances& tol) {
             return s.contains_state(herm(rho, tol), tol);
           }, py::arg("rho"), py::arg("tol") = Tolerances{})
      .def("to_dict", [](const Section& s) { return to_python(io::to_json(s.descriptor())); });

  m.def("full_state_space", &full_state_space, py::arg("d"));
  m.def("channel_section", &channel_section, py::arg("d_in"), py::arg("d_out"));
  m.def("fixed_marginal_section",
        [](const Matrix& sigma, Index d_k, bool compress, const Tolerances& tol) {
          return fixed_marginal_section(herm(sigma, tol), d_k, compress, tol);
        },
        py::arg("sigma"), py::arg("d_k"), py::arg("compress_singular") = true, py::arg("tol") = Tolerances{});
  m.def("custom_section",
        [](Index d, const std::vector<Matrix>& spanning, const Tolerances& tol) {
          const auto ops = herm_list(spanning, tol);
          return custom_section(d, ops, tol);
        },
        py::arg("d"), py::arg("spanning"), py::arg("tol") = Tolerances{});

  py::class_<Tester>(m, "Tester")
      .def_readonly("d_in", &Tester::d_in)
      .def_readonly("d_out", &Tester::d_out)
      .def_readonly("outcomes", &Tester::outcomes)
      .def_property_readonly("elements", [](const Tester& t) { return matrices(t.elements); })
      .def_property_readonly("sigma", [](const Tester& t) { return Matrix(t.sigma.matrix()); })
      .def("to_dict", [](const Tester& t) { return to_python(io::to_json(t)); });

  m.def("make_tester",
        [](Index d_in, Index d_out, const std::vector<Matrix>& elements, std::vector<std::string> outcomes,
           const Tolerances& tol) { return make_tester(d_in, d_out, herm_list(elements, tol), std::move(outcomes), tol); },
        py::arg("d_in"), py::arg("d_out"), py::arg("elements"), py::arg("outcomes") = std::vector<std::string>{},
        py::arg("tol") = Tolerances{});
  m.def("example5_tester",
        [](double theta, const Matrix& sigma, const Tolerances& tol) { return example5_tester(theta, herm(sigma, tol), tol); },
        py::arg("theta"), py::arg("sigma"), py::arg("tol") = Tolerances{});
  m.def("example5_vector", &example5_vector, py::arg("theta"));
  m.def("random_tester",
        [](Index d_in, Index d_out, Index n, std::uint64_t seed, const std::string& kind) {
          Rng rng(seed);
          if (kind != "pvm" && kind != "low-rank" && kind != "generic") throw py::value_error("unknown POVM kind " + kind);
          const PovmKind k = kind == "pvm" ? PovmKind::pvm : kind == "low-rank" ? PovmKind::low_rank : PovmKind::generic;
          const HermitianOperator sigma = random_state(d_in, rng);
          return random_tester(d_in, d_out, n, sigma, rng, k);
        },
        py::arg("d_in"), py::arg("d_out"), py::arg("outcomes"), py::arg("seed"), py::arg("kind") = "generic");

  py::class_<GeneralizedPOVM>(m, "GeneralizedPOVM")
      .def_readonly("section", &GeneralizedPOVM::section)
      .def_readonly("outcomes", &GeneralizedPOVM::outcomes)
      .def_property_readonly("elements", [](const GeneralizedPOVM& g) { return matrices(g.elements); })
      .def("__len__", &GeneralizedPOVM::size)
      .def("to_dict", [](const GeneralizedPOVM& g) { return to_python(io::to_json(g)); });

  m.def("make_gpovm",
        [](const Section& s, const std::vector<Matrix>& elements, std::vector<std::string> outcomes, const Tolerances& tol) {
          return make_gpovm(s, herm_list(elements, tol), std::move(outcomes));
        },
        py::arg("section"), py::arg("elements"), py::arg("outcomes") = std::vector<std::string>{},
        py::arg("tol") = Tolerances{});
  m.def("tester_to_gpovm", py::overload_cast<const Tester&>(&tester_to_gpovm), py::arg("tester"));

  m.def("validate", &validate, py::arg("m"), py::arg("tol") = Tolerances{});
  m.def("apply",
        [](const GeneralizedPOVM& g, const Matrix& rho, const Tolerances& tol) { return apply(g, herm(rho, tol), tol); },
        py::arg("m"), py::arg("rho"), py::arg("tol") = Tolerances{});
  m.def("equivalent", &equivalent, py::arg("m"), py::arg("n"), py::arg("tol") = Tolerances{});
  m.def("is_extremal_gpovm", &is_extremal_gpovm, py::arg("m"), py::arg("tol") = Tolerances{});
  m.def("is_extremal_measurement",
        py::overload_cast<const GeneralizedPOVM&, const Tolerances&>(&is_extremal_measurement), py::arg("m"),
        py::arg("tol") = Tolerances{});
  m.def("dimension_bound",
        [](const GeneralizedPOVM& g, const Tolerances& tol) { return dimension_bound(measurement_of(g), tol); },
        py::arg("m"), py::arg("tol") = Tolerances{});

  py::class_<SupportCertificate>(m, "SupportCertificate")
      .def_property_readonly("support", [](const SupportCertificate& c) { return Matrix(c.support.op().matrix()); })
      .def_property_readonly("rank", [](const SupportCertificate& c) { return c.support.rank(); })
      .def_property_readonly("point", [](const SupportCertificate& c) { return Matrix(c.point.matrix()); })
      .def_readonly("residual", &SupportCertificate::residual)
      .def_readonly("interior_margin", &SupportCertificate::interior_margin)
      .def_property_readonly("dual_witness", [](const SupportCertificate& c) -> std::optional<Matrix> {
        if (!c.dual_witness) return std::nullopt;
        return c.dual_witness->matrix();
      });

  m.def("k_support",
        [](const Section& s, const Matrix& a, const Tolerances& tol) { return k_support(s, herm(a, tol), tol); },
        py::arg("section"), py::arg("a"), py::arg("tol") = Tolerances{});
  m.def("is_in_pk",
        [](const Section& s, const Matrix& p, const Tolerances& tol) {
          return is_in_pk(s, Projection::from_operator(herm(p, tol), tol), tol);
        },
        py::arg("section"), py::arg("p"), py::arg("tol") = Tolerances{});
  m.def("class_is_singleton",
        [](const Section& s, const Matrix& a, const Tolerances& tol) { return class_is_singleton(s, herm(a, tol), tol); },
        py::arg("section"), py::arg("a"), py::arg("tol") = Tolerances{});

  py::class_<QubitReport>(m, "QubitReport")
      .def_readonly("tester", &QubitReport::tester)
      .def_readonly("tester_reason", &QubitReport::tester_reason)
      .def_readonly("measurement", &QubitReport::measurement)
      .def_readonly("measurement_reason", &QubitReport::measurement_reason)
      .def_readonly("cross_checks", &QubitReport::cross_checks)
      .def_readonly("near_threshold", &QubitReport::near_threshold)
      .def("all_agree", &QubitReport::all_agree);

  m.def("qubit_tester_extremal", &qubit_tester_extremal, py::arg("tester"), py::arg("tol") = Tolerances{},
        py::arg("cross_check") = true);
  m.def("qubit_measurement_extremal", &qubit_measurement_extremal, py::arg("tester"), py::arg("tol") = Tolerances{},
        py::arg("cross_check") = true);

  m.def("analyze",
        [](const py::object& input, const py::object& section, bool cross_check, const Tolerances& tol) {
          std::optional<Section> override;
          if (!section.is_none()) override = section.cast<Section>();
          AnalysisOptions opts;
          opts.tol = tol;
          opts.cross_check = cross_check;
          return to_python(io::to_json(analyze_json(from_python(input), override, opts)));
        },
        py::arg("input"), py::arg("section") = py::none(), py::arg("cross_check") = false,
        py::arg("tol") = Tolerances{});
  m.def("digest", [](const py::object& input) { return io::digest(from_python(input)); }, py::arg("input"));
}
