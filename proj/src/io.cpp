#include "gmeas/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

namespace gmeas::io {

namespace {

const Json& field(const Json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) throw ParseError(std::string("missing field \"") + name + "\"");
  return j.at(name);
}

Index index_field(const Json& j, const char* name) {
  const Json& v = field(j, name);
  if (!v.is_number_integer() || v.get<long long>() < 1) {
    throw ParseError(std::string("field \"") + name + "\" must be a positive integer");
  }
  return static_cast<Index>(v.get<long long>());
}

Complex scalar_from_json(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  throw ParseError("complex scalar must be a number or [re, im]");
}

Json scalar_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

std::vector<std::string> labels_from_json(const Json& j, std::size_t n) {
  std::vector<std::string> out;
  if (!j.contains("outcomes")) {
    for (std::size_t u = 0; u < n; ++u) out.push_back(std::to_string(u));
    return out;
  }
  const Json& labels = j.at("outcomes");
  if (!labels.is_array() || labels.size() != n) throw ParseError("\"outcomes\" must list one label per element");
  for (const auto& l : labels) {
    if (l.is_string()) out.push_back(l.get<std::string>());
    else if (l.is_number_integer()) out.push_back(std::to_string(l.get<long long>()));
    else throw ParseError("outcome labels must be strings or integers");
  }
  return out;
}

std::vector<HermitianOperator> elements_from_json(const Json& j, const Tolerances& tol) {
  const Json& list = field(j, "elements");
  if (!list.is_array() || list.empty()) throw ParseError("\"elements\" must be a nonempty array");
  std::vector<HermitianOperator> out;
  for (const auto& e : list) out.push_back(operator_from_json(e, tol));
  return out;
}

}  // namespace

Json to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index k = 0; k < m.cols(); ++k) row.push_back(scalar_to_json(m(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json to_json(const ComplexVector& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(scalar_to_json(v[i]));
  return out;
}

Json to_json(const HermitianOperator& x) { return to_json(x.matrix()); }

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw ParseError("matrix must be a nonempty array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) throw ParseError("matrix rows must be nonempty arrays");
  Matrix m(static_cast<Index>(j.size()), static_cast<Index>(cols));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != cols) throw ParseError("matrix rows must have equal length");
    for (std::size_t k = 0; k < cols; ++k) m(static_cast<Index>(i), static_cast<Index>(k)) = scalar_from_json(j[i][k]);
  }
  return m;
}

ComplexVector vector_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw ParseError("vector must be a nonempty array");
  ComplexVector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Index>(i)] = scalar_from_json(j[i]);
  return v;
}

HermitianOperator operator_from_json(const Json& j, const Tolerances& tol) {
  const Matrix m = matrix_from_json(j);
  if (m.rows() != m.cols()) throw ParseError("operator matrix must be square");
  return HermitianOperator(m, tol.herm);
}

Json to_json(const SectionDescriptor& d) {
  Json j;
  j["type"] = to_string(d.kind);
  switch (d.kind) {
    case SectionKind::full: j["dim"] = d.dim; break;
    case SectionKind::channel:
      j["d_in"] = d.d_in;
      j["d_out"] = d.d_out;
      break;
    case SectionKind::marginal:
      j["sigma"] = to_json(*d.sigma);
      j["d_k"] = d.d_k;
      j["compress_singular"] = d.compress_singular;
      break;
    case SectionKind::custom: {
      j["dim"] = d.dim;
      Json basis = Json::array();
      for (const auto& b : d.basis) basis.push_back(to_json(b));
      j["basis"] = std::move(basis);
      break;
    }
  }
  return j;
}

Section section_from_json(const Json& j, const Tolerances& tol) {
  const Json& type = field(j, "type");
  if (!type.is_string()) throw ParseError("section \"type\" must be a string");
  const std::string t = type.get<std::string>();
  if (t == "full") return full_state_space(index_field(j, "dim"));
  if (t == "channel") return channel_section(index_field(j, "d_in"), index_field(j, "d_out"));
  if (t == "marginal") {
    const HermitianOperator sigma = operator_from_json(field(j, "sigma"), tol);
    const bool compress = j.value("compress_singular", true);
    return fixed_marginal_section(sigma, index_field(j, "d_k"), compress, tol);
  }
  if (t == "custom") {
    const Index d = index_field(j, "dim");
    const Json& basis = field(j, "basis");
    if (!basis.is_array()) throw ParseError("custom section \"basis\" must be an array");
    std::vector<HermitianOperator> elems;
    for (const auto& b : basis) elems.push_back(operator_from_json(b, tol));
    return custom_section(d, elems, tol);
  }
  throw ParseError("unknown section type \"" + t + "\"");
}

Json to_json(const Tester& t) {
  Json j;
  j["kind"] = "tester";
  j["d_in"] = t.d_in;
  j["d_out"] = t.d_out;
  j["outcomes"] = t.outcomes;
  Json elems = Json::array();
  for (const auto& e : t.elements) elems.push_back(to_json(e));
  j["elements"] = std::move(elems);
  return j;
}

Tester tester_from_json(const Json& j, const Tolerances& tol) {
  const Index d_in = index_field(j, "d_in");
  const Index d_out = index_field(j, "d_out");
  std::vector<HermitianOperator> elems = elements_from_json(j, tol);
  std::vector<std::string> labels = labels_from_json(j, elems.size());
  return make_tester(d_in, d_out, std::move(elems), std::move(labels), tol);
}

Json to_json(const GeneralizedPOVM& m) {
  Json j;
  j["kind"] = "gpovm";
  j["section"] = to_json(m.section.descriptor());
  j["outcomes"] = m.outcomes;
  Json elems = Json::array();
  for (const auto& e : m.elements) elems.push_back(to_json(e));
  j["elements"] = std::move(elems);
  return j;
}

GeneralizedPOVM gpovm_from_json(const Json& j, const std::optional<Section>& section, const Tolerances& tol) {
  std::vector<HermitianOperator> elems = elements_from_json(j, tol);
  std::vector<std::string> labels = labels_from_json(j, elems.size());
  const Section s = section ? *section : section_from_json(field(j, "section"), tol);
  return make_gpovm(s, std::move(elems), std::move(labels));
}

Json to_json(const Channel& t) {
  Json j;
  j["kind"] = "channel";
  j["d_in"] = t.d_in();
  j["d_out"] = t.d_out();
  Json kraus = Json::array();
  for (const auto& k : t.kraus()) kraus.push_back(to_json(k));
  j["kraus"] = std::move(kraus);
  return j;
}

Channel channel_from_json(const Json& j, const Tolerances& tol) {
  if (j.contains("kraus")) {
    const Json& list = j.at("kraus");
    if (!list.is_array() || list.empty()) throw ParseError("\"kraus\" must be a nonempty array");
    std::vector<Matrix> kraus;
    for (const auto& k : list) kraus.push_back(matrix_from_json(k));
    return Channel::from_kraus(std::move(kraus), tol);
  }
  return Channel::from_choi(index_field(j, "d_in"), index_field(j, "d_out"), operator_from_json(field(j, "choi"), tol),
                            tol);
}

Json to_json(const Projection& p) {
  Json j;
  j["kind"] = "projection";
  j["rank"] = p.rank();
  j["matrix"] = to_json(p.op());
  return j;
}

Projection projection_from_json(const Json& j, const Tolerances& tol) {
  Projection p;
  if (j.contains("matrix")) {
    p = Projection::from_operator(operator_from_json(j.at("matrix"), tol), tol);
  } else {
    const Json& vectors = field(j, "vectors");
    if (!vectors.is_array() || vectors.empty()) throw ParseError("\"vectors\" must be a nonempty array");
    Matrix cols;
    for (std::size_t k = 0; k < vectors.size(); ++k) {
      const ComplexVector v = vector_from_json(vectors[k]);
      if (k == 0) cols.resize(v.size(), static_cast<Index>(vectors.size()));
      if (v.size() != cols.rows()) throw ParseError("projection vectors must have equal length");
      cols.col(static_cast<Index>(k)) = v;
    }
    // Orthonormal basis of the span.
    Eigen::JacobiSVD<Matrix> svd(cols, Eigen::ComputeThinU);
    Index r = 0;
    const auto& sv = svd.singularValues();
    while (r < sv.size() && sv[r] > tol.rank * sv[0]) ++r;
    p = Projection::from_isometry(svd.matrixU().leftCols(r));
  }
  if (j.value("complement", false)) p = p.complement();
  return p;
}

Json state_to_json(const HermitianOperator& rho) { return {{"kind", "state"}, {"matrix", to_json(rho)}}; }

HermitianOperator state_from_json(const Json& j, const Tolerances& tol) {
  HermitianOperator rho = operator_from_json(field(j, "matrix"), tol);
  if (!rho.is_psd(tol)) throw NotAState("state is not positive");
  if (std::abs(rho.trace() - 1.0) > 1e2 * tol.num) throw NotAState("state does not have trace one");
  return rho;
}

Json to_json(const Verdict& v) {
  Json j;
  j["decision"] = to_string(v.decision);
  j["holds"] = v.holds();
  j["reason"] = v.reason;
  Json margins = Json::object();
  for (const auto& [k, x] : v.margins) margins[k] = std::isfinite(x) ? Json(x) : Json(std::to_string(x));
  j["margins"] = std::move(margins);
  if (const auto* p = v.perturbation()) {
    Json w;
    w["type"] = "perturbation";
    w["epsilon"] = p->epsilon;
    Json plus = Json::array();
    Json minus = Json::array();
    for (const auto& x : p->plus()) plus.push_back(to_json(x));
    for (const auto& x : p->minus()) minus.push_back(to_json(x));
    w["plus"] = std::move(plus);
    w["minus"] = std::move(minus);
    j["witness"] = std::move(w);
  } else if (const auto* x = v.operator_witness()) {
    j["witness"] = {{"type", "operator"}, {"matrix", to_json(*x)}};
  }
  return j;
}

Json to_json(const SupportCertificate& c) {
  Json j;
  j["rank"] = c.support.rank();
  j["projection"] = to_json(c.support.op());
  j["point"] = to_json(c.point);
  j["residual"] = c.residual;
  j["interior_margin"] = std::isfinite(c.interior_margin) ? Json(c.interior_margin) : Json("inf");
  j["dual_certified"] = c.dual_witness.has_value();
  j["iterations"] = c.iterations;
  return j;
}

Json to_json(const Tolerances& t) {
  return {{"herm", t.herm}, {"rank", t.rank}, {"num", t.num}, {"sdp", t.sdp}, {"after_solve", t.after_solve()}};
}

std::string kind_of(const Json& j) {
  if (!j.is_object()) throw ParseError("top-level JSON value must be an object");
  if (j.contains("kind")) {
    if (!j.at("kind").is_string()) throw ParseError("\"kind\" must be a string");
    const std::string k = j.at("kind").get<std::string>();
    if (k == "tester" || k == "gpovm" || k == "channel" || k == "projection" || k == "state" ||
        k == "section") return k;
    throw ParseError("unknown kind \"" + k + "\"");
  }
  if (j.contains("type")) return "section";
  if (j.contains("d_in") && j.contains("elements")) return "tester";
  if (j.contains("section") && j.contains("elements")) return "gpovm";
  throw ParseError("cannot tell what kind of object this is");
}

Json parse(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
}

Json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string digest(const Json& j) {
  const std::string text = j.dump();
  unsigned char out[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(text.data(), text.size(), out, &len, EVP_sha256(), nullptr);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(out[i]);
  return hex.str();
}

}  // namespace gmeas::io
