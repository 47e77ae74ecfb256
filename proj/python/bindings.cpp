// Python bindings for the main operations: construction, property checks,
// subunital search, standardness certification, and the verification suite.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "json.hpp"
#include "unitals/embed.hpp"
#include "unitals/verify.hpp"

namespace py = pybind11;
using namespace unitals;

namespace {

py::object json_to_py(const std::string& dump) {
  return py::module_::import("json").attr("loads")(dump);
}

QuadExtension ext_for(uint32_t q) {
  uint32_t p = 0, n = 0;
  if (!prime_power(q, p, n))
    throw std::invalid_argument(std::to_string(q) + " is not a prime power");
  return make_quad_ext(p, n);
}

struct PyUnital {
  QuadExtension ext;
  HermitianUnital u;

  explicit PyUnital(uint32_t q) : ext(ext_for(q)), u(build_unital(ext)) {}

  uint32_t v() const { return u.v(); }
  uint32_t b() const { return u.b(); }
  uint32_t q() const { return u.q; }

  std::vector<std::array<uint32_t, 3>> points() const {
    std::vector<std::array<uint32_t, 3>> out;
    for (const auto& p : u.points)
      out.push_back({p.x.code, p.y.code, p.z.code});
    return out;
  }
  std::vector<std::vector<uint32_t>> blocks() const { return u.blocks; }

  std::string export_text() const { return export_unital(u, ExportFormat::text); }
  std::string export_json() const { return export_unital(u, ExportFormat::json); }

  py::object onan(const std::string& mode, uint64_t count, uint64_t seed) const {
    ScanOptions opts;
    if (mode == "sample") {
      opts.mode = ScanMode::sample;
      opts.sample_count = count;
      opts.seed = seed;
    }
    auto rep = find_onan_configs(LinearSpace::from_unital(u), opts);
    return json_to_py(report_json(rep));
  }

  py::object translation_transitivity() const {
    return json_to_py(report_json(check_translation_transitivity(u)));
  }

  py::object translation_closure() const {
    return json_to_py(report_json(check_translation_closure(u),
                                  "translation-closure"));
  }

  py::object tangent_meet() const {
    return json_to_py(report_json(check_tangent_meet(u)));
  }

  py::object wilbrink() const {
    return json_to_py(report_json(wilbrink_report(u)));
  }

  bool baer_all() const {
    for (uint32_t b = 0; b < u.b(); ++b)
      if (!baer_check(u, b)) return false;
    return true;
  }

  py::object search(uint32_t sub_order, const std::string& mode, uint64_t cap,
                    uint64_t seed, uint32_t workers) const {
    SearchOptions opts;
    opts.seed = seed;
    opts.workers = workers;
    opts.cap = cap;
    if (mode == "reduced") opts.mode = SearchMode::reduced;
    else if (mode == "capped") opts.mode = SearchMode::capped;
    auto res = find_subunitals(u, sub_order, opts);
    nlohmann::json doc;
    doc["mode_used"] =
        res.mode_used == SearchMode::reduced ? "reduced" : "exhaustive";
    doc["capped"] = res.capped;
    doc["nodes_visited"] = res.nodes_visited;
    if (res.justification)
      doc["justification"] =
          nlohmann::json::parse(justification_json(*res.justification));
    doc["certificates"] = nlohmann::json::array();
    for (const auto& c : res.certificates)
      doc["certificates"].push_back(nlohmann::json::parse(certificate_json(c)));
    return json_to_py(doc.dump());
  }

  py::object standardness(const std::vector<uint32_t>& points,
                          uint32_t order) const {
    auto cert = certify_subunital(u, points, order);
    return json_to_py(check_standard_json(check_standard(u, cert)));
  }

  py::object disjointness(const std::vector<uint32_t>& points,
                          uint32_t order) const {
    auto cert = certify_subunital(u, points, order);
    return json_to_py(disjointness_json(disjointness_check(u, cert)));
  }

  py::object embedded_subunitals(uint32_t small_q) const {
    auto small = ext_for(small_q);
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& eta : enumerate_ext_embeddings(small, ext)) {
      auto cert = standard_subunital(u, eta);
      auto entry = nlohmann::json::parse(certificate_json(cert));
      entry["eta"] = eta.eta.gen_image.code;
      arr.push_back(entry);
    }
    return json_to_py(arr.dump());
  }
};

}  // namespace

PYBIND11_MODULE(unitals, m) {
  m.doc() = "exact finite hermitian unitals: construction, verification, "
            "subunital search, standard embeddings";

  py::class_<PyUnital>(m, "Unital")
      .def(py::init<uint32_t>(), py::arg("q"))
      .def_property_readonly("v", &PyUnital::v)
      .def_property_readonly("b", &PyUnital::b)
      .def_property_readonly("q", &PyUnital::q)
      .def("points", &PyUnital::points)
      .def("blocks", &PyUnital::blocks)
      .def("export_text", &PyUnital::export_text)
      .def("export_json", &PyUnital::export_json)
      .def("onan", &PyUnital::onan, py::arg("mode") = "exhaustive",
           py::arg("count") = 0, py::arg("seed") = 0)
      .def("translation_transitivity", &PyUnital::translation_transitivity)
      .def("translation_closure", &PyUnital::translation_closure)
      .def("tangent_meet", &PyUnital::tangent_meet)
      .def("wilbrink", &PyUnital::wilbrink)
      .def("baer_all", &PyUnital::baer_all)
      .def("search", &PyUnital::search, py::arg("sub_order"),
           py::arg("mode") = "exhaustive", py::arg("cap") = 0,
           py::arg("seed") = 0, py::arg("workers") = 1)
      .def("standardness", &PyUnital::standardness, py::arg("points"),
           py::arg("order"))
      .def("disjointness", &PyUnital::disjointness, py::arg("points"),
           py::arg("order"))
      .def("embedded_subunitals", &PyUnital::embedded_subunitals,
           py::arg("small_q"));

  m.def("build", [](uint32_t q) { return PyUnital(q); }, py::arg("q"),
        "construct the hermitian unital of order q");

  m.def(
      "count_embeddings",
      [](uint32_t small_q, uint32_t big_q) {
        auto small = ext_for(small_q);
        auto big = ext_for(big_q);
        return enumerate_ext_embeddings(small, big).size();
      },
      py::arg("small_q"), py::arg("big_q"),
      "number of quadratic-extension embeddings F_{s^2}|F_s -> F_{b^2}|F_b");

  m.def(
      "verify_order2",
      [](uint32_t q) { return json_to_py(order2_json(verify_order2_theorem(ext_for(q)))); },
      py::arg("q"), "order-2 subunital existence report for F_{q^2}|F_q");

  m.def(
      "field_description",
      [](uint32_t p, uint32_t m) { return make_field(p, m)->describe(); },
      py::arg("p"), py::arg("m"));

  m.def(
      "run_suite",
      [](uint64_t seed, const std::vector<std::string>& only,
         uint32_t workers) {
        SuiteOptions opts;
        opts.seed = seed;
        opts.only = only;
        opts.workers = workers;
        auto res = run_verification_suite(opts);
        auto obj = py::module_::import("json").attr("loads")(res.report_json);
        obj["all_pass"] = res.all_pass;
        return obj;
      },
      py::arg("seed") = 0, py::arg("only") = std::vector<std::string>{},
      py::arg("workers") = 2, "run the verification suite");
}
