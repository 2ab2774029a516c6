// Python bindings: thin wrappers around the function/relation types plus the
// solver, composition, verification, and battery entry points.  Report-like
// results cross the boundary as plain dicts built from the JSON serializers,
// so the Python surface matches the CLI output field for field.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <string>
#include <vector>

#include "advlab/adversary.hpp"
#include "advlab/boolfn.hpp"
#include "advlab/compose.hpp"
#include "advlab/errors.hpp"
#include "advlab/harness.hpp"
#include "advlab/json_io.hpp"
#include "advlab/matrix.hpp"

namespace py = pybind11;
using namespace advlab;

namespace {

py::object json_to_py(const Json& j) {
  switch (j.type()) {
    case Json::value_t::null:
      return py::none();
    case Json::value_t::boolean:
      return py::bool_(j.get<bool>());
    case Json::value_t::number_integer:
      return py::int_(j.get<std::int64_t>());
    case Json::value_t::number_unsigned:
      return py::int_(j.get<std::uint64_t>());
    case Json::value_t::number_float:
      return py::float_(j.get<double>());
    case Json::value_t::string:
      return py::str(j.get<std::string>());
    case Json::value_t::array: {
      py::list out;
      for (const auto& item : j) out.append(json_to_py(item));
      return out;
    }
    case Json::value_t::object: {
      py::dict out;
      for (const auto& [key, value] : j.items()) out[py::str(key)] = json_to_py(value);
      return out;
    }
    default:
      throw ConfigError("unsupported JSON value type");
  }
}

Json py_to_json(py::handle h) {
  if (h.is_none()) return nullptr;
  if (py::isinstance<py::bool_>(h)) return h.cast<bool>();
  if (py::isinstance<py::int_>(h)) return h.cast<std::int64_t>();
  if (py::isinstance<py::float_>(h)) return h.cast<double>();
  if (py::isinstance<py::str>(h)) return h.cast<std::string>();
  if (py::isinstance<py::dict>(h)) {
    Json out = Json::object();
    for (const auto item : h.cast<py::dict>())
      out[item.first.cast<std::string>()] = py_to_json(item.second);
    return out;
  }
  if (py::isinstance<py::sequence>(h)) {
    Json out = Json::array();
    for (const auto item : h.cast<py::sequence>()) out.push_back(py_to_json(item));
    return out;
  }
  throw ConfigError("cannot convert Python value to JSON");
}

DirectMode direct_from_string(const std::string& mode) {
  if (mode == "auto") return DirectMode::Auto;
  if (mode == "force") return DirectMode::Force;
  if (mode == "skip") return DirectMode::Skip;
  throw ConfigError("direct mode must be one of auto, force, skip");
}

BooleanFunction make_function(int arity, const std::vector<int>& table) {
  std::vector<std::uint8_t> bits;
  bits.reserve(table.size());
  for (int v : table) {
    if (v != 0 && v != 1) throw ConfigError("truth table entries must be 0 or 1");
    bits.push_back(static_cast<std::uint8_t>(v));
  }
  return BooleanFunction(arity, std::move(bits));
}

Relation make_relation(int arity, int alphabet,
                       const std::vector<std::vector<int>>& incidence) {
  std::vector<std::vector<std::uint8_t>> rows;
  rows.reserve(incidence.size());
  for (const auto& row : incidence) {
    std::vector<std::uint8_t> r;
    r.reserve(row.size());
    for (int v : row) {
      if (v != 0 && v != 1) throw ConfigError("incidence entries must be 0 or 1");
      r.push_back(static_cast<std::uint8_t>(v));
    }
    rows.push_back(std::move(r));
  }
  return Relation(arity, alphabet, std::move(rows));
}

DenseMatrix make_matrix(const std::vector<std::vector<double>>& rows) {
  const int r = static_cast<int>(rows.size());
  const int c = r > 0 ? static_cast<int>(rows[0].size()) : 0;
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(r) * c);
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != c) throw ConfigError("matrix rows differ in length");
    data.insert(data.end(), row.begin(), row.end());
  }
  return DenseMatrix(r, c, std::move(data));
}

}  // namespace

PYBIND11_MODULE(advlab, m) {
  m.doc() =
      "negative-weight adversary bound laboratory: solver, composition "
      "verification, witness checking, and the reproducible battery";
  m.attr("__version__") = kToolVersion;

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<StructuralError>(m, "StructuralError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<SizeError>(m, "SizeError", PyExc_RuntimeError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_RuntimeError);
  py::register_exception<CertificateError>(m, "CertificateError", PyExc_RuntimeError);

  py::class_<BooleanFunction>(m, "Function", "total Boolean function on n-bit inputs")
      .def(py::init(&make_function), py::arg("arity"), py::arg("table"))
      .def_property_readonly("arity", &BooleanFunction::arity)
      .def_property_readonly("table",
                             [](const BooleanFunction& f) {
                               std::vector<int> out(f.table().begin(), f.table().end());
                               return out;
                             })
      .def("__call__", [](const BooleanFunction& f, std::uint32_t x) { return f.evaluate(x); },
           py::arg("x"))
      .def("__eq__", [](const BooleanFunction& a, const BooleanFunction& b) { return a == b; })
      .def("__repr__", [](const BooleanFunction& f) {
        return "Function(arity=" + std::to_string(f.arity()) + ")";
      });

  py::class_<Relation>(m, "Relation", "relation on n-bit inputs with outputs in [k]")
      .def(py::init(&make_relation), py::arg("arity"), py::arg("k"), py::arg("incidence"))
      .def_property_readonly("arity", &Relation::arity)
      .def_property_readonly("k", &Relation::alphabet)
      .def_property_readonly("incidence",
                             [](const Relation& f) {
                               std::vector<std::vector<int>> out;
                               for (const auto& row : f.incidence())
                                 out.emplace_back(row.begin(), row.end());
                               return out;
                             })
      .def("contains", &Relation::contains, py::arg("x"), py::arg("a"))
      .def("is_total", &Relation::is_total)
      .def("__eq__", [](const Relation& a, const Relation& b) { return a == b; })
      .def("__repr__", [](const Relation& f) {
        return "Relation(arity=" + std::to_string(f.arity()) +
               ", k=" + std::to_string(f.alphabet()) + ")";
      });

  // construction helpers and serialization round-trips
  m.def("compose", &compose_function, py::arg("f"), py::arg("g"),
        "blockwise composition f . g^N for a functional outer piece");
  m.def("compose_relational", &compose_relation, py::arg("f"), py::arg("g"),
        "blockwise composition for a relational outer piece");
  m.def("as_relation", &as_relation, py::arg("f"),
        "view a total function as a relation with k = 2");
  m.def("to_dict", [](const BooleanFunction& f) { return json_to_py(to_json(f)); },
        py::arg("f"));
  m.def("to_dict", [](const Relation& f) { return json_to_py(to_json(f)); }, py::arg("f"));
  m.def("function_from_dict",
        [](py::handle d) { return function_from_json(py_to_json(d)); }, py::arg("d"));
  m.def("relation_from_dict",
        [](py::handle d) { return relation_from_json(py_to_json(d)); }, py::arg("d"));

  // fixtures
  m.def("fixture_function",
        [](const std::string& name, const std::string& dir) {
          return FixtureRegistry(dir).function(name);
        },
        py::arg("name"), py::arg("dir") = "");
  m.def("fixture_relation",
        [](const std::string& name, const std::string& dir) {
          return FixtureRegistry(dir).relation(name);
        },
        py::arg("name"), py::arg("dir") = "");
  m.def("fixture_names", [] {
    return py::make_tuple(FixtureRegistry::function_names(), FixtureRegistry::relation_names());
  });

  // solvers; results are certificate dicts with value, residuals, witness
  m.def("solve",
        [](const BooleanFunction& g, double tol) { return json_to_py(to_json(solve_adv(g, tol))); },
        py::arg("f"), py::arg("tol") = kDefaultSolveTol,
        "bound of a Boolean function with dual witness and residuals");
  m.def("solve_relational",
        [](const Relation& f, double tol) {
          return json_to_py(to_json(solve_adv_rel(f, tol)));
        },
        py::arg("f"), py::arg("tol") = kDefaultSolveTol,
        "bound of a relation with dual witness and residuals");
  m.def("gamma2",
        [](const std::vector<std::vector<double>>& rows, double tol) {
          return json_to_py(to_json(gamma2_filtered(make_matrix(rows), tol)));
        },
        py::arg("matrix"), py::arg("tol") = kDefaultSolveTol,
        "filtered norm of a target matrix given as a list of rows");

  // composition checks: certificate route, witness route, optional direct solve
  m.def("composition_check",
        [](const BooleanFunction& f, const BooleanFunction& g, double tol,
           const std::string& direct) {
          return json_to_py(
              to_json(functional_composition_check(f, g, tol, direct_from_string(direct))));
        },
        py::arg("f"), py::arg("g"), py::arg("tol") = kDefaultSolveTol,
        py::arg("direct") = "auto");
  m.def("relational_composition_check",
        [](const Relation& f, const BooleanFunction& g, double tol, const std::string& direct) {
          return json_to_py(
              to_json(relational_composition_check(f, g, tol, direct_from_string(direct))));
        },
        py::arg("f"), py::arg("g"), py::arg("tol") = kDefaultSolveTol,
        py::arg("direct") = "auto");

  // witness verification from dicts in the on-disk witness schema
  m.def("verify_function_witness",
        [](const BooleanFunction& g, py::handle witness, double tol) {
          const auto cert =
              check_functional_witness(g, functional_witness_from_json(py_to_json(witness)), tol);
          return json_to_py(to_json(cert));
        },
        py::arg("f"), py::arg("witness"), py::arg("tol") = 1e-6);
  m.def("verify_relation_witness",
        [](const Relation& f, py::handle witness, double tol) {
          const auto cert =
              check_relational_witness(f, relational_witness_from_json(py_to_json(witness)), tol);
          return json_to_py(to_json(cert));
        },
        py::arg("f"), py::arg("witness"), py::arg("tol") = 1e-6);

  // full battery
  m.def("battery",
        [](std::uint64_t seed, double tol, const std::string& direct, const std::string& fixtures) {
          const RunReport rep =
              run_battery(seed, tol, direct_from_string(direct), FixtureRegistry(fixtures));
          return json_to_py(to_json(rep));
        },
        py::arg("seed") = 7, py::arg("tol") = kDefaultBatteryTol, py::arg("direct") = "auto",
        py::arg("fixtures") = "");
  m.def("battery_markdown",
        [](std::uint64_t seed, double tol, const std::string& direct,
           const std::string& fixtures) {
          return render_markdown(
              run_battery(seed, tol, direct_from_string(direct), FixtureRegistry(fixtures)));
        },
        py::arg("seed") = 7, py::arg("tol") = kDefaultBatteryTol, py::arg("direct") = "auto",
        py::arg("fixtures") = "");
}
