#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cls/infer.hpp"
#include "cls/parse.hpp"
#include "cls/rewrite.hpp"

namespace py = pybind11;

namespace {

py::dict type_result_dict(const cls::TypeCheckResult& r) {
  py::dict d;
  d["ok"] = r.ok();
  if (r.ok()) {
    d["present"] = r.type().present;
    d["required"] = r.type().required;
  } else {
    d["kind"] = cls::type_error_kind_name(r.error().kind);
    d["where"] = r.error().where;
    d["detail"] = r.error().detail;
  }
  return d;
}

py::dict sigma_dict(const cls::Instantiation& s) {
  py::dict terms, seqs, elems;
  for (const auto& [k, v] : s.terms) terms[py::str(k)] = v;
  for (const auto& [k, v] : s.seqs) seqs[py::str(k)] = v;
  for (const auto& [k, v] : s.elems) elems[py::str(k)] = v;
  py::dict d;
  d["terms"] = terms;
  d["seqs"] = seqs;
  d["elems"] = elems;
  return d;
}

}  // namespace

PYBIND11_MODULE(pycls, m) {
  m.doc() = "Typed rewriting for the Calculus of Looping Sequences";
#ifdef PYCLS_VERSION
  m.attr("__version__") = PYCLS_VERSION;
#endif

  py::register_exception<cls::ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<cls::IllTypedStateError>(m, "IllTypedStateError", PyExc_RuntimeError);
  py::register_exception<cls::MatchBudgetExceeded>(m, "MatchBudgetExceeded", PyExc_RuntimeError);
  py::register_exception<cls::EnvError>(m, "EnvError", PyExc_ValueError);

  py::class_<cls::Term>(m, "Term")
      .def("__str__", [](const cls::Term& t) { return cls::pretty(t); })
      .def("__repr__", [](const cls::Term& t) { return "Term(\"" + cls::pretty(t) + "\")"; })
      .def("__eq__", [](const cls::Term& a, const cls::Term& b) { return a == b; })
      .def("__hash__", [](const cls::Term& t) { return py::hash(py::str(cls::pretty(t))); })
      .def_property_readonly("size", &cls::Term::size);

  py::class_<cls::Pattern>(m, "Pattern")
      .def("__str__", [](const cls::Pattern& p) { return cls::pretty(p); })
      .def("__repr__",
           [](const cls::Pattern& p) { return "Pattern(\"" + cls::pretty(p) + "\")"; })
      .def("__eq__", [](const cls::Pattern& a, const cls::Pattern& b) { return a == b; });

  py::class_<cls::TypeEnv>(m, "TypeEnv")
      .def_property_readonly("types", &cls::TypeEnv::types)
      .def_property_readonly("elements", &cls::TypeEnv::elements);

  py::class_<cls::Rule>(m, "Rule")
      .def_readonly("name", &cls::Rule::name)
      .def_readonly("lhs", &cls::Rule::lhs)
      .def_readonly("rhs", &cls::Rule::rhs);

  m.def("parse_term", &cls::parse_term, py::arg("text"));
  m.def("parse_pattern", &cls::parse_pattern, py::arg("text"));
  m.def("parse_rules", &cls::parse_rules, py::arg("text"));
  m.def("parse_env", &cls::parse_env, py::arg("text"));
  m.def("pretty", py::overload_cast<const cls::Term&>(&cls::pretty), py::arg("term"));
  m.def(
      "congruent",
      [](const cls::Term& a, const cls::Term& b) { return cls::congruent(a, b); },
      py::arg("a"), py::arg("b"));

  m.def(
      "check",
      [](const cls::Term& t, const cls::TypeEnv& env) {
        return type_result_dict(cls::type_check(t, env));
      },
      py::arg("term"), py::arg("env"));

  m.def(
      "infer",
      [](const cls::Pattern& p, const cls::TypeEnv& env) {
        auto r = cls::infer(p, env);
        py::dict d;
        d["ok"] = r.ok();
        if (r.ok()) {
          py::dict basis;
          for (const auto& [v, pr] : r.principal->basis) {
            basis[py::str(v.display())] =
                py::make_tuple(cls::print_expr(pr.present), cls::print_expr(pr.required));
          }
          d["basis"] = basis;
          d["type"] = py::make_tuple(cls::print_expr(r.principal->type.present),
                                     cls::print_expr(r.principal->type.required));
          py::list cs;
          for (const auto& c : r.principal->constraints) {
            cs.append(cls::print_constraint(c));
          }
          d["constraints"] = cs;
        } else {
          d["kind"] = cls::type_error_kind_name(r.error->kind);
          d["detail"] = r.error->detail;
        }
        return d;
      },
      py::arg("pattern"), py::arg("env"));

  m.def(
      "match",
      [](const cls::Pattern& p, const cls::Term& t, std::size_t budget) {
        cls::MatchOptions opts;
        opts.budget = budget;
        py::list out;
        for (const auto& s : cls::match(p, t, opts)) out.append(sigma_dict(s));
        return out;
      },
      py::arg("pattern"), py::arg("term"), py::arg("budget") = 10000);

  m.def(
      "untyped_step",
      [](const std::vector<cls::Rule>& rules, const cls::Term& t) {
        return cls::untyped_step(rules, t);
      },
      py::arg("rules"), py::arg("term"));

  m.def(
      "typed_step",
      [](const std::vector<cls::Rule>& rules, const cls::Term& t, const cls::TypeEnv& env) {
        return cls::typed_step(rules, t, env);
      },
      py::arg("rules"), py::arg("term"), py::arg("env"));

  m.def(
      "explore",
      [](const std::vector<cls::Rule>& rules, const cls::Term& t0, const cls::TypeEnv* env,
         std::size_t max_states, std::size_t max_depth) {
        cls::StepFn step;
        if (env) {
          const cls::TypeEnv& e = *env;
          step = [rules, &e](const cls::Term& t) { return cls::typed_step(rules, t, e); };
        } else {
          step = [rules](const cls::Term& t) { return cls::untyped_step(rules, t); };
        }
        auto g = cls::explore(step, t0, max_states, max_depth);
        py::dict d;
        py::list states;
        for (const auto& s : g.states) states.append(s);
        d["states"] = states;
        py::list edges;
        for (const auto& e2 : g.edges) edges.append(py::make_tuple(e2.from, e2.rule, e2.to));
        d["edges"] = edges;
        d["root"] = g.root;
        d["truncated"] = g.truncated;
        return d;
      },
      py::arg("rules"), py::arg("term"), py::arg("env") = nullptr,
      py::arg("max_states") = 1000, py::arg("max_depth") = 1000);
}
