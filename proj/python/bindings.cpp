// Python module holointerp._core.

#include <array>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "holointerp/errors.hpp"
#include "holointerp/harness.hpp"
#include "holointerp/relocation.hpp"

namespace py = pybind11;
using namespace holointerp;

namespace {

SequenceSpec to_sequence(const std::vector<CPoint>& points) {
  SequenceSpec s;
  s.points = points;
  return s;
}

std::vector<CPoint> eval_many(const AutWord& w, const std::vector<CPoint>& zs, bool inverse) {
  std::vector<CPoint> out;
  out.reserve(zs.size());
  for (const auto& z : zs) out.push_back(inverse ? eval_inverse(w, z) : eval(w, z));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Interpolation by Fatou-Bieberbach maps: automorphism words and their verification.";

  // Translators are tried newest first, so the base class goes first.
  static py::exception<Error> base(m, "Error", PyExc_RuntimeError);
  py::register_exception<Overflow>(m, "Overflow", base.ptr());
  py::register_exception<SeparationFailure>(m, "SeparationFailure", base.ptr());
  py::register_exception<NotInSubspace>(m, "NotInSubspace", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);

  py::class_<AutWord>(m, "Word")
      .def_static("identity", &identity_word, py::arg("dimension"))
      .def_static("from_json", &word_from_json, py::arg("text"))
      .def("to_json", [](const AutWord& w) { return word_to_json(w); })
      .def_readonly("dimension", &AutWord::dimension)
      .def_readonly("schedule", &AutWord::schedule)
      .def("__len__", &AutWord::size)
      .def("inverse", &AutWord::inverse)
      .def("then", &AutWord::then, py::arg("other"))
      .def("stage_words", [](const AutWord& w) { return stage_words(w); })
      .def("__call__", [](const AutWord& w, const CPoint& z) { return eval(w, z); }, py::arg("z"))
      .def("eval", [](const AutWord& w, const std::vector<CPoint>& zs) { return eval_many(w, zs, false); }, py::arg("points"))
      .def("eval_inverse", [](const AutWord& w, const std::vector<CPoint>& zs) { return eval_many(w, zs, true); },
           py::arg("points"));

  py::class_<InterpolationProblem>(m, "Problem")
      .def_static("from_json", &problem_from_json, py::arg("text"))
      .def_static("load", &load_problem, py::arg("path"))
      .def_static("seeded", &seeded_instance, py::arg("seed") = 7, py::arg("count") = 8)
      .def("to_json", [](const InterpolationProblem& p) { return problem_to_json(p); })
      .def_readwrite("epsilon", &InterpolationProblem::epsilon)
      .def_readwrite("stages", &InterpolationProblem::stages)
      .def_readwrite("seed", &InterpolationProblem::seed)
      .def_property_readonly("sources", [](const InterpolationProblem& p) { return p.sources.points; })
      .def_property_readonly("targets", [](const InterpolationProblem& p) { return p.targets.points; });

  py::class_<InterpolationResult>(m, "Result")
      .def_readonly("word", &InterpolationResult::word)
      .def_readonly("matched", &InterpolationResult::matched)
      .def_readonly("residual", &InterpolationResult::residual)
      .def_readonly("wall_seconds", &InterpolationResult::wall_seconds);

  m.def(
      "solve",
      [](const InterpolationProblem& p, bool run_checks) {
        EngineOptions eo;
        eo.run_checks = run_checks;
        py::gil_scoped_release release;
        return run_interpolation(p, eo);
      },
      py::arg("problem"), py::arg("run_checks") = false);

  m.def(
      "verify_json",
      [](const AutWord& w, const InterpolationProblem& p, double density) {
        VerifyOptions o;
        o.density = density;
        o.roundtrip_seed = p.seed;
        py::gil_scoped_release release;
        const auto rep = verify(w, p, o);
        return report_to_json(rep);
      },
      py::arg("word"), py::arg("problem"), py::arg("density") = 4.0,
      "Verification report as a JSON document.");

  m.def(
      "tame_normalize", [](const std::vector<CPoint>& points) { return tame_normalize(to_sequence(points)); },
      py::arg("points"));

  m.def(
      "orbit_csv",
      [](const AutWord& w, std::array<double, 4> window, double resolution, std::size_t coordinate) {
        OrbitWindow ow;
        ow.coordinate = coordinate;
        ow.re_min = window[0];
        ow.re_max = window[1];
        ow.im_min = window[2];
        ow.im_max = window[3];
        return orbit_to_csv(export_orbit(stage_words(w), w.schedule, ow, resolution));
      },
      py::arg("word"), py::arg("window"), py::arg("resolution"), py::arg("coordinate") = 0);
}
