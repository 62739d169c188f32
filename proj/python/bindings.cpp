#include <pybind11/pybind11.h>

#include "ecdiff/facts.hpp"
#include "ecdiff/report.hpp"

namespace py = pybind11;
using namespace ecdiff;

namespace {

// Results cross the boundary as JSON text; the Python side decodes them.
std::string analyzeJson(const std::string &Source, int Rank, bool AccessRestriction) {
  Program P = parse(Source);
  py::gil_scoped_release Release;
  return analysisJson(analyze(P, {Rank, AccessRestriction}), P).dump();
}

std::string factsJson(const std::string &Source) {
  Program P = parse(Source);
  return extractFacts(P).toJson(P).dump();
}

std::string diffSources(const std::string &Source1, const std::string &Source2, int MaxRank,
                        const std::string &MapText, bool AccessRestriction) {
  Program P1 = parse(Source1);
  Program P2 = parse(Source2);
  DiffOptions Opts{MaxRank, AccessRestriction, parseLabelMap(MapText)};
  py::gil_scoped_release Release;
  return diffJson(iterativeDiff(P1, P2, Opts), P1, P2).dump();
}

std::string oracleJson(const std::string &Source, int LoopBound, int Rank, std::size_t Budget) {
  Program P = parse(Source);
  OracleOptions Opts;
  Opts.loopBound = LoopBound;
  Opts.rank = Rank;
  Opts.budget = Budget;
  py::gil_scoped_release Release;
  return groundJson(explore(P, Opts), P, true).dump();
}

} // namespace

PYBIND11_MODULE(_ecdiff, m) {
  m.doc() = "Synchronization differences between versions of concurrent programs";

  py::register_exception<FrontendError>(m, "FrontendError", PyExc_ValueError);
  py::register_exception<DiffError>(m, "DiffError", PyExc_ValueError);
  py::register_exception<OracleError>(m, "OracleError", PyExc_RuntimeError);

  m.def("analyze", &analyzeJson, py::arg("source"), py::arg("rank") = 1,
        py::arg("access_restriction") = true);
  m.def("facts", &factsJson, py::arg("source"));
  m.def("diff", &diffSources, py::arg("source1"), py::arg("source2"), py::arg("max_rank") = 3,
        py::arg("label_map") = "", py::arg("access_restriction") = true);
  m.def("oracle", &oracleJson, py::arg("source"), py::arg("loop_bound") = 3,
        py::arg("rank") = 1, py::arg("budget") = 2'000'000);
}
