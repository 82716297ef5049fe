#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "lossperc/cli.hpp"
#include "lossperc/lattice.hpp"
#include "lossperc/models.hpp"
#include "lossperc/oracle.hpp"
#include "lossperc/statistics.hpp"
#include "lossperc/sweep.hpp"
#include "lossperc/verification.hpp"

namespace py = pybind11;
using namespace lossperc;

namespace {

template <class T>
py::array_t<T> to_array(const std::vector<T>& v) {
  py::array_t<T> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

LatticeSpec make_spec(const std::string& family, int dimension, int size, const std::vector<std::string>& boundary,
                      const std::vector<std::string>& neighborhood) {
  LatticeSpec spec;
  spec.family = parse_family(family);
  spec.dimension = dimension;
  spec.size = size;
  if (boundary.size() == 1) {
    spec.boundary.assign(dimension, parse_boundary(boundary.front()));
  } else {
    for (const auto& b : boundary) spec.boundary.push_back(parse_boundary(b));
  }
  for (const auto& n : neighborhood) spec.neighborhood.push_back(parse_displacement_class(n));
  return spec;
}

py::dict curve_dict(const CanonicalCurve& c) {
  py::dict d;
  d["p"] = to_array(c.p);
  d["mean_largest"] = to_array(c.mean_largest);
  d["span_probability"] = to_array(c.span_probability);
  d["largest_error"] = to_array(c.largest_error);
  d["span_error"] = to_array(c.span_error);
  return d;
}

py::dict threshold_dict(const ThresholdEstimate& t) {
  py::dict d;
  d["value"] = t.value;
  d["error"] = t.error;
  d["runs"] = t.runs;
  d["spanned"] = t.spanned;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Photon-loss percolation with modified Newman-Ziff sweeps";

  py::class_<Lattice>(m, "Lattice")
      .def_property_readonly("node_count", &Lattice::node_count)
      .def_property_readonly("edge_count", &Lattice::edge_count)
      .def("degree", &Lattice::degree, py::arg("node"))
      .def("neighbors",
           [](const Lattice& g, NodeId n) {
             if (n >= g.node_count()) throw py::index_error("node out of range");
             const auto nb = g.neighbors(n);
             return std::vector<NodeId>(nb.begin(), nb.end());
           })
      .def("edges",
           [](const Lattice& g) {
             py::array_t<NodeId> out({static_cast<py::ssize_t>(g.edge_count()), py::ssize_t{2}});
             auto a = out.mutable_unchecked<2>();
             for (std::size_t e = 0; e < g.edge_count(); ++e) {
               a(e, 0) = g.edge(static_cast<EdgeId>(e)).u;
               a(e, 1) = g.edge(static_cast<EdgeId>(e)).v;
             }
             return out;
           })
      .def("validate", [](const Lattice& g) {
        const ValidationReport r = validate(g);
        py::dict d;
        d["pass"] = r.pass;
        d["problems"] = r.problems;
        d["degree_histogram"] = r.degree_histogram;
        d["face_min_count"] = r.face_min_count;
        d["face_max_count"] = r.face_max_count;
        return d;
      });

  m.def(
      "build_lattice",
      [](const std::string& family, int dimension, int size, const std::vector<std::string>& boundary,
         const std::vector<std::string>& neighborhood) {
        return build(make_spec(family, dimension, size, boundary, neighborhood));
      },
      py::arg("family") = "hypercubic", py::arg("dimension") = 2, py::arg("size") = 4,
      py::arg("boundary") = std::vector<std::string>{}, py::arg("neighborhood") = std::vector<std::string>{},
      "Builds a lattice. boundary: one value for every axis or one per axis (default: axis 0 open).");
  m.def(
      "coordination_number",
      [](const std::string& family, int dimension, const std::vector<std::string>& neighborhood) {
        return coordination_number(make_spec(family, dimension, 4, {}, neighborhood));
      },
      py::arg("family"), py::arg("dimension"), py::arg("neighborhood") = std::vector<std::string>{});

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init([](const std::string& model, double p_s, int n_max, int boost_n) {
             ModelParams p;
             p.model = parse_model(model);
             p.p_s = p_s;
             p.n_max = n_max;
             p.boost_n = boost_n;
             p.check();
             return p;
           }),
           py::arg("model") = "model2prime", py::arg("p_s") = 0.5, py::arg("n_max") = 1, py::arg("boost_n") = 1)
      .def_property_readonly("model", [](const ModelParams& p) { return std::string(to_string(p.model)); })
      .def_readonly("p_s", &ModelParams::p_s)
      .def_readonly("n_max", &ModelParams::n_max)
      .def_readonly("boost_n", &ModelParams::boost_n);

  m.def(
      "adaptive_probs",
      [](double eta, int n_max, double p_s) {
        const auto o = adaptive_probs(eta, n_max, p_s);
        return py::make_tuple(o.failure, o.success, o.loss);
      },
      py::arg("eta"), py::arg("n_max"), py::arg("p_s") = 0.5, "(p_F, p_S, p_L) of a repeat-until-success fusion.");
  m.def(
      "boosted_probs",
      [](double eta, int boost_n) {
        const auto o = boosted_probs(eta, boost_n);
        return py::make_tuple(o.failure, o.success, o.loss);
      },
      py::arg("eta"), py::arg("boost_n"));

  m.def(
      "sweep",
      [](const Lattice& g, const ModelParams& params, std::uint64_t seed) {
        SweepRecord r;
        {
          py::gil_scoped_release release;
          r = run_sweep(g, params, seed);
        }
        py::dict d;
        d["total_photons"] = r.total_photons;
        d["largest"] = to_array(r.largest);
        d["spanning"] = to_array(r.spanning);
        d["onset"] = r.onset ? py::object(py::int_(*r.onset)) : py::object(py::none());
        d["seed"] = r.seed;
        return d;
      },
      py::arg("lattice"), py::arg("params"), py::arg("seed"),
      "One microcanonical sweep; largest[i] and spanning[i] after i photons.");

  m.def(
      "ensemble",
      [](const Lattice& g, const ModelParams& params, std::size_t repetitions, std::uint64_t seed, unsigned workers) {
        if (params.variable_photon_count()) {
          throw std::invalid_argument("ensemble needs a fixed photon count; use canonical_curve");
        }
        EnsembleRecord e;
        {
          py::gil_scoped_release release;
          e = run_ensemble(g, params, repetitions, seed, workers);
        }
        py::dict d;
        d["total_photons"] = e.total_photons;
        d["mean_largest"] = to_array(e.mean_largest);
        d["span_probability"] = to_array(e.span_probability);
        d["threshold"] = threshold_dict(e.threshold());
        return d;
      },
      py::arg("lattice"), py::arg("params"), py::arg("repetitions"), py::arg("seed") = 1, py::arg("workers") = 0);

  m.def(
      "canonical_curve",
      [](const Lattice& g, const ModelParams& params, const std::vector<double>& grid, std::size_t repetitions,
         std::uint64_t seed, unsigned workers) {
        CanonicalEnsemble e;
        {
          py::gil_scoped_release release;
          e = canonical_ensemble(g, params, repetitions, seed, grid, workers);
        }
        py::dict d = curve_dict(e.curve);
        d["threshold"] = threshold_dict(e.threshold());
        d["photons_total"] = e.photons_total;
        return d;
      },
      py::arg("lattice"), py::arg("params"), py::arg("grid"), py::arg("repetitions"), py::arg("seed") = 1,
      py::arg("workers") = 0, "Sweeps plus the binomial transform, with standard errors.");

  m.def(
      "convolve",
      [](const std::vector<double>& record, const std::vector<double>& grid) { return to_array(convolve(record, grid)); },
      py::arg("record"), py::arg("grid"), "Microcanonical record (length N+1) to canonical values on a grid.");

  m.def(
      "oracle_curve",
      [](const Lattice& g, const ModelParams& params, const std::vector<double>& grid, std::size_t samples,
         std::uint64_t seed) {
        CanonicalCurve c;
        {
          py::gil_scoped_release release;
          c = canonical_curve(g, params, grid, samples, seed);
        }
        return curve_dict(c);
      },
      py::arg("lattice"), py::arg("params"), py::arg("grid"), py::arg("samples"), py::arg("seed") = 1,
      "Direct canonical sampling with breadth-first search.");

  m.def(
      "exhaustive_curve",
      [](const Lattice& g, const ModelParams& params, const std::vector<double>& grid) {
        return curve_dict(exhaustive_curve(g, params, grid));
      },
      py::arg("lattice"), py::arg("params"), py::arg("grid"));

  m.def(
      "extrapolate",
      [](const std::vector<double>& sizes, const std::vector<double>& values, const std::vector<double>& errors,
         bool allow_free) {
        if (sizes.size() != values.size() || sizes.size() != errors.size()) {
          throw std::invalid_argument("sizes, values and errors must have equal length");
        }
        std::vector<SizeThreshold> rows;
        for (std::size_t k = 0; k < sizes.size(); ++k) rows.push_back({sizes[k], values[k], errors[k]});
        ExtrapolationOptions opt;
        opt.allow_free = allow_free;
        const Extrapolation x = extrapolate(rows, opt);
        py::dict d;
        d["value"] = x.value;
        d["error"] = x.error;
        d["amplitude"] = x.amplitude;
        d["exponent"] = x.exponent;
        d["fit_mode"] = to_string(x.mode);
        d["chi2"] = x.chi2;
        d["note"] = x.note;
        return d;
      },
      py::arg("sizes"), py::arg("values"), py::arg("errors"), py::arg("allow_free") = true);

  m.def("check_names", &check_names);
  m.def(
      "run_check",
      [](const std::string& name, double scale, unsigned workers) {
        SuiteOptions opt;
        opt.scale = scale;
        opt.workers = workers;
        CheckResult r;
        {
          py::gil_scoped_release release;
          r = run_check(name, opt);
        }
        return py::make_tuple(r.pass, r.detail);
      },
      py::arg("name"), py::arg("scale") = 1.0, py::arg("workers") = 0);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        std::vector<std::string> argv{"lossperc"};
        argv.insert(argv.end(), args.begin(), args.end());
        int code;
        {
          py::gil_scoped_release release;
          code = run_cli(argv, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command-line interface in-process; returns (exit_code, stdout, stderr).");
}
