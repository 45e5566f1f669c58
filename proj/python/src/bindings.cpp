#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "calibrax/bench.hpp"
#include "calibrax/calibrators.hpp"
#include "calibrax/data.hpp"
#include "calibrax/error.hpp"
#include "calibrax/estimator.hpp"
#include "calibrax/io.hpp"
#include "calibrax/metrics.hpp"
#include "calibrax/prior_curve.hpp"
#include "calibrax/simulator.hpp"
#include "calibrax/wilcoxon.hpp"

namespace py = pybind11;
using namespace calibrax;

namespace {

Dataset make_dataset(const std::vector<double>& confidences,
                     const std::vector<int>& hits) {
  if (confidences.size() != hits.size())
    throw Error(ErrorCode::kDomain, "confidences and hits differ in length");
  std::vector<CalibrationSample> samples;
  samples.reserve(hits.size());
  for (std::size_t i = 0; i < hits.size(); ++i)
    samples.push_back({confidences[i], hits[i]});
  return Dataset(std::move(samples));
}

MetricConfig metric_config(std::size_t bins, int p, const std::string& binning) {
  MetricConfig mc;
  mc.bins = bins;
  mc.p = p;
  mc.binning = binning == "equal-width" ? BinningKind::kEqualWidth
                                        : BinningKind::kEqualMass;
  return mc;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "calibrax native core";

  static py::exception<Error> exc(m, "CalibrationError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const std::string msg =
          std::string(error_code_name(e.code())) + ": " + e.what();
      PyErr_SetString(exc.ptr(), msg.c_str());
    }
  });

  py::class_<PriorCurveParams>(m, "PriorCurveParams")
      .def(py::init<double, double, double>(), py::arg("alpha") = 1.0,
           py::arg("beta") = 1.0, py::arg("c") = 0.0)
      .def_readwrite("alpha", &PriorCurveParams::alpha)
      .def_readwrite("beta", &PriorCurveParams::beta)
      .def_readwrite("c", &PriorCurveParams::c)
      .def("__call__", [](const PriorCurveParams& p, double s) { return g_eval(p, s); })
      .def("__repr__", [](const PriorCurveParams& p) {
        return "PriorCurveParams(alpha=" + std::to_string(p.alpha) +
               ", beta=" + std::to_string(p.beta) + ", c=" + std::to_string(p.c) + ")";
      });

  py::class_<BetaParams>(m, "BetaParams")
      .def(py::init<double, double>(), py::arg("a1"), py::arg("a2"))
      .def_readwrite("a1", &BetaParams::a1)
      .def_readwrite("a2", &BetaParams::a2);

  py::class_<EstimatorConfig>(m, "EstimatorConfig")
      .def(py::init<>())
      .def_readwrite("scheme_counts", &EstimatorConfig::scheme_counts)
      .def_readwrite("init", &EstimatorConfig::init)
      .def_readwrite("max_iterations", &EstimatorConfig::max_iterations)
      .def_readwrite("tolerance", &EstimatorConfig::tolerance)
      .def_readwrite("restarts", &EstimatorConfig::restarts);

  py::class_<CurveFit>(m, "CurveFit")
      .def_readonly("params", &CurveFit::params)
      .def_readonly("objective", &CurveFit::objective)
      .def_readonly("iterations", &CurveFit::iterations)
      .def_readonly("scheme_counts", &CurveFit::scheme_counts)
      .def_readonly("fallback_schemes", &CurveFit::fallback_schemes);

  py::class_<Dataset>(m, "Dataset")
      .def(py::init(&make_dataset), py::arg("confidences"), py::arg("hits"))
      .def("__len__", &Dataset::size)
      .def_property_readonly("confidences", &Dataset::confidences)
      .def_property_readonly("hits",
                             [](const Dataset& d) {
                               std::vector<int> h;
                               for (const auto& s : d) h.push_back(s.hit);
                               return h;
                             })
      .def("to_csv", &format_pairs);

  py::class_<WilcoxonResult>(m, "WilcoxonResult")
      .def_readonly("p_value", &WilcoxonResult::p_value)
      .def_readonly("w_plus", &WilcoxonResult::w_plus)
      .def_readonly("n", &WilcoxonResult::n)
      .def_readonly("exact", &WilcoxonResult::exact);

  m.def("load_pairs", [](const std::string& path) { return load_pairs(path); });
  m.def(
      "ingest_logits",
      [](const std::vector<std::vector<double>>& logits, const std::vector<int>& labels) {
        if (logits.size() != labels.size())
          throw Error(ErrorCode::kDomain, "logits and labels differ in length");
        std::vector<LogitRecord> records;
        for (std::size_t i = 0; i < labels.size(); ++i)
          records.push_back({logits[i], labels[i]});
        return ingest_logits(records);
      },
      py::arg("logits"), py::arg("labels"));

  m.def("g_eval", &g_eval, py::arg("params"), py::arg("s"));
  m.def("beta_pdf", &beta_pdf, py::arg("params"), py::arg("s"));
  m.def("beta_moment_fit",
        [](const std::vector<double>& v) { return beta_moment_fit(v); });
  m.def("builtin_spec_names", &builtin_spec_names);
  m.def(
      "link_eval",
      [](const std::string& spec, double s) { return link_eval(resolve_spec(spec), s); },
      py::arg("spec"), py::arg("s"));

  m.def(
      "simulate",
      [](const std::string& spec, std::size_t n, std::uint64_t seed) {
        return simulate({resolve_spec(spec), n, seed});
      },
      py::arg("spec"), py::arg("n"), py::arg("seed"));

  m.def("estimate_curve", &estimate_curve, py::arg("dataset"),
        py::arg("config") = EstimatorConfig{});

  m.def(
      "tce_bpm",
      [](const Dataset& d, const EstimatorConfig& c, int p) {
        MetricConfig mc;
        mc.p = p;
        return tce_bpm(d, c, mc);
      },
      py::arg("dataset"), py::arg("config") = EstimatorConfig{}, py::arg("p") = 1);
  m.def(
      "tce_exact",
      [](const std::string& spec, int p) { return tce_exact(resolve_spec(spec), p); },
      py::arg("spec"), py::arg("p") = 1);
  m.def(
      "ece_bin",
      [](const Dataset& d, std::size_t bins, int p, const std::string& binning) {
        return ece_bin(d, metric_config(bins, p, binning));
      },
      py::arg("dataset"), py::arg("bins") = 15, py::arg("p") = 1,
      py::arg("binning") = "equal-mass");
  m.def(
      "ece_debiased",
      [](const Dataset& d, std::size_t bins, const std::string& binning) {
        return ece_debiased(d, metric_config(bins, 1, binning));
      },
      py::arg("dataset"), py::arg("bins") = 15, py::arg("binning") = "equal-mass");
  m.def("ece_sweep", &ece_sweep, py::arg("dataset"), py::arg("p") = 1);
  m.def("ks_error", &ks_error, py::arg("dataset"));

  m.def(
      "_fit_map_json",
      [](const std::string& method, const Dataset& d, std::size_t bins) {
        switch (parse_map_kind(method)) {
          case MapKind::kTpm:
            return dump(map_to_json(fit_tpm(d)));
          case MapKind::kHistogram:
            return dump(map_to_json(fit_histogram_binning(d, bins)));
          case MapKind::kPlatt:
            return dump(map_to_json(fit_platt(d)));
          case MapKind::kIsotonic:
            return dump(map_to_json(fit_isotonic(d)));
          case MapKind::kTemperature:
            break;
        }
        throw Error(ErrorCode::kUsage, "temperature scaling needs logits");
      },
      py::arg("method"), py::arg("dataset"), py::arg("bins") = 15,
      "Fit a confidence calibration map; returns its JSON serialization.");
  m.def("_map_apply", [](const std::string& json, const std::vector<double>& conf) {
    const auto map = map_from_json(Json::parse(json));
    std::vector<double> out;
    out.reserve(conf.size());
    for (double c : conf) out.push_back(map(c));
    return out;
  });

  m.def("wilcoxon_signed_rank",
        [](const std::vector<double>& xs, const std::vector<double>& ys) {
          return wilcoxon_signed_rank(xs, ys);
        });

  m.def("_benchmark_json",
        [](const std::string& kind, const std::vector<std::string>& dists,
           const std::vector<std::size_t>& sizes, std::size_t runs,
           std::uint64_t seed, const std::vector<std::string>& metrics,
           std::size_t bins, unsigned threads) {
          BenchmarkConfig bc;
          for (const auto& d : dists) bc.specs.push_back(resolve_spec(d));
          bc.sizes = sizes;
          bc.runs = runs;
          bc.seed = seed;
          if (!metrics.empty()) bc.metrics = metrics;
          bc.bins = bins;
          bc.threads = threads;
          py::gil_scoped_release release;
          const auto report =
              kind == "ead" ? run_ead_benchmark(bc) : run_metric_benchmark(bc);
          return dump(report_to_json(report));
        });
}
