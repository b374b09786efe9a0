#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "sistream/cli.hpp"
#include "sistream/distance.hpp"
#include "sistream/drift.hpp"
#include "sistream/evaluation.hpp"
#include "sistream/hoeffding.hpp"
#include "sistream/scaling.hpp"
#include "sistream/sis.hpp"
#include "sistream/stream.hpp"

namespace py = pybind11;
using namespace sistream;

PYBIND11_MODULE(_sistream, m) {
    m.doc() = "Streaming classification with similarity-based instance selection";

    py::class_<Instance>(m, "Instance")
        .def(py::init([](std::size_t time_index, std::vector<double> features,
                         std::optional<int> label) {
                 Instance inst;
                 inst.time_index = time_index;
                 inst.features = std::move(features);
                 inst.label = label;
                 return inst;
             }),
             py::arg("time_index"), py::arg("features"), py::arg("label") = py::none())
        .def_readwrite("time_index", &Instance::time_index)
        .def_readwrite("features", &Instance::features)
        .def_readwrite("label", &Instance::label)
        .def("dim", &Instance::dim);

    py::class_<RunningScaler>(m, "RunningScaler")
        .def(py::init<>())
        .def("update", [](RunningScaler& s, const std::vector<double>& x) {
            s.update(std::span<const double>(x));
        })
        .def("transform",
             [](const RunningScaler& s, const std::vector<double>& x) {
                 return s.transform(std::span<const double>(x));
             })
        .def("mean", &RunningScaler::mean)
        .def("variance", &RunningScaler::variance)
        .def("stddev", &RunningScaler::stddev)
        .def_property_readonly("count", &RunningScaler::count)
        .def_property_readonly("dimension", &RunningScaler::dimension);

    m.def("time_distance",
          [](std::size_t t, std::size_t i, std::size_t n) {
              return time_distance(t, i, DistanceParams{n});
          },
          py::arg("t"), py::arg("i"), py::arg("horizon_n"));
    m.def("spatial_distance", [](const std::vector<double>& a, const std::vector<double>& b) {
        return spatial_distance(std::span<const double>(a), std::span<const double>(b));
    });
    m.def("spatio_temporal_distance",
          [](const Instance& target, const Instance& past, std::size_t n) {
              return spatio_temporal_distance(target, past, DistanceParams{n});
          },
          py::arg("target"), py::arg("past"), py::arg("horizon_n"));

    m.def("hoeffding_bound",
          [](double range_r, double delta, std::size_t n) {
              return hoeffding_bound({range_r, delta, n});
          },
          py::arg("range_r"), py::arg("delta"), py::arg("n"));

    py::enum_<LeafPrediction>(m, "LeafPrediction")
        .value("majority", LeafPrediction::majority)
        .value("naive_bayes_adaptive", LeafPrediction::naive_bayes_adaptive);

    py::class_<TreeConfig>(m, "TreeConfig")
        .def(py::init<>())
        .def_readwrite("grace_period", &TreeConfig::grace_period)
        .def_readwrite("split_confidence_delta", &TreeConfig::split_confidence_delta)
        .def_readwrite("tie_threshold_tau", &TreeConfig::tie_threshold_tau)
        .def_readwrite("leaf_prediction", &TreeConfig::leaf_prediction);

    py::class_<Classifier>(m, "Classifier")
        .def("learn_one", &Classifier::learn_one)
        .def("predict_one", &Classifier::predict_one)
        .def("reset", &Classifier::reset)
        .def("size_bytes", &Classifier::size_bytes)
        .def("name", &Classifier::name);

    py::class_<MajorityClass, Classifier>(m, "MajorityClass").def(py::init<>());
    py::class_<HoeffdingTree, Classifier>(m, "HoeffdingTree")
        .def(py::init<TreeConfig>(), py::arg("config") = TreeConfig{})
        .def("node_count", &HoeffdingTree::node_count)
        .def("split_count", &HoeffdingTree::split_count);
    py::class_<HoeffdingAdaptiveTree, HoeffdingTree>(m, "HoeffdingAdaptiveTree")
        .def(py::init<TreeConfig>(), py::arg("config") = TreeConfig{});

    py::class_<Adwin>(m, "Adwin")
        .def(py::init<double>(), py::arg("delta") = 0.002)
        .def("update", &Adwin::update)
        .def("estimate", &Adwin::estimate)
        .def_property_readonly("width", &Adwin::width);

    py::enum_<DdmLevel>(m, "DdmLevel")
        .value("in_control", DdmLevel::in_control)
        .value("warning", DdmLevel::warning)
        .value("drift", DdmLevel::drift);

    py::class_<Ddm>(m, "Ddm")
        .def(py::init<>())
        .def("update", &Ddm::update)
        .def("error_rate", &Ddm::error_rate)
        .def_property_readonly("count", &Ddm::count);

    py::class_<SisConfig>(m, "SisConfig")
        .def(py::init([](std::size_t n, std::size_t k, std::size_t r, double eps) {
                 return SisConfig{n, k, r, eps, 0};
             }),
             py::arg("capacity_n") = 200, py::arg("trial_k") = 1, py::arg("radius_r") = 10,
             py::arg("error_threshold_eps") = 0.1)
        .def_readwrite("capacity_n", &SisConfig::capacity_n)
        .def_readwrite("trial_k", &SisConfig::trial_k)
        .def_readwrite("radius_r", &SisConfig::radius_r)
        .def_readwrite("error_threshold_eps", &SisConfig::error_threshold_eps);

    py::class_<GaussianPhase>(m, "GaussianPhase")
        .def(py::init([](std::size_t length, std::vector<int> label_map) {
                 return GaussianPhase{length, std::move(label_map)};
             }),
             py::arg("length"), py::arg("label_map") = std::vector<int>{});

    py::class_<GaussianConfig>(m, "GaussianConfig")
        .def(py::init<>())
        .def_readwrite("n_classes", &GaussianConfig::n_classes)
        .def_readwrite("dim", &GaussianConfig::dim)
        .def_readwrite("separation", &GaussianConfig::separation)
        .def_readwrite("stddev", &GaussianConfig::stddev)
        .def_readwrite("prior", &GaussianConfig::prior)
        .def_readwrite("phases", &GaussianConfig::phases)
        .def_readwrite("run_length", &GaussianConfig::run_length)
        .def_readwrite("seed", &GaussianConfig::seed);

    m.def("synth_gaussian_stream", &synth_gaussian_stream);
    m.def("apply_feature_drop", &apply_feature_drop, py::arg("stream"), py::arg("drop_at"),
          py::arg("dropped"));

    py::class_<PredictionRecord>(m, "PredictionRecord")
        .def_readonly("time_index", &PredictionRecord::time_index)
        .def_readonly("truth", &PredictionRecord::truth)
        .def_readonly("predicted", &PredictionRecord::predicted)
        .def_readonly("correct", &PredictionRecord::correct);

    py::class_<PrequentialReport>(m, "PrequentialReport")
        .def_readonly("log", &PrequentialReport::log)
        .def_readonly("windowed", &PrequentialReport::windowed)
        .def_readonly("accuracy_pct", &PrequentialReport::accuracy_pct)
        .def_readonly("kappa_pct", &PrequentialReport::kappa_pct)
        .def_readonly("learner_seconds", &PrequentialReport::learner_seconds)
        .def_readonly("model_size_kb", &PrequentialReport::model_size_kb)
        .def_readonly("cost_ram_hours", &PrequentialReport::cost_ram_hours)
        .def_readonly("aborted", &PrequentialReport::aborted)
        .def_readonly("abort_reason", &PrequentialReport::abort_reason)
        .def("instances", &PrequentialReport::instances);

    m.def(
        "prequential_run",
        [](const std::vector<Instance>& stream, Classifier& learner,
           std::optional<SisConfig> sis, std::size_t metrics_window) {
            EvalOptions opts;
            opts.metrics_window = metrics_window;
            return prequential_run(std::span<const Instance>(stream), learner, sis, {}, opts);
        },
        py::arg("stream"), py::arg("learner"), py::arg("sis") = py::none(),
        py::arg("metrics_window") = 20);

    m.def("kappa", [](const std::vector<std::vector<std::uint64_t>>& counts) {
        ConfusionMatrix cm;
        for (std::size_t t = 0; t < counts.size(); ++t)
            for (std::size_t p = 0; p < counts[t].size(); ++p)
                for (std::uint64_t i = 0; i < counts[t][p]; ++i)
                    cm.add(static_cast<int>(t), static_cast<int>(p));
        return kappa(cm);
    });
}
