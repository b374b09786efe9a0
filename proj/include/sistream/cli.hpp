#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sistream/evaluation.hpp"
#include "sistream/hoeffding.hpp"
#include "sistream/sis.hpp"
#include "sistream/stream.hpp"

namespace sistream {

enum class LearnerKind { hat_sis, hat_ddm, ht_ddm, ht };

std::optional<LearnerKind> parse_learner(const std::string& name);
std::string learner_name(LearnerKind kind);

/// Builds the base learner for a run; SIS wiring happens in the
/// evaluator, so hat_sis yields a plain HAT here.
std::unique_ptr<Classifier> make_learner(LearnerKind kind, const TreeConfig& tree);

struct RunConfig {
    LearnerKind learner = LearnerKind::hat_sis;
    std::string source;  // file path or "synthetic:gaussian"
    ScenarioSpec scenario;
    CsvSchema schema;
    SisConfig sis;
    TreeConfig tree;
    std::size_t metrics_window = 20;
    std::uint64_t seed = 1;
    std::string output_dir = ".";
    bool force = false;
    std::string tag;  // output filename prefix, for batteries
};

struct RunSummary {
    std::string learner;
    std::string tag;
    std::size_t instances = 0;
    double accuracy_pct = 0.0;
    double kappa_pct = 0.0;
    double time_s = 0.0;
    double size_kb = 0.0;
    double cost_ram_hours = 0.0;
    bool failed = false;
    std::string error;
};

/// Executes one prequential evaluation and writes summary.tsv,
/// instances.tsv and windowed.tsv into the output directory. Data errors
/// mid-run still flush the partial report, with a failure marker.
RunSummary run(const RunConfig& config);

struct AggregateRow {
    std::string metric;
    double mean = 0.0;
    double stddev = 0.0;
    double min = 0.0;
    double max = 0.0;
};

/// mu / sigma / min / max per metric over the successful runs.
std::vector<AggregateRow> aggregate_summaries(std::span<const RunSummary> runs);

/// Runs each config in turn and writes battery.tsv (per-run rows plus the
/// aggregate) into the first config's output directory.
std::vector<RunSummary> run_battery(std::span<const RunConfig> configs);

enum class ScenarioName { I, II, III, IV };

struct ScenarioParams {
    std::vector<Segment> segments;
    std::optional<std::size_t> drop_at;
    std::vector<std::size_t> dropped_features;
    bool swap_order = false;  // scenario IV: present the segments reversed
    std::uint64_t seed = 1;
};

/// Assembles the benchmark scenarios: I replays a source, II concatenates
/// three segments (event / normal / event re-parameterized), III drops
/// features mid-stream, IV concatenates two overlapping-event segments in
/// either order.
ScenarioSpec make_scenario(ScenarioName name, const std::vector<std::string>& sources,
                           const ScenarioParams& params);

}  // namespace sistream
