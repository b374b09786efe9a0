#include "sistream/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sistream/drift.hpp"

namespace sistream {

namespace fs = std::filesystem;

std::optional<LearnerKind> parse_learner(const std::string& name) {
    if (name == "hat+sis") return LearnerKind::hat_sis;
    if (name == "hat+ddm") return LearnerKind::hat_ddm;
    if (name == "ht+ddm") return LearnerKind::ht_ddm;
    if (name == "ht") return LearnerKind::ht;
    return std::nullopt;
}

std::string learner_name(LearnerKind kind) {
    switch (kind) {
        case LearnerKind::hat_sis: return "hat+sis";
        case LearnerKind::hat_ddm: return "hat+ddm";
        case LearnerKind::ht_ddm: return "ht+ddm";
        case LearnerKind::ht: return "ht";
    }
    return "?";
}

std::unique_ptr<Classifier> make_learner(LearnerKind kind, const TreeConfig& tree) {
    switch (kind) {
        case LearnerKind::hat_sis:
            return std::make_unique<HoeffdingAdaptiveTree>(tree);
        case LearnerKind::hat_ddm:
            return wrap_with_ddm(std::make_unique<HoeffdingAdaptiveTree>(tree));
        case LearnerKind::ht_ddm:
            return wrap_with_ddm(std::make_unique<HoeffdingTree>(tree));
        case LearnerKind::ht:
            return std::make_unique<HoeffdingTree>(tree);
    }
    throw std::invalid_argument("unknown learner kind");
}

namespace {

constexpr const char* kSyntheticSource = "synthetic:gaussian";

Dataset load_stream(const RunConfig& config) {
    ScenarioSpec spec = config.scenario;
    spec.seed = config.seed;
    if (spec.kind == ScenarioKind::synthetic_gaussian || config.source == kSyntheticSource) {
        spec.kind = ScenarioKind::synthetic_gaussian;
        if (spec.gaussian.phases.empty())
            spec.gaussian.phases.push_back({1000, {}});
    } else if (spec.segments.empty()) {
        if (config.source.empty()) throw StreamError("no source given");
        spec.segments.push_back({config.source, 0, kToEnd});
    }
    return build_scenario_stream(spec, config.schema);
}

std::string out_path(const RunConfig& config, const std::string& file) {
    const std::string name = config.tag.empty() ? file : config.tag + "_" + file;
    return (fs::path(config.output_dir) / name).string();
}

void check_overwrite(const RunConfig& config) {
    for (const char* file : {"summary.tsv", "instances.tsv", "windowed.tsv"}) {
        const std::string path = out_path(config, file);
        if (!config.force && fs::exists(path))
            throw std::runtime_error("refusing to overwrite " + path + " (use --force)");
    }
}

std::string format_num(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

}  // namespace

RunSummary run(const RunConfig& config) {
    RunSummary summary;
    summary.learner = learner_name(config.learner);
    summary.tag = config.tag;

    fs::create_directories(config.output_dir);
    check_overwrite(config);

    Dataset data = load_stream(config);
    std::vector<std::string> names;
    for (std::size_t i = 0; i < data.classes.size(); ++i)
        names.push_back(data.classes.name(static_cast<int>(i)));

    auto learner = make_learner(config.learner, config.tree);

    EvalOptions opts;
    opts.metrics_window = config.metrics_window;
    if (!config.scenario.dropped_features.empty() && data.dim > 0) {
        // Surviving positions for the evaluator's scaler/buffer projection.
        std::vector<bool> dropped(data.dim, false);
        for (std::size_t j : config.scenario.dropped_features)
            if (j < data.dim) dropped[j] = true;
        std::vector<std::size_t> keep;
        for (std::size_t j = 0; j < data.dim; ++j)
            if (!dropped[j]) keep.push_back(j);
        opts.feature_keep_on_shrink = std::move(keep);
    }

    std::optional<SisConfig> sis;
    if (config.learner == LearnerKind::hat_sis) sis = config.sis;

    PrequentialReport report = prequential_run(
        std::span<const Instance>(data.instances), *learner, sis, names, opts);

    write_summary(out_path(config, "summary.tsv"), summary.learner, report);
    write_instance_log(out_path(config, "instances.tsv"), report);
    write_windowed_series(out_path(config, "windowed.tsv"), report);

    summary.instances = report.instances();
    summary.accuracy_pct = report.accuracy_pct;
    summary.kappa_pct = report.kappa_pct;
    summary.time_s = report.learner_seconds;
    summary.size_kb = report.model_size_kb;
    summary.cost_ram_hours = report.cost_ram_hours;
    summary.failed = report.aborted;
    summary.error = report.abort_reason;
    return summary;
}

std::vector<AggregateRow> aggregate_summaries(std::span<const RunSummary> runs) {
    struct Metric {
        const char* name;
        double (*get)(const RunSummary&);
    };
    static const Metric metrics[] = {
        {"accuracy_pct", [](const RunSummary& r) { return r.accuracy_pct; }},
        {"kappa_pct", [](const RunSummary& r) { return r.kappa_pct; }},
        {"time_s", [](const RunSummary& r) { return r.time_s; }},
        {"size_kb", [](const RunSummary& r) { return r.size_kb; }},
        {"cost_ram_hours", [](const RunSummary& r) { return r.cost_ram_hours; }},
    };

    std::vector<AggregateRow> out;
    for (const auto& metric : metrics) {
        AggregateRow row;
        row.metric = metric.name;
        std::size_t n = 0;
        double sum = 0.0;
        for (const auto& r : runs) {
            if (r.failed) continue;
            const double v = metric.get(r);
            if (n == 0) {
                row.min = row.max = v;
            } else {
                row.min = std::min(row.min, v);
                row.max = std::max(row.max, v);
            }
            sum += v;
            ++n;
        }
        if (n == 0) continue;
        row.mean = sum / static_cast<double>(n);
        double sq = 0.0;
        for (const auto& r : runs) {
            if (r.failed) continue;
            const double d = metric.get(r) - row.mean;
            sq += d * d;
        }
        row.stddev = std::sqrt(sq / static_cast<double>(n));
        out.push_back(row);
    }
    return out;
}

std::vector<RunSummary> run_battery(std::span<const RunConfig> configs) {
    if (configs.empty()) throw std::invalid_argument("battery: need at least one run");

    std::vector<RunSummary> summaries;
    for (std::size_t i = 0; i < configs.size(); ++i) {
        RunConfig cfg = configs[i];
        if (cfg.tag.empty()) cfg.tag = "run" + std::to_string(i);
        try {
            summaries.push_back(run(cfg));
        } catch (const std::exception& e) {
            RunSummary failed;
            failed.learner = learner_name(cfg.learner);
            failed.tag = cfg.tag;
            failed.failed = true;
            failed.error = e.what();
            summaries.push_back(failed);
        }
    }

    const std::string path =
        (fs::path(configs[0].output_dir) / "battery.tsv").string();
    if (!configs[0].force && fs::exists(path))
        throw std::runtime_error("refusing to overwrite " + path + " (use --force)");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "row\tlearner\ttag\tinstances\taccuracy_pct\tkappa_pct\ttime_s\tsize_kb\tcost_ram_hours\tstatus\n";
    for (const auto& s : summaries)
        out << "run\t" << s.learner << '\t' << s.tag << '\t' << s.instances << '\t'
            << format_num(s.accuracy_pct) << '\t' << format_num(s.kappa_pct) << '\t'
            << format_num(s.time_s) << '\t' << format_num(s.size_kb) << '\t'
            << format_num(s.cost_ram_hours) << '\t'
            << (s.failed ? "failed: " + s.error : std::string("ok")) << '\n';
    for (const auto& row : aggregate_summaries(summaries))
        out << "aggregate\t" << row.metric << "\tmu=" << format_num(row.mean)
            << "\tsigma=" << format_num(row.stddev) << "\tmin=" << format_num(row.min)
            << "\tmax=" << format_num(row.max) << "\t\t\t\t\n";
    return summaries;
}

ScenarioSpec make_scenario(ScenarioName name, const std::vector<std::string>& sources,
                           const ScenarioParams& params) {
    auto segments_with_sources = [&](std::size_t expected) {
        if (params.segments.size() != expected)
            throw StreamError("scenario needs exactly " + std::to_string(expected) +
                              " segments, got " + std::to_string(params.segments.size()));
        std::vector<Segment> segs = params.segments;
        for (std::size_t i = 0; i < segs.size(); ++i) {
            if (segs[i].source.empty()) {
                if (sources.empty()) throw StreamError("scenario segment without a source");
                segs[i].source = sources[std::min(i, sources.size() - 1)];
            }
        }
        return segs;
    };

    ScenarioSpec spec;
    spec.seed = params.seed;
    switch (name) {
        case ScenarioName::I:
            if (sources.empty()) throw StreamError("scenario I needs a source");
            spec.kind = ScenarioKind::replay;
            spec.segments.push_back({sources[0], 0, kToEnd});
            break;
        case ScenarioName::II:
            spec.kind = ScenarioKind::abrupt_concat;
            spec.segments = segments_with_sources(3);
            break;
        case ScenarioName::III:
            if (!params.drop_at.has_value() || params.dropped_features.empty())
                throw StreamError("scenario III needs drop_at and dropped feature indices");
            spec.kind = ScenarioKind::feature_drop;
            if (params.segments.empty()) {
                if (sources.empty()) throw StreamError("scenario III needs a source");
                spec.segments.push_back({sources[0], 0, kToEnd});
            } else {
                spec.segments = params.segments;
                for (auto& seg : spec.segments)
                    if (seg.source.empty() && !sources.empty()) seg.source = sources[0];
            }
            spec.drop_at = params.drop_at;
            spec.dropped_features = params.dropped_features;
            break;
        case ScenarioName::IV:
            spec.kind = ScenarioKind::overlap_swap;
            spec.segments = segments_with_sources(2);
            if (params.swap_order) std::swap(spec.segments[0], spec.segments[1]);
            break;
    }
    return spec;
}

}  // namespace sistream
