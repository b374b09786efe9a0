#include <CLI11.hpp>
#include <cstdio>
#include <string>
#include <vector>

#include "sistream/cli.hpp"

namespace {

struct CommonFlags {
    std::string learner = "hat+sis";
    std::vector<std::string> sources;
    std::string scenario;
    std::vector<std::string> segments;
    std::size_t drop_at = 0;
    bool has_drop_at = false;
    std::string drop_features;
    std::size_t n = 200, k = 1, r = 10;
    double eps = 0.1;
    std::size_t grace = 200;
    double delta = 1e-7, tau = 0.05;
    std::size_t metrics_window = 20;
    std::uint64_t seed = 1;
    std::string out = ".";
    bool force = false;
    std::string delimiter = ",";
    bool header = false;
    // synthetic stream knobs
    int synth_classes = 2;
    std::size_t synth_dim = 2;
    std::size_t synth_length = 1000;
    double synth_separation = 3.0;
    double synth_stddev = 1.0;
    std::size_t synth_flip_at = 0;
    std::size_t synth_run = 1;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--learner", f.learner, "hat+sis | hat+ddm | ht+ddm | ht");
    cmd->add_option("--source", f.sources,
                    "stream file, or 'synthetic:gaussian' (repeatable for battery)")
        ->required();
    cmd->add_option("--scenario", f.scenario, "I, II, III, IV, or a scenario spec file");
    cmd->add_option("--segment", f.segments, "row range 'source:start:length' (repeatable)");
    auto* drop_at = cmd->add_option("--drop-at", f.drop_at, "feature drop position");
    cmd->callback([drop_at, &f]() { f.has_drop_at = drop_at->count() > 0; });
    cmd->add_option("--drop-features", f.drop_features, "comma-separated feature indices to drop");
    cmd->add_option("--N", f.n, "SIS buffer capacity");
    cmd->add_option("--k", f.k, "SIS trial set size");
    cmd->add_option("--r", f.r, "SIS warm-restart radius");
    cmd->add_option("--eps", f.eps, "SIS trial error threshold");
    cmd->add_option("--grace", f.grace, "tree grace period");
    cmd->add_option("--delta", f.delta, "tree split confidence");
    cmd->add_option("--tau", f.tau, "tree tie threshold");
    cmd->add_option("--metrics-window", f.metrics_window, "windowed-accuracy window");
    cmd->add_option("--seed", f.seed, "seed for all randomness");
    cmd->add_option("--out", f.out, "output directory")->envname("SISTREAM_OUT");
    cmd->add_flag("--force", f.force, "overwrite existing report files");
    cmd->add_option("--delimiter", f.delimiter, "stream file field delimiter");
    cmd->add_flag("--header", f.header, "stream file has a header row");
    cmd->add_option("--synth-classes", f.synth_classes, "synthetic stream class count");
    cmd->add_option("--synth-dim", f.synth_dim, "synthetic stream feature count");
    cmd->add_option("--synth-length", f.synth_length, "synthetic stream length");
    cmd->add_option("--synth-sep", f.synth_separation, "synthetic class mean separation");
    cmd->add_option("--synth-stddev", f.synth_stddev, "synthetic feature stddev");
    cmd->add_option("--synth-flip-at", f.synth_flip_at,
                    "swap the first two class distributions at this position");
    cmd->add_option("--synth-run", f.synth_run, "label run length in the synthetic stream");
}

std::vector<std::size_t> parse_indices(const std::string& csv) {
    std::vector<std::size_t> out;
    std::size_t begin = 0;
    while (begin <= csv.size() && !csv.empty()) {
        std::size_t end = csv.find(',', begin);
        const std::string item = csv.substr(begin, end - begin);
        if (!item.empty()) out.push_back(std::stoull(item));
        if (end == std::string::npos) break;
        begin = end + 1;
    }
    return out;
}

sistream::Segment parse_segment_flag(const std::string& text) {
    sistream::Segment seg;
    std::vector<std::string> parts;
    std::size_t begin = 0;
    while (true) {
        std::size_t end = text.find(':', begin);
        parts.push_back(text.substr(begin, end - begin));
        if (end == std::string::npos) break;
        begin = end + 1;
    }
    // "start:length" or "source:start:length"
    if (parts.size() == 2) {
        seg.start = std::stoull(parts[0]);
        seg.length = std::stoull(parts[1]);
    } else if (parts.size() == 3) {
        seg.source = parts[0];
        seg.start = std::stoull(parts[1]);
        seg.length = std::stoull(parts[2]);
    } else {
        throw CLI::ValidationError("--segment", "expected 'start:length' or 'source:start:length'");
    }
    return seg;
}

sistream::RunConfig build_config(const CommonFlags& f, const std::string& source) {
    sistream::RunConfig cfg;
    auto kind = sistream::parse_learner(f.learner);
    if (!kind) throw CLI::ValidationError("--learner", "unknown learner: " + f.learner);
    cfg.learner = *kind;
    cfg.source = source;
    cfg.sis = {f.n, f.k, f.r, f.eps, 0};
    cfg.tree.grace_period = f.grace;
    cfg.tree.split_confidence_delta = f.delta;
    cfg.tree.tie_threshold_tau = f.tau;
    cfg.metrics_window = f.metrics_window;
    cfg.seed = f.seed;
    cfg.output_dir = f.out;
    cfg.force = f.force;
    cfg.schema.delimiter = f.delimiter.empty() ? ',' : f.delimiter[0];
    cfg.schema.has_header = f.header;

    if (source == "synthetic:gaussian") {
        cfg.scenario.kind = sistream::ScenarioKind::synthetic_gaussian;
        auto& g = cfg.scenario.gaussian;
        g.n_classes = f.synth_classes;
        g.dim = f.synth_dim;
        g.separation = f.synth_separation;
        g.stddev = f.synth_stddev;
        g.run_length = f.synth_run;
        if (f.synth_flip_at > 0 && f.synth_flip_at < f.synth_length) {
            std::vector<int> flipped(static_cast<std::size_t>(f.synth_classes));
            for (int c = 0; c < f.synth_classes; ++c) flipped[static_cast<std::size_t>(c)] = c;
            if (f.synth_classes >= 2) std::swap(flipped[0], flipped[1]);
            g.phases.push_back({f.synth_flip_at, {}});
            g.phases.push_back({f.synth_length - f.synth_flip_at, flipped});
        } else {
            g.phases.push_back({f.synth_length, {}});
        }
    }

    if (!f.scenario.empty() && source != "synthetic:gaussian") {
        sistream::ScenarioParams params;
        params.seed = f.seed;
        for (const auto& s : f.segments) params.segments.push_back(parse_segment_flag(s));
        if (f.has_drop_at) params.drop_at = f.drop_at;
        params.dropped_features = parse_indices(f.drop_features);

        if (f.scenario == "I")
            cfg.scenario = sistream::make_scenario(sistream::ScenarioName::I, {source}, params);
        else if (f.scenario == "II")
            cfg.scenario = sistream::make_scenario(sistream::ScenarioName::II, {source}, params);
        else if (f.scenario == "III")
            cfg.scenario = sistream::make_scenario(sistream::ScenarioName::III, {source}, params);
        else if (f.scenario == "IV")
            cfg.scenario = sistream::make_scenario(sistream::ScenarioName::IV, {source}, params);
        else
            cfg.scenario = sistream::parse_scenario_file(f.scenario);
    } else if (f.has_drop_at && source != "synthetic:gaussian") {
        // Plain replay with a feature drop.
        cfg.scenario.kind = sistream::ScenarioKind::feature_drop;
        cfg.scenario.segments.push_back({source, 0, sistream::kToEnd});
        cfg.scenario.drop_at = f.drop_at;
        cfg.scenario.dropped_features = parse_indices(f.drop_features);
    } else if (f.has_drop_at && source == "synthetic:gaussian") {
        cfg.scenario.drop_at = f.drop_at;
        cfg.scenario.dropped_features = parse_indices(f.drop_features);
    }
    return cfg;
}

void print_summary(const sistream::RunSummary& s) {
    std::printf("%-8s %-8s instances=%zu accuracy=%.2f%% kappa=%.2f%% time=%.3fs size=%.2fKB cost=%.4f%s\n",
                s.learner.c_str(), s.tag.empty() ? "-" : s.tag.c_str(), s.instances,
                s.accuracy_pct, s.kappa_pct, s.time_s, s.size_kb, s.cost_ram_hours,
                s.failed ? (" FAILED: " + s.error).c_str() : "");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sistream: prequential benchmark for streaming classifiers"};
    app.require_subcommand(1);

    CommonFlags run_flags;
    auto* run_cmd = app.add_subcommand("run", "evaluate one learner on one stream");
    add_common_flags(run_cmd, run_flags);

    CommonFlags battery_flags;
    auto* battery_cmd =
        app.add_subcommand("battery", "evaluate a learner across several streams");
    add_common_flags(battery_cmd, battery_flags);

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(run_cmd)) {
            if (run_flags.sources.size() != 1)
                throw CLI::ValidationError("--source", "run takes exactly one source");
            const auto summary = sistream::run(build_config(run_flags, run_flags.sources[0]));
            print_summary(summary);
            return summary.failed ? 1 : 0;
        }
        if (app.got_subcommand(battery_cmd)) {
            std::vector<sistream::RunConfig> configs;
            for (std::size_t i = 0; i < battery_flags.sources.size(); ++i) {
                auto cfg = build_config(battery_flags, battery_flags.sources[i]);
                cfg.tag = "run" + std::to_string(i);
                configs.push_back(std::move(cfg));
            }
            const auto summaries = sistream::run_battery(configs);
            bool any_failed = false;
            for (const auto& s : summaries) {
                print_summary(s);
                any_failed = any_failed || s.failed;
            }
            for (const auto& row : sistream::aggregate_summaries(summaries))
                std::printf("aggregate %-14s mu=%.4f sigma=%.4f min=%.4f max=%.4f\n",
                            row.metric.c_str(), row.mean, row.stddev, row.min, row.max);
            return any_failed ? 1 : 0;
        }
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
