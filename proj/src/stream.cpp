#include "sistream/stream.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace sistream {

int ClassSpace::intern(const std::string& name) {
    auto it = ids_.find(name);
    if (it != ids_.end()) return it->second;
    int id = static_cast<int>(names_.size());
    names_.push_back(name);
    ids_.emplace(name, id);
    return id;
}

std::optional<int> ClassSpace::find(const std::string& name) const {
    auto it = ids_.find(name);
    if (it == ids_.end()) return std::nullopt;
    return it->second;
}

const std::string& ClassSpace::name(int id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= names_.size())
        throw std::out_of_range("ClassSpace: unknown class id " + std::to_string(id));
    return names_[static_cast<std::size_t>(id)];
}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_fields(const std::string& line, char delimiter) {
    std::vector<std::string> out;
    std::size_t begin = 0;
    while (true) {
        std::size_t end = line.find(delimiter, begin);
        if (end == std::string::npos) {
            out.push_back(line.substr(begin));
            break;
        }
        out.push_back(line.substr(begin, end - begin));
        begin = end + 1;
    }
    return out;
}

double parse_feature(const std::string& cell, std::size_t line_no, std::size_t column) {
    const std::string v = trim(cell);
    if (v.empty())
        throw StreamError("line " + std::to_string(line_no) + ", column " +
                          std::to_string(column) + ": blank feature cell");
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), value);
    if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(value))
        throw StreamError("line " + std::to_string(line_no) + ", column " +
                          std::to_string(column) + ": not a finite number: '" + v + "'");
    return value;
}

}  // namespace

Dataset read_recorded_stream(const std::string& path, const CsvSchema& schema) {
    std::ifstream in(path);
    if (!in) throw StreamError("cannot open stream file: " + path);

    Dataset out;
    std::string line;
    std::size_t line_no = 0;
    std::size_t arity = 0;  // fields per row, fixed by the first data row

    while (std::getline(in, line)) {
        ++line_no;
        if (schema.has_header && line_no == 1) continue;
        if (trim(line).empty()) continue;

        auto fields = split_fields(line, schema.delimiter);
        if (arity == 0) {
            if (fields.size() < 2)
                throw StreamError("line " + std::to_string(line_no) +
                                  ": need at least one feature and a label");
            arity = fields.size();
        } else if (fields.size() != arity) {
            throw StreamError("line " + std::to_string(line_no) + ": expected " +
                              std::to_string(arity) + " fields, got " +
                              std::to_string(fields.size()));
        }

        Instance inst;
        inst.time_index = out.instances.size();
        inst.features.reserve(arity - 1);
        for (std::size_t j = 0; j + 1 < arity; ++j)
            inst.features.push_back(parse_feature(fields[j], line_no, j + 1));
        const std::string label = trim(fields[arity - 1]);
        if (label.empty())
            throw StreamError("line " + std::to_string(line_no) + ", column " +
                              std::to_string(arity) + ": blank label");
        inst.label = out.classes.intern(label);
        out.instances.push_back(std::move(inst));
    }
    if (out.instances.empty()) throw StreamError("empty stream file: " + path);
    out.dim = arity - 1;
    return out;
}

std::vector<Instance> synth_gaussian_stream(const GaussianConfig& cfg) {
    if (cfg.n_classes < 1) throw StreamError("synth stream: need at least one class");
    if (cfg.dim == 0) throw StreamError("synth stream: need at least one feature");
    if (cfg.phases.empty()) throw StreamError("synth stream: no phases given");
    for (const auto& p : cfg.phases)
        if (p.length == 0) throw StreamError("synth stream: zero-length phase");

    std::vector<double> prior = cfg.prior;
    if (prior.empty()) prior.assign(static_cast<std::size_t>(cfg.n_classes),
                                    1.0 / cfg.n_classes);
    if (prior.size() != static_cast<std::size_t>(cfg.n_classes))
        throw StreamError("synth stream: prior size mismatch");
    double total = 0.0;
    for (double p : prior) total += p;
    if (total <= 0.0) throw StreamError("synth stream: prior must have positive mass");

    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, cfg.stddev);

    const std::size_t run_length = std::max<std::size_t>(1, cfg.run_length);
    std::vector<Instance> out;
    std::size_t t = 0;
    std::size_t left_in_run = 0;
    int label = 0;
    for (const auto& phase : cfg.phases) {
        std::vector<int> map = phase.label_map;
        if (map.empty()) {
            map.resize(static_cast<std::size_t>(cfg.n_classes));
            for (int c = 0; c < cfg.n_classes; ++c) map[static_cast<std::size_t>(c)] = c;
        }
        if (map.size() != static_cast<std::size_t>(cfg.n_classes))
            throw StreamError("synth stream: label map size mismatch");

        for (std::size_t i = 0; i < phase.length; ++i, ++t) {
            if (left_in_run == 0) {
                double u = unif(rng) * total;
                label = cfg.n_classes - 1;
                double acc = 0.0;
                for (int c = 0; c < cfg.n_classes; ++c) {
                    acc += prior[static_cast<std::size_t>(c)];
                    if (u < acc) { label = c; break; }
                }
                left_in_run = run_length;
            }
            --left_in_run;
            const int dist = map[static_cast<std::size_t>(label)];
            Instance inst;
            inst.time_index = t;
            inst.features.resize(cfg.dim);
            for (std::size_t j = 0; j < cfg.dim; ++j)
                inst.features[j] = cfg.separation * dist + normal(rng);
            inst.label = label;
            out.push_back(std::move(inst));
        }
    }
    return out;
}

std::vector<Instance> apply_feature_drop(std::vector<Instance> stream,
                                         std::size_t drop_at,
                                         const std::vector<std::size_t>& dropped) {
    if (dropped.empty()) return stream;
    if (stream.empty() || drop_at >= stream.size())
        throw StreamError("feature drop: drop_at outside the stream");

    const std::size_t m = stream[drop_at].features.size();
    std::vector<bool> is_dropped(m, false);
    std::size_t n_dropped = 0;
    for (std::size_t j : dropped) {
        if (j >= m) throw StreamError("feature drop: index " + std::to_string(j) +
                                      " out of range for dimension " + std::to_string(m));
        if (!is_dropped[j]) { is_dropped[j] = true; ++n_dropped; }
    }
    if (n_dropped == m) throw StreamError("feature drop: cannot drop all features");

    for (std::size_t t = drop_at; t < stream.size(); ++t) {
        auto& inst = stream[t];
        if (inst.features.size() != m)
            throw StreamError("feature drop: inconsistent dimension at t=" +
                              std::to_string(t));
        std::vector<double> kept;
        kept.reserve(m - n_dropped);
        for (std::size_t j = 0; j < m; ++j)
            if (!is_dropped[j]) kept.push_back(inst.features[j]);
        inst.features = std::move(kept);
    }
    return stream;
}

namespace {

std::size_t parse_size(const std::string& v, const std::string& key) {
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), value);
    if (ec != std::errc() || ptr != v.data() + v.size())
        throw StreamError("scenario file: bad integer for '" + key + "': " + v);
    return value;
}

std::vector<std::size_t> parse_index_list(const std::string& v, const std::string& key) {
    std::vector<std::size_t> out;
    for (const auto& item : split_fields(v, ','))
        out.push_back(parse_size(trim(item), key));
    return out;
}

// segment = source[:start[:length]]
Segment parse_segment(const std::string& v) {
    Segment seg;
    auto parts = split_fields(v, ':');
    seg.source = trim(parts[0]);
    if (parts.size() > 1 && !trim(parts[1]).empty())
        seg.start = parse_size(trim(parts[1]), "segment start");
    if (parts.size() > 2 && !trim(parts[2]).empty())
        seg.length = parse_size(trim(parts[2]), "segment length");
    if (parts.size() > 3) throw StreamError("scenario file: bad segment: " + v);
    return seg;
}

// phase = length[:label_map]
GaussianPhase parse_phase(const std::string& v) {
    GaussianPhase phase;
    auto parts = split_fields(v, ':');
    phase.length = parse_size(trim(parts[0]), "phase length");
    if (parts.size() > 1 && !trim(parts[1]).empty())
        for (const auto& item : split_fields(parts[1], ','))
            phase.label_map.push_back(static_cast<int>(parse_size(trim(item), "phase map")));
    if (parts.size() > 2) throw StreamError("scenario file: bad phase: " + v);
    return phase;
}

ScenarioKind parse_kind(const std::string& v) {
    if (v == "replay") return ScenarioKind::replay;
    if (v == "abrupt-concat") return ScenarioKind::abrupt_concat;
    if (v == "feature-drop") return ScenarioKind::feature_drop;
    if (v == "overlap-swap") return ScenarioKind::overlap_swap;
    if (v == "synthetic-gaussian") return ScenarioKind::synthetic_gaussian;
    throw StreamError("scenario file: unknown kind: " + v);
}

}  // namespace

ScenarioSpec parse_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw StreamError("cannot open scenario file: " + path);

    ScenarioSpec spec;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        std::size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw StreamError("scenario file line " + std::to_string(line_no) +
                              ": expected 'key = value'");
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));

        if (key == "kind") spec.kind = parse_kind(value);
        else if (key == "seed") spec.seed = parse_size(value, key);
        else if (key == "segment") spec.segments.push_back(parse_segment(value));
        else if (key == "drop_at") spec.drop_at = parse_size(value, key);
        else if (key == "drop") spec.dropped_features = parse_index_list(value, key);
        else if (key == "classes") spec.gaussian.n_classes = static_cast<int>(parse_size(value, key));
        else if (key == "dim") spec.gaussian.dim = parse_size(value, key);
        else if (key == "separation") spec.gaussian.separation = std::stod(value);
        else if (key == "stddev") spec.gaussian.stddev = std::stod(value);
        else if (key == "run_length") spec.gaussian.run_length = parse_size(value, key);
        else if (key == "phase") spec.gaussian.phases.push_back(parse_phase(value));
        else throw StreamError("scenario file line " + std::to_string(line_no) +
                               ": unknown key '" + key + "'");
    }
    return spec;
}

Dataset build_scenario_stream(const ScenarioSpec& spec, const CsvSchema& schema) {
    Dataset out;

    if (spec.kind == ScenarioKind::synthetic_gaussian) {
        GaussianConfig cfg = spec.gaussian;
        cfg.seed = spec.seed;
        out.instances = synth_gaussian_stream(cfg);
        out.dim = cfg.dim;
        for (int c = 0; c < cfg.n_classes; ++c) out.classes.intern(std::to_string(c));
    } else {
        if (spec.segments.empty()) throw StreamError("scenario: no segments given");
        // Sources are cached so multi-segment scenarios reread nothing.
        std::unordered_map<std::string, Dataset> sources;
        for (const auto& seg : spec.segments) {
            if (seg.source.empty()) throw StreamError("scenario: segment without source");
            if (!sources.count(seg.source))
                sources.emplace(seg.source, read_recorded_stream(seg.source, schema));
            const Dataset& src = sources.at(seg.source);
            if (seg.start >= src.instances.size())
                throw StreamError("scenario: segment start " + std::to_string(seg.start) +
                                  " beyond source " + seg.source);
            std::size_t len = std::min(seg.length, src.instances.size() - seg.start);
            if (len == 0) throw StreamError("scenario: empty segment of " + seg.source);
            for (std::size_t i = 0; i < len; ++i) {
                Instance inst = src.instances[seg.start + i];
                inst.label = out.classes.intern(src.classes.name(*inst.label));
                inst.time_index = out.instances.size();
                out.instances.push_back(std::move(inst));
            }
        }
        out.dim = out.instances.front().features.size();
    }

    if (spec.drop_at.has_value() && !spec.dropped_features.empty())
        out.instances = apply_feature_drop(std::move(out.instances), *spec.drop_at,
                                           spec.dropped_features);
    return out;
}

}  // namespace sistream
