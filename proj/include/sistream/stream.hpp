#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace sistream {

/// One timestamped feature vector with an optional class label.
struct Instance {
    std::size_t time_index = 0;
    std::vector<double> features;
    std::optional<int> label;

    std::size_t dim() const { return features.size(); }
    bool labeled() const { return label.has_value(); }
};

/// Dense label space. String labels are interned to integer ids in
/// first-seen order so confusion-matrix indexing stays stable.
class ClassSpace {
public:
    int intern(const std::string& name);
    std::optional<int> find(const std::string& name) const;
    const std::string& name(int id) const;
    std::size_t size() const { return names_.size(); }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, int> ids_;
};

struct Dataset {
    std::vector<Instance> instances;
    ClassSpace classes;
    std::size_t dim = 0;
};

/// Row layout of a recorded stream file: m numeric fields then one label
/// field, one instance per line.
struct CsvSchema {
    char delimiter = ',';
    bool has_header = false;
};

/// Errors raised while ingesting or assembling streams. Messages carry
/// line/column positions where applicable.
class StreamError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Reads a delimiter-separated file into a stream. Instances get
/// consecutive time indices starting at 0, in file order.
Dataset read_recorded_stream(const std::string& path, const CsvSchema& schema = {});

/// One drift phase of a synthetic Gaussian stream. `label_map[y]` selects
/// the distribution generating class y's features; empty means identity.
struct GaussianPhase {
    std::size_t length = 0;
    std::vector<int> label_map;
};

struct GaussianConfig {
    int n_classes = 2;
    std::size_t dim = 2;
    double separation = 3.0;
    double stddev = 1.0;
    std::vector<double> prior;  // empty = uniform
    std::vector<GaussianPhase> phases;
    /// Labels persist for this many consecutive instances (1 = i.i.d.).
    /// Event streams come in runs, which is what the similarity search
    /// leans on.
    std::size_t run_length = 1;
    std::uint64_t seed = 1;
};

/// Draws a labeled stream from class-conditional Gaussians. Deterministic
/// for a fixed config; abrupt drift is realized by changing the
/// label-to-distribution mapping between phases.
std::vector<Instance> synth_gaussian_stream(const GaussianConfig& cfg);

/// Removes the given feature positions from every instance at or after
/// `drop_at`. Earlier instances are untouched; labels and count are
/// preserved exactly.
std::vector<Instance> apply_feature_drop(std::vector<Instance> stream,
                                         std::size_t drop_at,
                                         const std::vector<std::size_t>& dropped);

enum class ScenarioKind {
    replay,
    abrupt_concat,
    feature_drop,
    overlap_swap,
    synthetic_gaussian,
};

constexpr std::size_t kToEnd = std::numeric_limits<std::size_t>::max();

/// A contiguous row range of a recorded source file.
struct Segment {
    std::string source;
    std::size_t start = 0;
    std::size_t length = kToEnd;
};

struct ScenarioSpec {
    ScenarioKind kind = ScenarioKind::replay;
    std::vector<Segment> segments;
    std::optional<std::size_t> drop_at;
    std::vector<std::size_t> dropped_features;
    std::uint64_t seed = 1;
    GaussianConfig gaussian;  // used when kind == synthetic_gaussian
};

/// Loads a scenario spec from a plain key-value file (`key = value`, one
/// per line, `#` comments, `segment` and `phase` repeatable).
ScenarioSpec parse_scenario_file(const std::string& path);

/// Materializes the scenario's instance sequence. Segments are read,
/// sliced and concatenated with a shared label space, time indices are
/// rewritten to 0..L-1, and the feature drop is applied when present.
Dataset build_scenario_stream(const ScenarioSpec& spec, const CsvSchema& schema = {});

}  // namespace sistream
