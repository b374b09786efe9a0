#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "sistream/classifier.hpp"
#include "sistream/stream.hpp"

namespace testutil {

using namespace sistream;

inline Instance make_instance(std::size_t t, std::vector<double> features, int label) {
    Instance inst;
    inst.time_index = t;
    inst.features = std::move(features);
    inst.label = label;
    return inst;
}

inline Instance make_unlabeled(std::size_t t, std::vector<double> features) {
    Instance inst;
    inst.time_index = t;
    inst.features = std::move(features);
    return inst;
}

/// Majority-class learner that records every call, for protocol and
/// window-search bookkeeping checks.
class RecordingLearner final : public Classifier {
public:
    std::vector<std::size_t> learned;  // time indices, current generation
    std::size_t resets = 0;
    mutable std::size_t predict_calls = 0;

    void learn_one(const Instance& x) override {
        learned.push_back(x.time_index);
        inner_.learn_one(x);
    }
    int predict_one(const Instance& x) const override {
        ++predict_calls;
        return inner_.predict_one(x);
    }
    void reset() override {
        ++resets;
        learned.clear();
        inner_.reset();
    }
    std::size_t size_bytes() const override { return inner_.size_bytes(); }
    std::string name() const override { return "recording"; }

private:
    MajorityClass inner_;
};

/// Scratch directory, removed on destruction.
class TempDir {
public:
    TempDir() {
        auto base = std::filesystem::temp_directory_path();
        static std::mt19937_64 rng(std::random_device{}());
        path_ = base / ("sistream_test_" + std::to_string(rng()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    std::string file(const std::string& name) const { return (path_ / name).string(); }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

/// Two-class separable stream with label runs and an optional label flip.
inline std::vector<Instance> separable_stream(std::size_t length, std::uint64_t seed,
                                              std::size_t flip_at = 0,
                                              std::size_t run_length = 25,
                                              std::size_t dim = 2) {
    GaussianConfig cfg;
    cfg.n_classes = 2;
    cfg.dim = dim;
    cfg.separation = 3.0;
    cfg.stddev = 1.0;
    cfg.run_length = run_length;
    cfg.seed = seed;
    if (flip_at > 0 && flip_at < length) {
        cfg.phases.push_back({flip_at, {}});
        cfg.phases.push_back({length - flip_at, {1, 0}});
    } else {
        cfg.phases.push_back({length, {}});
    }
    return synth_gaussian_stream(cfg);
}

}  // namespace testutil
