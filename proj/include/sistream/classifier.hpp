#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "sistream/stream.hpp"

namespace sistream {

/// Contract every base learner satisfies. Prediction is total: an
/// untrained learner answers with its default class (the first label it
/// was trained on, class 0 before that). learn_one inspects each instance
/// exactly once; reset clears learned state but keeps hyperparameters.
class Classifier {
public:
    virtual ~Classifier() = default;

    virtual void learn_one(const Instance& x) = 0;
    virtual int predict_one(const Instance& x) const = 0;
    virtual void reset() = 0;

    /// Estimated deep size in bytes (portable proxy, not allocator truth).
    virtual std::size_t size_bytes() const = 0;

    virtual std::string name() const = 0;
};

/// Predicts the most frequent label seen so far. Baseline learner; ties
/// go to the smallest class id.
class MajorityClass final : public Classifier {
public:
    void learn_one(const Instance& x) override {
        if (!x.labeled())
            throw std::invalid_argument("MajorityClass: unlabeled instance");
        const std::size_t c = static_cast<std::size_t>(*x.label);
        if (c >= counts_.size()) counts_.resize(c + 1, 0);
        ++counts_[c];
    }

    int predict_one(const Instance&) const override {
        int best = 0;
        std::uint64_t best_count = 0;
        for (std::size_t c = 0; c < counts_.size(); ++c) {
            if (counts_[c] > best_count) {
                best_count = counts_[c];
                best = static_cast<int>(c);
            }
        }
        return best;
    }

    void reset() override { counts_.clear(); }

    std::size_t size_bytes() const override { return 32 + counts_.size() * 8; }

    std::string name() const override { return "majority"; }

private:
    std::vector<std::uint64_t> counts_;
};

}  // namespace sistream
