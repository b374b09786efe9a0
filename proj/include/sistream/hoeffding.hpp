#pragma once

#include <cmath>
#include <memory>
#include <stdexcept>

#include "sistream/classifier.hpp"
#include "sistream/drift.hpp"

namespace sistream {

struct HoeffdingBoundParams {
    double range_r = 1.0;
    double delta = 1e-7;
    std::size_t n = 1;
};

/// R * sqrt(ln(1/delta) / (2n)): with probability 1-delta the empirical
/// mean of n observations of range R deviates from the true mean by less
/// than this.
inline double hoeffding_bound(const HoeffdingBoundParams& p) {
    if (p.n < 1) throw std::invalid_argument("hoeffding_bound: n must be >= 1");
    if (p.delta <= 0.0 || p.delta >= 1.0)
        throw std::invalid_argument("hoeffding_bound: delta must be in (0, 1)");
    if (p.range_r <= 0.0) throw std::invalid_argument("hoeffding_bound: R must be > 0");
    return p.range_r * std::sqrt(std::log(1.0 / p.delta) / (2.0 * static_cast<double>(p.n)));
}

enum class LeafPrediction { majority, naive_bayes_adaptive };

struct TreeConfig {
    std::size_t grace_period = 200;
    double split_confidence_delta = 1e-7;
    double tie_threshold_tau = 0.05;
    LeafPrediction leaf_prediction = LeafPrediction::naive_bayes_adaptive;
    int split_candidates = 10;  // thresholds evaluated per numeric feature
};

namespace detail {
struct TreeImpl;
}

/// Incremental Hoeffding tree. Leaves keep class counts and per-class
/// Gaussian sketches per numeric feature; a leaf splits once the
/// information-gain lead of the best candidate over the runner-up
/// exceeds the Hoeffding bound (or the bound drops below tau).
class HoeffdingTree : public Classifier {
public:
    explicit HoeffdingTree(TreeConfig cfg = {});
    ~HoeffdingTree() override;
    HoeffdingTree(HoeffdingTree&&) noexcept;
    HoeffdingTree& operator=(HoeffdingTree&&) noexcept;

    void learn_one(const Instance& x) override;
    int predict_one(const Instance& x) const override;
    void reset() override;
    std::size_t size_bytes() const override;
    std::string name() const override { return "ht"; }

    const TreeConfig& config() const;
    std::size_t node_count() const;
    std::size_t split_count() const;

protected:
    HoeffdingTree(TreeConfig cfg, bool adaptive, Adwin::Options monitor);
    std::unique_ptr<detail::TreeImpl> impl_;
};

/// Hoeffding adaptive tree: every split node carries an ADWIN monitor of
/// its subtree's 0/1 error. A detected change grows an alternate subtree
/// on subsequent instances; the alternate replaces the main subtree once
/// its monitored error is lower (ties keep the main tree).
class HoeffdingAdaptiveTree final : public HoeffdingTree {
public:
    explicit HoeffdingAdaptiveTree(TreeConfig cfg = {},
                                   Adwin::Options monitor = Adwin::Options{});

    std::string name() const override { return "hat"; }
};

}  // namespace sistream
