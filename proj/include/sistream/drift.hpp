#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <vector>

#include "sistream/classifier.hpp"

namespace sistream {

/// Adaptive-windowing change detector and mean estimator. Keeps a
/// variable-length window of recent values in exponential-histogram
/// buckets; the window shrinks when two sub-windows have means further
/// apart than the Hoeffding-style cut threshold allows.
class Adwin {
public:
    struct Options {
        double delta = 0.002;          // confidence of the cut test
        int max_buckets_per_row = 5;   // bucket compression parameter M
        int check_every = 32;          // cut test cadence, in updates
        std::size_t min_window = 10;   // no cut test below this width
        std::size_t min_sub_window = 5;
    };

    Adwin() : Adwin(Options{}) {}
    explicit Adwin(double delta) : Adwin(Options{.delta = delta}) {}
    explicit Adwin(const Options& opts);

    /// Feeds one value in [0, 1]. Returns true when a change was detected
    /// (older buckets were dropped).
    bool update(double value);

    double estimate() const {
        return width_ == 0 ? 0.0 : total_ / static_cast<double>(width_);
    }
    std::size_t width() const { return width_; }
    double total() const { return total_; }
    double variance() const {
        return width_ == 0 ? 0.0 : var_sum_ / static_cast<double>(width_);
    }
    std::size_t bucket_count() const;

    void clear();

    std::size_t size_bytes() const { return 64 + bucket_count() * 24; }

private:
    struct Bucket {
        double total = 0.0;
        double var_sum = 0.0;  // sum of squared deviations within the bucket
    };

    // rows_[r] holds buckets of 2^r elements, newest first. Everything in
    // row r is more recent than everything in row r+1.
    std::vector<std::deque<Bucket>> rows_;

    Options opts_;
    std::size_t width_ = 0;
    double total_ = 0.0;
    double var_sum_ = 0.0;
    std::uint64_t tick_ = 0;

    void insert_bucket(double value);
    void compress();
    void drop_oldest_bucket();
    bool detect_and_shrink();
    bool cut_found(std::size_t n0, std::size_t n1, double sum0, double sum1) const;
};

enum class DdmLevel { in_control, warning, drift };

/// Drift detection method over a learner's error stream. Tracks the
/// running error rate p and its std s; warning fires at p_min + 2*s_min,
/// drift at p_min + 3*s_min, after which the state resets.
class Ddm {
public:
    struct Options {
        std::size_t min_instances = 30;  // s is unstable at small n
        double warning_sigma = 2.0;
        double drift_sigma = 3.0;
    };

    Ddm() : Ddm(Options{}) {}
    explicit Ddm(const Options& opts) : opts_(opts) { reset(); }

    DdmLevel update(bool correct);

    double error_rate() const {
        return n_ == 0 ? 0.0 : static_cast<double>(errors_) / static_cast<double>(n_);
    }
    double stddev() const;
    std::size_t count() const { return n_; }
    DdmLevel level() const { return level_; }

    void reset();

private:
    Options opts_;
    std::size_t n_ = 0;
    std::uint64_t errors_ = 0;
    double p_min_ = 0.0;
    double s_min_ = 0.0;
    bool minima_set_ = false;
    DdmLevel level_ = DdmLevel::in_control;
};

/// DDM wrapper: tests-then-trains the inner learner and feeds the 0/1
/// correctness into DDM. On drift the inner learner is rebuilt from the
/// instances buffered since the warning level began.
class DdmClassifier final : public Classifier {
public:
    static constexpr std::size_t kWarningBufferCap = 1000;

    explicit DdmClassifier(std::unique_ptr<Classifier> inner,
                           Ddm::Options opts = Ddm::Options{})
        : inner_(std::move(inner)), ddm_(opts) {}

    void learn_one(const Instance& x) override;
    int predict_one(const Instance& x) const override { return inner_->predict_one(x); }
    void reset() override;

    std::size_t size_bytes() const override;
    std::string name() const override { return inner_->name() + "+ddm"; }

    const Ddm& detector() const { return ddm_; }
    const Classifier& inner() const { return *inner_; }

private:
    std::unique_ptr<Classifier> inner_;
    Ddm ddm_;
    std::deque<Instance> warning_buffer_;
};

inline std::unique_ptr<Classifier> wrap_with_ddm(std::unique_ptr<Classifier> inner) {
    return std::make_unique<DdmClassifier>(std::move(inner));
}

}  // namespace sistream
