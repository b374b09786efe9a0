#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "sistream/classifier.hpp"
#include "sistream/distance.hpp"
#include "sistream/stream.hpp"

namespace sistream {

/// Bounded queue of the N most recent scaled, labeled instances, oldest
/// first. The buffer is what the learner is rebuilt from at every step.
class RecentBuffer {
public:
    explicit RecentBuffer(std::size_t capacity_n);

    /// Appends a scaled labeled instance, evicting the oldest entry when
    /// full. Entries must arrive in strictly increasing time order.
    void push(Instance x);

    /// Truncates every entry to its first `target_dim` features. Entries
    /// shorter than the target are an error: feature re-appearance is not
    /// supported under the drop model.
    void resize_features(std::size_t target_dim);

    /// Keeps exactly the given feature positions, in order.
    void resize_features(std::span<const std::size_t> keep);

    std::size_t capacity() const { return capacity_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    std::size_t dim() const { return entries_.empty() ? 0 : entries_.front().dim(); }
    const Instance& entry(std::size_t i) const { return entries_.at(i); }
    const std::deque<Instance>& entries() const { return entries_; }

    std::size_t size_bytes() const;

private:
    std::size_t capacity_;
    std::deque<Instance> entries_;
};

/// Ascending-distance permutation of the buffer: order[j] is the buffer
/// position of the j-th most similar entry, distances[j] its distance.
struct Ranking {
    std::vector<std::size_t> order;
    std::vector<double> distances;
};

struct SisConfig {
    std::size_t capacity_n = 200;
    std::size_t trial_k = 1;
    std::size_t radius_r = 10;
    double error_threshold_eps = 0.1;
    std::size_t prev_best_b = 0;  // 0 = not yet initialized, see initial_best_b
};

/// First search center when no previous best exists: min(N, max(1, r)).
inline std::size_t initial_best_b(const SisConfig& cfg) {
    return std::min(cfg.capacity_n, std::max<std::size_t>(1, cfg.radius_r));
}

void validate(const SisConfig& cfg);

/// Sorts the buffer by spatio-temporal distance to the target, most
/// similar first. Ties are broken toward the more recent entry. When
/// `comparison_count` is given it receives the number of order
/// comparisons spent, which is exactly n(n-1)/2.
Ranking reorder(const RecentBuffer& buf, const Instance& target,
                const DistanceParams& params, std::uint64_t* comparison_count = nullptr);

/// Objective the ranking minimizes: sum of consecutive absolute distance
/// gaps. For an ascending ordering this telescopes to max - min.
double ranking_objective(std::span<const double> distances_in_rank_order);

/// Warm-restarted window search. Trains the (freshly reset) learner on
/// buffer entries in ranking order, evaluating after each addition inside
/// the window [b-r, b+r] against the k most recent entries in time order;
/// stops at the first window size whose trial error beats eps. Returns
/// the new best window size (unchanged if the search exhausts).
std::size_t optimal_window_train(Classifier& learner, const RecentBuffer& buf,
                                 const Ranking& ranking, const SisConfig& cfg);

/// Per-instance training procedure: reconcile dimensions, reorder by
/// similarity, reset the learner, retrain over the optimal window, then
/// buffer the target.
class SisEngine {
public:
    explicit SisEngine(SisConfig cfg);

    /// Runs one training step for the instance just tested. `target` must
    /// be scaled and labeled.
    void train_step(Classifier& learner, const Instance& target);

    /// Declares the surviving feature positions ahead of a dimension
    /// shrink; the next train_step resizes the buffer with this set
    /// instead of prefix truncation.
    void set_pending_feature_keep(std::vector<std::size_t> keep);

    const RecentBuffer& buffer() const { return buffer_; }
    const SisConfig& config() const { return cfg_; }
    std::size_t prev_best_b() const { return cfg_.prev_best_b; }
    std::uint64_t comparisons() const { return comparisons_; }

    std::size_t size_bytes() const { return 64 + buffer_.size_bytes(); }

private:
    SisConfig cfg_;
    RecentBuffer buffer_;
    std::optional<std::vector<std::size_t>> pending_keep_;
    std::uint64_t comparisons_ = 0;
};

}  // namespace sistream
