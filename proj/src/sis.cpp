#include "sistream/sis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sistream {

RecentBuffer::RecentBuffer(std::size_t capacity_n) : capacity_(capacity_n) {
    if (capacity_ == 0) throw std::invalid_argument("RecentBuffer: capacity must be >= 1");
}

void RecentBuffer::push(Instance x) {
    if (!x.labeled())
        throw std::invalid_argument("RecentBuffer: unlabeled instance (SIS trains supervised)");
    if (!entries_.empty() && x.time_index <= entries_.back().time_index)
        throw std::invalid_argument("RecentBuffer: time_index must strictly increase");
    entries_.push_back(std::move(x));
    if (entries_.size() > capacity_) entries_.pop_front();
}

void RecentBuffer::resize_features(std::size_t target_dim) {
    if (target_dim == 0) throw std::invalid_argument("RecentBuffer: target dimension must be >= 1");
    for (auto& inst : entries_) {
        if (inst.dim() < target_dim)
            throw std::invalid_argument(
                "RecentBuffer: entry has fewer features than the target dimension "
                "(feature re-appearance unsupported)");
        if (inst.dim() > target_dim) inst.features.resize(target_dim);
    }
}

void RecentBuffer::resize_features(std::span<const std::size_t> keep) {
    if (keep.empty()) throw std::invalid_argument("RecentBuffer: empty keep set");
    for (auto& inst : entries_) {
        if (inst.dim() < keep.size())
            throw std::invalid_argument(
                "RecentBuffer: entry has fewer features than the keep set "
                "(feature re-appearance unsupported)");
        std::vector<double> kept;
        kept.reserve(keep.size());
        for (std::size_t j : keep) {
            if (j >= inst.dim())
                throw std::invalid_argument("RecentBuffer: keep index out of range");
            kept.push_back(inst.features[j]);
        }
        inst.features = std::move(kept);
    }
}

std::size_t RecentBuffer::size_bytes() const {
    std::size_t bytes = 64;
    for (const auto& inst : entries_) bytes += 48 + inst.features.size() * 8;
    return bytes;
}

Ranking reorder(const RecentBuffer& buf, const Instance& target,
                const DistanceParams& params, std::uint64_t* comparison_count) {
    if (buf.empty()) throw std::logic_error("reorder: empty buffer");
    const std::size_t n = buf.size();

    std::vector<double> dist(n);
    for (std::size_t i = 0; i < n; ++i)
        dist[i] = spatio_temporal_distance(target, buf.entry(i), params);

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;

    // Selection sort, n(n-1)/2 comparisons. Equal distances rank the more
    // recent entry first; buffer position order is time order, so the
    // comparator can use positions directly.
    std::uint64_t comparisons = 0;
    auto ahead = [&](std::size_t a, std::size_t b) {
        ++comparisons;
        if (dist[a] != dist[b]) return dist[a] < dist[b];
        return a > b;
    };
    for (std::size_t i = 0; i + 1 < n; ++i) {
        std::size_t best = i;
        for (std::size_t j = i + 1; j < n; ++j)
            if (ahead(order[j], order[best])) best = j;
        std::swap(order[i], order[best]);
    }
    if (comparison_count) *comparison_count += comparisons;

    Ranking ranking;
    ranking.order = std::move(order);
    ranking.distances.resize(n);
    for (std::size_t j = 0; j < n; ++j) ranking.distances[j] = dist[ranking.order[j]];
    return ranking;
}

double ranking_objective(std::span<const double> distances_in_rank_order) {
    double objective = 0.0;
    for (std::size_t i = 1; i < distances_in_rank_order.size(); ++i)
        objective += std::abs(distances_in_rank_order[i] - distances_in_rank_order[i - 1]);
    return objective;
}

void validate(const SisConfig& cfg) {
    if (cfg.capacity_n == 0) throw std::invalid_argument("sis: N must be >= 1");
    if (cfg.trial_k == 0 || cfg.trial_k > cfg.capacity_n)
        throw std::invalid_argument("sis: k must be in [1, N]");
    if (cfg.radius_r == 0) throw std::invalid_argument("sis: r must be >= 1");
    if (cfg.error_threshold_eps < 0.0 || cfg.error_threshold_eps > 1.0)
        throw std::invalid_argument("sis: eps must be in [0, 1]");
    if (cfg.prev_best_b > cfg.capacity_n)
        throw std::invalid_argument("sis: b must be in [1, N]");
}

std::size_t optimal_window_train(Classifier& learner, const RecentBuffer& buf,
                                 const Ranking& ranking, const SisConfig& cfg) {
    const std::size_t b = cfg.prev_best_b == 0 ? initial_best_b(cfg) : cfg.prev_best_b;
    if (buf.empty()) return b;
    const std::size_t n = buf.size();

    const std::size_t lower = b > cfg.radius_r ? b - cfg.radius_r : 1;
    const std::size_t upper = std::min(n, b + cfg.radius_r);

    // Trial set: the k most recent entries in time order, newest last in
    // the buffer.
    const std::size_t k = std::min(cfg.trial_k, n);

    for (std::size_t i = 1; i <= n; ++i) {
        if (i > upper) break;
        learner.learn_one(buf.entry(ranking.order[i - 1]));
        if (i < lower) continue;
        std::size_t wrong = 0;
        for (std::size_t j = 0; j < k; ++j) {
            const Instance& trial = buf.entry(n - 1 - j);
            if (learner.predict_one(trial) != *trial.label) ++wrong;
        }
        const double learner_error = static_cast<double>(wrong) / static_cast<double>(k);
        if (learner_error < cfg.error_threshold_eps) return i;
    }
    return b;
}

SisEngine::SisEngine(SisConfig cfg) : cfg_(cfg), buffer_(cfg.capacity_n) {
    validate(cfg_);
    if (cfg_.prev_best_b == 0) cfg_.prev_best_b = initial_best_b(cfg_);
}

void SisEngine::set_pending_feature_keep(std::vector<std::size_t> keep) {
    pending_keep_ = std::move(keep);
}

void SisEngine::train_step(Classifier& learner, const Instance& target) {
    if (!target.labeled()) throw std::invalid_argument("sis: unlabeled target");

    if (pending_keep_.has_value()) {
        if (!buffer_.empty())
            buffer_.resize_features(std::span<const std::size_t>(*pending_keep_));
        pending_keep_.reset();
    } else if (!buffer_.empty() && buffer_.dim() != target.dim()) {
        buffer_.resize_features(target.dim());
    }

    if (buffer_.empty()) {
        learner.reset();
        buffer_.push(target);
        return;
    }

    const Ranking ranking =
        reorder(buffer_, target, DistanceParams{cfg_.capacity_n}, &comparisons_);
    learner.reset();
    cfg_.prev_best_b = optimal_window_train(learner, buffer_, ranking, cfg_);
    buffer_.push(target);
}

}  // namespace sistream
