#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "sistream/stream.hpp"

namespace sistream {

/// Incremental per-feature standardizer. Keeps a running mean and sum of
/// squared deviations (Welford) per feature; variance is the population
/// variance (divide by n).
class RunningScaler {
public:
    RunningScaler() = default;

    bool empty() const { return count_ == 0; }
    std::size_t count() const { return count_; }
    std::size_t dimension() const { return mean_.size(); }

    void update(std::span<const double> x) {
        if (count_ == 0 && mean_.empty()) {
            mean_.assign(x.size(), 0.0);
            m2_.assign(x.size(), 0.0);
        }
        if (x.size() != mean_.size())
            throw std::invalid_argument("RunningScaler: dimension mismatch, scaler has " +
                                        std::to_string(mean_.size()) + " features, got " +
                                        std::to_string(x.size()));
        ++count_;
        for (std::size_t j = 0; j < x.size(); ++j) {
            const double delta = x[j] - mean_[j];
            mean_[j] += delta / static_cast<double>(count_);
            m2_[j] += delta * (x[j] - mean_[j]);
        }
    }

    void update(const Instance& x) { update(std::span<const double>(x.features)); }

    double mean(std::size_t j) const { return mean_.at(j); }

    double variance(std::size_t j) const {
        if (count_ == 0) throw std::logic_error("RunningScaler: no samples yet");
        return m2_.at(j) / static_cast<double>(count_);
    }

    double stddev(std::size_t j) const { return std::sqrt(variance(j)); }

    /// (x_j - mean_j) / std_j per feature; a zero-variance feature maps to 0.
    std::vector<double> transform(std::span<const double> x) const {
        if (count_ == 0) throw std::logic_error("RunningScaler: transform before any update");
        if (x.size() != mean_.size())
            throw std::invalid_argument("RunningScaler: dimension mismatch in transform");
        std::vector<double> out(x.size());
        for (std::size_t j = 0; j < x.size(); ++j) {
            const double sd = stddev(j);
            out[j] = sd > 0.0 ? (x[j] - mean_[j]) / sd : 0.0;
        }
        return out;
    }

    Instance transform(const Instance& x) const {
        Instance out = x;
        out.features = transform(std::span<const double>(x.features));
        return out;
    }

    /// Restricts the statistics to the surviving feature positions.
    /// Used when the stream's dimension shrinks: history for surviving
    /// features is kept, everything else is discarded.
    void restrict_to(std::span<const std::size_t> keep) {
        std::vector<double> mean(keep.size()), m2(keep.size());
        for (std::size_t j = 0; j < keep.size(); ++j) {
            if (keep[j] >= mean_.size())
                throw std::invalid_argument("RunningScaler: restrict index out of range");
            mean[j] = mean_[keep[j]];
            m2[j] = m2_[keep[j]];
        }
        mean_ = std::move(mean);
        m2_ = std::move(m2);
    }

private:
    std::size_t count_ = 0;
    std::vector<double> mean_;
    std::vector<double> m2_;
};

}  // namespace sistream
