#include "sistream/drift.hpp"

#include <cmath>
#include <stdexcept>

namespace sistream {

Adwin::Adwin(const Options& opts) : opts_(opts) {
    if (opts_.delta <= 0.0 || opts_.delta >= 1.0)
        throw std::invalid_argument("Adwin: delta must be in (0, 1)");
    if (opts_.max_buckets_per_row < 1)
        throw std::invalid_argument("Adwin: need at least one bucket per row");
    rows_.emplace_back();
}

void Adwin::clear() {
    rows_.clear();
    rows_.emplace_back();
    width_ = 0;
    total_ = 0.0;
    var_sum_ = 0.0;
    tick_ = 0;
}

std::size_t Adwin::bucket_count() const {
    std::size_t n = 0;
    for (const auto& row : rows_) n += row.size();
    return n;
}

void Adwin::insert_bucket(double value) {
    rows_[0].push_front(Bucket{value, 0.0});
    if (width_ > 0) {
        // Welford step for the window-level sum of squared deviations.
        const double old_mean = total_ / static_cast<double>(width_);
        const double new_mean = (total_ + value) / static_cast<double>(width_ + 1);
        var_sum_ += (value - old_mean) * (value - new_mean);
    }
    total_ += value;
    ++width_;
}

void Adwin::compress() {
    for (std::size_t r = 0; r < rows_.size(); ++r) {
        if (rows_[r].size() <= static_cast<std::size_t>(opts_.max_buckets_per_row)) break;
        if (r + 1 == rows_.size()) rows_.emplace_back();

        // Merge the two oldest buckets of this row into one of twice the
        // capacity. Window totals are untouched; the merged var_sum gains
        // the between-bucket term (parallel-axis combination).
        const double n = static_cast<double>(std::size_t{1} << r);
        Bucket b = rows_[r].back();
        rows_[r].pop_back();
        Bucket a = rows_[r].back();
        rows_[r].pop_back();
        const double mean_a = a.total / n;
        const double mean_b = b.total / n;
        Bucket merged;
        merged.total = a.total + b.total;
        merged.var_sum = a.var_sum + b.var_sum + (n / 2.0) * (mean_a - mean_b) * (mean_a - mean_b);
        rows_[r + 1].push_front(merged);
    }
}

void Adwin::drop_oldest_bucket() {
    std::size_t r = rows_.size();
    while (r > 0 && rows_[r - 1].empty()) --r;
    if (r == 0) return;
    --r;

    const Bucket b = rows_[r].back();
    rows_[r].pop_back();
    const std::size_t n1 = std::size_t{1} << r;

    width_ -= n1;
    total_ -= b.total;
    if (width_ > 0) {
        const double mean1 = b.total / static_cast<double>(n1);
        const double mean_rest = total_ / static_cast<double>(width_);
        const double between = static_cast<double>(n1) * static_cast<double>(width_) /
                               static_cast<double>(n1 + width_) *
                               (mean1 - mean_rest) * (mean1 - mean_rest);
        var_sum_ -= b.var_sum + between;
        if (var_sum_ < 0.0) var_sum_ = 0.0;  // guard against rounding
    } else {
        var_sum_ = 0.0;
    }
    while (rows_.size() > 1 && rows_.back().empty()) rows_.pop_back();
}

bool Adwin::cut_found(std::size_t n0, std::size_t n1, double sum0, double sum1) const {
    if (n0 < opts_.min_sub_window || n1 < opts_.min_sub_window) return false;
    const double n = static_cast<double>(width_);
    const double dd = std::log(2.0 * std::log(n) / opts_.delta);
    const double v = var_sum_ / n;
    const double m = 1.0 / static_cast<double>(n0 - opts_.min_sub_window + 1) +
                     1.0 / static_cast<double>(n1 - opts_.min_sub_window + 1);
    const double eps = std::sqrt(2.0 * m * v * dd) + (2.0 / 3.0) * dd * m;
    const double u0 = sum0 / static_cast<double>(n0);
    const double u1 = sum1 / static_cast<double>(n1);
    return std::abs(u0 - u1) > eps;
}

bool Adwin::detect_and_shrink() {
    bool changed = false;
    bool shrunk = true;
    while (shrunk && width_ > opts_.min_window) {
        shrunk = false;
        bool done = false;
        std::size_t n0 = 0;
        double sum0 = 0.0;
        // Scan split points oldest to newest: rows from the back, buckets
        // from each row's tail.
        for (std::size_t r = rows_.size(); r-- > 0 && !shrunk && !done;) {
            const std::size_t cap = std::size_t{1} << r;
            for (auto it = rows_[r].rbegin(); it != rows_[r].rend(); ++it) {
                n0 += cap;
                sum0 += it->total;
                if (n0 >= width_) {
                    done = true;
                    break;
                }
                if (cut_found(n0, width_ - n0, sum0, total_ - sum0)) {
                    drop_oldest_bucket();
                    changed = true;
                    shrunk = true;
                    break;
                }
            }
        }
    }
    return changed;
}

bool Adwin::update(double value) {
    if (value < 0.0 || value > 1.0)
        throw std::invalid_argument("Adwin: value outside [0, 1]");
    insert_bucket(value);
    compress();
    ++tick_;
    if (tick_ % static_cast<std::uint64_t>(opts_.check_every) != 0) return false;
    if (width_ <= opts_.min_window) return false;
    return detect_and_shrink();
}

void Ddm::reset() {
    n_ = 0;
    errors_ = 0;
    p_min_ = 0.0;
    s_min_ = 0.0;
    minima_set_ = false;
    level_ = DdmLevel::in_control;
}

double Ddm::stddev() const {
    if (n_ == 0) return 0.0;
    const double p = error_rate();
    return std::sqrt(p * (1.0 - p) / static_cast<double>(n_));
}

DdmLevel Ddm::update(bool correct) {
    ++n_;
    if (!correct) ++errors_;
    if (n_ < opts_.min_instances) {
        level_ = DdmLevel::in_control;
        return level_;
    }

    const double p = error_rate();
    const double s = stddev();
    if (!minima_set_ || p + s <= p_min_ + s_min_) {
        p_min_ = p;
        s_min_ = s;
        minima_set_ = true;
    }

    // Strict comparisons: with a clean error history p, s and both minima
    // are all zero, and the thresholds must not fire.
    if (p + s > p_min_ + opts_.drift_sigma * s_min_) {
        reset();
        level_ = DdmLevel::drift;
    } else if (p + s > p_min_ + opts_.warning_sigma * s_min_) {
        level_ = DdmLevel::warning;
    } else {
        level_ = DdmLevel::in_control;
    }
    return level_;
}

void DdmClassifier::learn_one(const Instance& x) {
    if (!x.labeled()) throw std::invalid_argument("DdmClassifier: unlabeled instance");

    const bool correct = inner_->predict_one(x) == *x.label;
    const DdmLevel level = ddm_.update(correct);

    switch (level) {
        case DdmLevel::warning:
            warning_buffer_.push_back(x);
            if (warning_buffer_.size() > kWarningBufferCap) warning_buffer_.pop_front();
            break;
        case DdmLevel::drift:
            inner_->reset();
            for (const auto& buffered : warning_buffer_) inner_->learn_one(buffered);
            warning_buffer_.clear();
            break;
        case DdmLevel::in_control:
            warning_buffer_.clear();
            break;
    }
    inner_->learn_one(x);
}

void DdmClassifier::reset() {
    inner_->reset();
    ddm_.reset();
    warning_buffer_.clear();
}

std::size_t DdmClassifier::size_bytes() const {
    std::size_t buffered = 0;
    for (const auto& inst : warning_buffer_) buffered += 48 + inst.features.size() * 8;
    return inner_->size_bytes() + 64 + buffered;
}

}  // namespace sistream
