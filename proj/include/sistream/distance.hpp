#pragma once

#include <cmath>
#include <span>
#include <stdexcept>

#include "sistream/stream.hpp"

namespace sistream {

struct DistanceParams {
    std::size_t horizon_n = 200;  // buffer capacity N, normalizes the time term
};

/// Linear time distance |t - i| / N.
inline double time_distance(std::size_t t, std::size_t i, const DistanceParams& params) {
    if (params.horizon_n == 0) throw std::invalid_argument("time_distance: N must be >= 1");
    const double lag = t >= i ? static_cast<double>(t - i) : static_cast<double>(i - t);
    return lag / static_cast<double>(params.horizon_n);
}

/// Euclidean distance between two scaled feature vectors.
inline double spatial_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw std::invalid_argument("spatial_distance: length mismatch");
    double sum = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double d = a[j] - b[j];
        sum += d * d;
    }
    return std::sqrt(sum);
}

/// Unweighted sum of the time and spatial terms.
inline double spatio_temporal_distance(const Instance& target, const Instance& past,
                                       const DistanceParams& params) {
    return time_distance(target.time_index, past.time_index, params) +
           spatial_distance(std::span<const double>(target.features),
                            std::span<const double>(past.features));
}

}  // namespace sistream
