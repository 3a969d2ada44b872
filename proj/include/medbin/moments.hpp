#pragma once

#include <cstdint>
#include <limits>
#include <span>

namespace medbin {

/// Single-pass summary of a data set: count, sum and sum of squares, plus the
/// extremes. Field-wise mergeable, so partitions and updates can be combined
/// without revisiting the data.
struct Moments {
    std::uint64_t count = 0;
    double sum = 0.0;
    double sum_sq = 0.0;
    double min = std::numeric_limits<double>::infinity();
    double max = -std::numeric_limits<double>::infinity();

    void add(double x) {
        ++count;
        sum += x;
        sum_sq += x * x;
        if (x < min) min = x;
        if (x > max) max = x;
    }

    bool empty() const { return count == 0; }
    bool constant() const { return count > 0 && min == max; }

    // Exact for constant data.
    double mean() const;
    // Population variance, clamped at zero.
    double variance() const;
    double sigma() const;

    friend bool operator==(const Moments&, const Moments&) = default;
};

Moments compute_moments(std::span<const double> data);

Moments merge(const Moments& a, const Moments& b);

} // namespace medbin
