#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "medbin/types.hpp"

namespace medbin {

struct PartitionCounts {
    std::size_t less = 0;
    std::size_t equal = 0;
    std::size_t greater = 0;

    friend bool operator==(const PartitionCounts&, const PartitionCounts&) = default;
};

// Work tally for the quickselect loop.
struct SelectCounters {
    std::uint64_t comparisons = 0;
    std::uint64_t partitions = 0;
};

/// k-th smallest element (1-based) by iterative quickselect with a
/// median-of-three pivot and a three-way partition. Reorders buf.
double select_kth(std::span<double> buf, std::size_t k);
double select_kth(std::span<double> buf, std::size_t k, SelectCounters& counters);

/// Median by quickselect. For even n the upper middle element is the minimum
/// of the region right of the lower one after selection. Reorders buf.
double median_select(std::span<double> buf);

/// Rearranges buf into [< pivot | == pivot | > pivot] and returns the block sizes.
PartitionCounts partition3(std::span<double> buf, double pivot);

/// Median of the bottom, middle (index size/2) and top elements.
double median_of_three_pivot(std::span<const double> range);

/// Stable insertion sort of buf, then the element(s) at the target rank(s).
/// Meant for the small survivor sets left at the end of binning.
double insertion_sort_median(std::span<double> buf, MedianTarget target);

/// Full-sort baseline.
double sort_median(std::span<double> buf);

/// Mean of the two middle elements of an even-sized data set. Every median
/// routine combines a rank pair through this so results agree bitwise.
double pair_mean(double lower, double upper);

} // namespace medbin
