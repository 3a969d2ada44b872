#include "medbin/core_select.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <utility>

namespace medbin {
namespace {

struct NoTally {
    void compare(std::uint64_t = 1) {}
    void partition() {}
};

struct CountingTally {
    SelectCounters& c;
    void compare(std::uint64_t n = 1) { c.comparisons += n; }
    void partition() { ++c.partitions; }
};

// Dijkstra's three-way partition: [0, lt) < p, [lt, gt) == p, [gt, n) > p.
template <class Tally>
PartitionCounts partition3_impl(std::span<double> a, double pivot, Tally& tally) {
    std::size_t lt = 0;
    std::size_t i = 0;
    std::size_t gt = a.size();
    while (i < gt) {
        const double x = a[i];
        tally.compare();
        if (x < pivot) {
            std::swap(a[lt++], a[i++]);
            continue;
        }
        tally.compare();
        if (pivot < x) {
            std::swap(a[i], a[--gt]);
        } else {
            ++i;
        }
    }
    tally.partition();
    return {lt, gt - lt, a.size() - gt};
}

double median3(double a, double b, double c) {
    if (b < a) std::swap(a, b);
    if (c < b) std::swap(b, c);
    if (b < a) std::swap(a, b);
    return b;
}

template <class Tally>
double select_impl(std::span<double> a, std::size_t k, Tally& tally) {
    if (k < 1 || k > a.size()) {
        throw ContractViolation("select_kth: rank " + std::to_string(k) + " outside [1, " +
                                std::to_string(a.size()) + "]");
    }
    const std::size_t target = k - 1;
    std::size_t lo = 0;
    std::size_t hi = a.size();
    for (;;) {
        const std::size_t len = hi - lo;
        if (len == 1) return a[lo];
        auto active = a.subspan(lo, len);
        tally.compare(3);
        const double pivot = median_of_three_pivot(active);
        const auto parts = partition3_impl(active, pivot, tally);
        if (target < lo + parts.less) {
            hi = lo + parts.less;
        } else if (target < lo + parts.less + parts.equal) {
            return pivot;
        } else {
            lo += parts.less + parts.equal;
        }
    }
}

void insertion_sort(std::span<double> a) {
    for (std::size_t i = 1; i < a.size(); ++i) {
        const double x = a[i];
        std::size_t j = i;
        for (; j > 0 && x < a[j - 1]; --j) a[j] = a[j - 1];
        a[j] = x;
    }
}

double pick(std::span<const double> sorted, MedianTarget target) {
    const double lo = sorted[target.lo() - 1];
    return target.is_pair() ? pair_mean(lo, sorted[target.hi() - 1]) : lo;
}

} // namespace

double pair_mean(double lower, double upper) { return std::midpoint(lower, upper); }

double median_of_three_pivot(std::span<const double> range) {
    if (range.empty()) throw ContractViolation("pivot of an empty range");
    return median3(range.front(), range[range.size() / 2], range.back());
}

PartitionCounts partition3(std::span<double> buf, double pivot) {
    NoTally tally;
    return partition3_impl(buf, pivot, tally);
}

double select_kth(std::span<double> buf, std::size_t k) {
    NoTally tally;
    return select_impl(buf, k, tally);
}

double select_kth(std::span<double> buf, std::size_t k, SelectCounters& counters) {
    CountingTally tally{counters};
    return select_impl(buf, k, tally);
}

double median_select(std::span<double> buf) {
    const auto target = MedianTarget::for_size(buf.size());
    const double lo = select_kth(buf, target.lo());
    if (!target.is_pair()) return lo;
    // Everything right of the selected position is >= lo.
    const double hi = *std::min_element(buf.begin() + static_cast<std::ptrdiff_t>(target.lo()), buf.end());
    return pair_mean(lo, hi);
}

double insertion_sort_median(std::span<double> buf, MedianTarget target) {
    if (buf.empty()) throw ContractViolation("insertion_sort_median of an empty buffer");
    target.check(buf.size());
    insertion_sort(buf);
    return pick(buf, target);
}

double sort_median(std::span<double> buf) {
    const auto target = MedianTarget::for_size(buf.size());
    std::sort(buf.begin(), buf.end());
    return pick(buf, target);
}

} // namespace medbin
