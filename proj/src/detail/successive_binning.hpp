#pragma once

// Successive binning loop shared by binmedian, the updatable structure and the
// distributed coordinator. A Source owns the current survivor set and answers:
//
//   std::uint64_t size() const;
//   BinSketch count(const BinMapper&);              // one binning round
//   Moments extent();                               // min/max of survivors
//   void keep(const BinMapper&, std::size_t bin, std::uint64_t count);
//   std::vector<double> collect_all();
//   std::pair<std::vector<double>, std::vector<double>>
//       collect_bins(const BinMapper&, std::size_t b1, std::size_t b2);

#include <algorithm>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "medbin/bin_engine.hpp"
#include "medbin/core_select.hpp"

namespace medbin::detail {

struct Resolved {
    bool done = false;
    double value = 0.0;
};

// Re-bin across the survivors' extent. Returns a finished value when the
// survivors are all equal.
template <class Source>
Resolved widen_to_extent(Source& src, BinRange& range, BinmedianStats& stats) {
    const Moments e = src.extent();
    ++stats.extent_fallbacks;
    if (e.min == e.max) return {true, e.min};
    range = {e.min, e.max};
    return {};
}

template <class Source>
double successive_binning(Source& src, BinRange range, std::optional<BinSketch> first,
                          MedianTarget ranks, const BinParams& params, BinmedianStats& stats) {
    if (first) range = first->range;
    for (;;) {
        const std::uint64_t m = src.size();
        if (m <= params.cutoff) {
            auto rest = src.collect_all();
            return insertion_sort_median(rest, ranks);
        }
        if (!range.valid()) {
            if (auto r = widen_to_extent(src, range, stats); r.done) return r.value;
        }

        const BinMapper map(range, params.bins);
        BinSketch sketch = first ? std::move(*first) : src.count(map);
        first.reset();
        ++stats.iterations;
        stats.survivors.push_back(m);

        const MedianBin lo = find_median_bin(sketch, ranks.lo());
        const MedianBin hi = ranks.is_pair() ? find_median_bin(sketch, ranks.hi()) : lo;
        if (!lo.in_bin() || !hi.in_bin()) {
            // Rounding pushed a rank out of the bins.
            if (auto r = widen_to_extent(src, range, stats); r.done) return r.value;
            continue;
        }

        if (lo.bin != hi.bin) {
            auto [left, right] = src.collect_bins(map, lo.bin, hi.bin);
            const double a = select_kth(left, lo.rank_within);
            const double b = select_kth(right, hi.rank_within);
            return pair_mean(a, b);
        }

        const std::uint64_t in_bin = sketch.counts[lo.bin];
        if (in_bin == m) {
            // Every survivor in one bin: bin across min and max instead.
            if (auto r = widen_to_extent(src, range, stats); r.done) return r.value;
            continue;
        }
        src.keep(map, lo.bin, in_bin);
        ranks = ranks.rebased(lo.rank_within);
        range = map.bin_range(lo.bin);
    }
}

// Survivors held in one address space: first the caller's data (read-only),
// then a private, compacted copy.
class LocalSurvivors {
public:
    explicit LocalSurvivors(std::span<const double> data, BinmedianStats* stats = nullptr,
                            std::optional<Moments> extent = std::nullopt)
        : view_(data), stats_(stats), extent_(extent) {}

    std::uint64_t size() const { return on_view_ ? view_.size() : owned_.size(); }

    BinSketch count(const BinMapper& map) {
        touch();
        return build(current(), map);
    }

    static BinSketch build(std::span<const double> values, const BinMapper& map) {
        const std::size_t bins = map.bins();
        // Slot -1 (left) and B (right) live at the ends of one array.
        std::vector<std::uint64_t> tally(bins + 2, 0);
        for (const double x : values) ++tally[static_cast<std::size_t>(map.slot(x) + 1)];
        BinSketch s;
        s.range = map.range();
        s.n_left = tally.front();
        s.n_right = tally.back();
        s.counts.assign(tally.begin() + 1, tally.end() - 1);
        return s;
    }

    Moments extent() {
        if (extent_) return *extent_;
        touch();
        Moments e;
        for (const double x : current()) {
            e.min = std::min(e.min, x);
            e.max = std::max(e.max, x);
        }
        e.count = size();
        extent_ = e;
        return e;
    }

    void keep(const BinMapper& map, std::size_t bin, std::uint64_t count) {
        const auto b = static_cast<std::ptrdiff_t>(bin);
        const Window w = window(map, bin);
        if (on_view_) {
            touch();
            owned_.reserve(count);
            for (const double x : view_) {
                if (x >= w.lo && x <= w.hi && map.slot(x) == b) owned_.push_back(x);
            }
            on_view_ = false;
        } else {
            auto end = std::remove_if(owned_.begin(), owned_.end(), [&](double x) {
                return !(x >= w.lo && x <= w.hi && map.slot(x) == b);
            });
            owned_.erase(end, owned_.end());
        }
        extent_.reset();
    }

    std::vector<double> collect_all() {
        if (on_view_) {
            touch();
            return {view_.begin(), view_.end()};
        }
        return std::move(owned_);
    }

    std::pair<std::vector<double>, std::vector<double>> collect_bins(const BinMapper& map,
                                                                     std::size_t b1, std::size_t b2) {
        touch();
        std::pair<std::vector<double>, std::vector<double>> out;
        const auto i1 = static_cast<std::ptrdiff_t>(b1);
        const auto i2 = static_cast<std::ptrdiff_t>(b2);
        for (const double x : current()) {
            const auto s = map.slot(x);
            if (s == i1) out.first.push_back(x);
            else if (s == i2) out.second.push_back(x);
        }
        return out;
    }

private:
    struct Window {
        double lo;
        double hi;
    };

    // Cheap superset test for membership of a bin: one full bin of slack on
    // each side, far wider than any rounding in the mapping.
    static Window window(const BinMapper& map, std::size_t bin) {
        const double lo = bin == 0 ? map.range().lo : map.edge(bin - 1);
        const double hi = bin + 2 >= map.bins() ? map.range().hi : map.edge(bin + 2);
        return {lo, hi};
    }

    std::span<const double> current() const { return on_view_ ? view_ : std::span<const double>(owned_); }

    void touch() {
        if (on_view_ && stats_) ++stats_->input_passes;
    }

    std::span<const double> view_;
    std::vector<double> owned_;
    bool on_view_ = true;
    BinmedianStats* stats_;
    std::optional<Moments> extent_;
};

} // namespace medbin::detail
