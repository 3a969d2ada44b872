#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "medbin/moments.hpp"
#include "medbin/types.hpp"

namespace medbin {

/// Closed search interval [lo, hi] that gets split into equal-width bins.
struct BinRange {
    double lo = 0.0;
    double hi = 0.0;

    bool valid() const { return lo < hi; }

    friend bool operator==(const BinRange&, const BinRange&) = default;
};

/// [mu - sigma, mu + sigma] when that is a usable interval, otherwise
/// [min, max] (sigma lost to cancellation or rounding).
BinRange initial_range(const Moments& m);

enum class BinSide { Left, In, Right };

struct BinSlot {
    BinSide side = BinSide::In;
    std::size_t index = 0; // meaningful for In only

    friend bool operator==(const BinSlot&, const BinSlot&) = default;
};

/// Maps values onto B equal bins of a range. Bin i covers
/// [lo + i*w, lo + (i+1)*w) with w = (hi - lo)/B; x == hi lands in bin B-1.
///
/// The mapping is monotone in x, which is all the rank bookkeeping needs.
/// Ranges whose width overflows or whose B/width overflows are rescaled by a
/// power of two before the division; that scaling is exact for normal values.
class BinMapper {
public:
    BinMapper(BinRange range, std::size_t bins);

    /// -1 for Left, B for Right, otherwise the bin index.
    std::ptrdiff_t slot(double x) const {
        if (x < range_.lo) return -1;
        if (x > range_.hi) return bins_;
        const double t = (x * pre_ - lo_scaled_) * scale_;
        const auto i = static_cast<std::ptrdiff_t>(t);
        return i < bins_ ? i : bins_ - 1;
    }

    BinSlot operator()(double x) const;

    const BinRange& range() const { return range_; }
    std::size_t bins() const { return static_cast<std::size_t>(bins_); }

    /// Left edge of bin i; edge(B) == hi.
    double edge(std::size_t i) const;
    double midpoint(std::size_t i) const;
    BinRange bin_range(std::size_t i) const { return {edge(i), edge(i + 1)}; }

private:
    BinRange range_;
    std::ptrdiff_t bins_;
    double pre_ = 1.0;
    double lo_scaled_ = 0.0;
    double scale_ = 0.0;
    double step_ = 0.0; // bin width, in scaled units
};

BinSlot bin_index(double x, const BinRange& range, std::size_t bins);

/// Per-bin counts over a range plus the counts falling outside it.
struct BinSketch {
    BinRange range;
    std::vector<std::uint64_t> counts;
    std::uint64_t n_left = 0;
    std::uint64_t n_right = 0;

    BinSketch() = default;
    BinSketch(BinRange r, std::size_t bins) : range(r), counts(bins, 0) {}

    std::size_t bins() const { return counts.size(); }
    std::uint64_t n_in() const;
    std::uint64_t n_total() const { return n_left + n_in() + n_right; }

    friend bool operator==(const BinSketch&, const BinSketch&) = default;
};

BinSketch build_sketch(std::span<const double> data, const BinRange& range, std::size_t bins);

/// Sketch over [mu - sigma, mu + sigma]; nullopt when sigma <= 0 (degenerate
/// data, the caller answers with mu).
std::optional<BinSketch> build_sketch(std::span<const double> data, double mu, double sigma,
                                      std::size_t bins);

struct MedianBin {
    enum class Where { InBin, OutsideLeft, OutsideRight };
    Where where = Where::InBin;
    std::size_t bin = 0;
    std::uint64_t rank_within = 0; // 1-based rank inside the bin

    bool in_bin() const { return where == Where::InBin; }
    friend bool operator==(const MedianBin&, const MedianBin&) = default;
};

/// Locates the bin holding the k-th smallest counted point (k is 1-based and
/// counts n_left first).
MedianBin find_median_bin(const BinSketch& sketch, std::uint64_t k);

/// Bin count B and insertion-sort cutoff C.
struct BinParams {
    std::size_t bins = 1000;
    std::size_t cutoff = 20;

    void validate() const;
};

struct BinmedianStats {
    std::size_t iterations = 0;    // binning rounds, including a cached first level
    std::size_t input_passes = 0;  // full passes over the caller's data
    std::vector<std::uint64_t> survivors; // survivor count entering each round
    std::size_t extent_fallbacks = 0;     // rounds re-binned across [min, max]
};

/// Exact median by successive binning. Does not modify data.
double binmedian(std::span<const double> data, BinParams params = {},
                 BinmedianStats* stats = nullptr);

/// Same, with the first-level moments supplied by the caller.
double binmedian(std::span<const double> data, const Moments& moments, BinParams params = {},
                 BinmedianStats* stats = nullptr);

/// Midpoint of the median's bin; within sigma/B of the true median.
double binapprox(std::span<const double> data, std::size_t bins = 1000);
double binapprox(std::span<const double> data, const Moments& moments, std::size_t bins = 1000);

/// binapprox's answer read off an existing sketch, or nullopt when a target
/// rank falls outside the sketch's bins. Pair targets average the two bin
/// midpoints.
std::optional<double> approx_from_sketch(const BinSketch& sketch, MedianTarget target);

} // namespace medbin
