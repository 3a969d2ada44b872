#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "medbin/bin_engine.hpp"
#include "medbin/moments.hpp"

namespace medbin {

struct ApproxMedian {
    double value = 0.0;
    double error_bound = 0.0;
};

/// Median of a data set that grows and shrinks.
///
/// Keeps every point plus the first-level bin counts built over
/// [mu0 - sigma0, mu0 + sigma0] at the last rebuild. Added and removed points
/// only adjust those counts. A query that finds the median rank outside the
/// cached bins recomputes the moments and re-bins everything (a rebuild);
/// otherwise the exact query continues from the cached counts and touches the
/// retained data once, to collect the median bin.
///
/// Constant base data has no sketch; the first differing value added makes
/// the next query rebuild.
class UpdatableMedian {
public:
    explicit UpdatableMedian(std::vector<double> initial, BinParams params = {});

    void add(std::span<const double> points);

    /// Removes one occurrence of each value. Throws ContractViolation, leaving
    /// the structure untouched, if any value is not present.
    void remove(std::span<const double> points);

    double query_exact();

    /// Bin midpoint and its error bound sqrt(max(n, n0)/n0) * sigma0 / B.
    ApproxMedian query_approx();

    std::size_t size() const { return data_.size(); }
    std::size_t n0() const { return n0_; }
    std::size_t rebuild_count() const { return rebuild_count_; }
    const Moments& base_moments() const { return base_; }
    const BinParams& params() const { return params_; }
    std::span<const double> data() const { return data_; }

    /// nullptr while in constant-data mode.
    const BinSketch* sketch() const { return sketch_ ? &*sketch_ : nullptr; }

    /// Full passes over the retained data made by the most recent query.
    std::size_t last_query_passes() const { return last_query_passes_; }

    /// Count conservation: n_left + sum(counts) + n_right == size().
    bool consistent() const;

private:
    void rebuild();
    void apply(std::span<const double> points, bool increment);
    bool needs_rebuild(MedianTarget target) const;

    BinParams params_;
    std::vector<double> data_;
    Moments base_;
    std::optional<BinSketch> sketch_;
    std::size_t n0_ = 0;
    std::size_t rebuild_count_ = 0;
    bool stale_ = false; // constant mode only: a differing value arrived
    std::size_t last_query_passes_ = 0;
};

} // namespace medbin
