#include "medbin/bin_engine.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "detail/successive_binning.hpp"
#include "medbin/core_select.hpp"

namespace medbin {

BinRange initial_range(const Moments& m) {
    const double mu = m.mean();
    const double sigma = m.sigma();
    if (sigma > 0.0) {
        const BinRange r{mu - sigma, mu + sigma};
        if (r.valid() && std::isfinite(r.lo) && std::isfinite(r.hi)) return r;
    }
    return {m.min, m.max};
}

BinMapper::BinMapper(BinRange range, std::size_t bins)
    : range_(range), bins_(static_cast<std::ptrdiff_t>(bins)) {
    if (bins < 2) throw ConfigError("bin count must be at least 2");
    if (!range.valid()) throw ContractViolation("bin range needs lo < hi");
    const double b = static_cast<double>(bins);
    // 1 for ordinary ranges; 1/2 when hi - lo overflows; 2^500 when
    // B / (hi - lo) overflows (subnormal-scale ranges).
    for (const double pre : {1.0, 0.5, std::ldexp(1.0, 500)}) {
        const double width = range.hi * pre - range.lo * pre;
        if (width > 0.0 && std::isfinite(width) && std::isfinite(b / width)) {
            pre_ = pre;
            lo_scaled_ = range.lo * pre;
            scale_ = b / width;
            step_ = width / b;
            return;
        }
    }
    throw ContractViolation("bin range cannot be subdivided");
}

BinSlot BinMapper::operator()(double x) const {
    const auto s = slot(x);
    if (s < 0) return {BinSide::Left, 0};
    if (s >= bins_) return {BinSide::Right, 0};
    return {BinSide::In, static_cast<std::size_t>(s)};
}

double BinMapper::edge(std::size_t i) const {
    if (i == 0) return range_.lo;
    if (i >= static_cast<std::size_t>(bins_)) return range_.hi;
    return (lo_scaled_ + static_cast<double>(i) * step_) / pre_;
}

double BinMapper::midpoint(std::size_t i) const {
    return (lo_scaled_ + (static_cast<double>(i) + 0.5) * step_) / pre_;
}

BinSlot bin_index(double x, const BinRange& range, std::size_t bins) {
    return BinMapper(range, bins)(x);
}

std::uint64_t BinSketch::n_in() const {
    return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

BinSketch build_sketch(std::span<const double> data, const BinRange& range, std::size_t bins) {
    return detail::LocalSurvivors::build(data, BinMapper(range, bins));
}

std::optional<BinSketch> build_sketch(std::span<const double> data, double mu, double sigma,
                                      std::size_t bins) {
    if (!(sigma > 0.0)) return std::nullopt;
    return build_sketch(data, BinRange{mu - sigma, mu + sigma}, bins);
}

MedianBin find_median_bin(const BinSketch& sketch, std::uint64_t k) {
    if (k <= sketch.n_left) return {MedianBin::Where::OutsideLeft, 0, 0};
    std::uint64_t below = sketch.n_left;
    for (std::size_t b = 0; b < sketch.counts.size(); ++b) {
        const std::uint64_t upto = below + sketch.counts[b];
        if (upto >= k) return {MedianBin::Where::InBin, b, k - below};
        below = upto;
    }
    return {MedianBin::Where::OutsideRight, 0, 0};
}

void BinParams::validate() const {
    if (bins < 2) throw ConfigError("bin count B must be at least 2, got " + std::to_string(bins));
    if (cutoff < 1) throw ConfigError("cutoff C must be at least 1");
}

namespace {

double binmedian_impl(std::span<const double> data, const Moments* given, const BinParams& params,
                      BinmedianStats* out) {
    params.validate();
    if (data.empty()) throw ContractViolation("binmedian of an empty buffer");
    BinmedianStats local;
    BinmedianStats& stats = out ? *out : local;
    stats = {};

    const auto target = MedianTarget::for_size(data.size());
    if (data.size() <= params.cutoff) {
        std::vector<double> copy(data.begin(), data.end());
        ++stats.input_passes;
        return insertion_sort_median(copy, target);
    }

    Moments m;
    if (given) {
        m = *given;
    } else {
        m = compute_moments(data);
        ++stats.input_passes;
    }
    if (m.constant()) return m.min;

    detail::LocalSurvivors src(data, &stats, m);
    return detail::successive_binning(src, initial_range(m), std::nullopt, target, params, stats);
}

std::optional<double> midpoint_of(const BinMapper& map, const BinSketch& sketch, MedianTarget target) {
    const MedianBin lo = find_median_bin(sketch, target.lo());
    if (!lo.in_bin()) return std::nullopt;
    if (!target.is_pair()) return map.midpoint(lo.bin);
    const MedianBin hi = find_median_bin(sketch, target.hi());
    if (!hi.in_bin()) return std::nullopt;
    return pair_mean(map.midpoint(lo.bin), map.midpoint(hi.bin));
}

double binapprox_impl(std::span<const double> data, const Moments& m, std::size_t bins) {
    if (data.empty()) throw ContractViolation("binapprox of an empty buffer");
    if (bins < 2) throw ConfigError("bin count B must be at least 2");
    if (m.constant()) return m.mean();
    const auto target = MedianTarget::for_size(data.size());

    BinRange range = initial_range(m);
    BinSketch sketch = build_sketch(data, range, bins);
    if (auto v = approx_from_sketch(sketch, target)) return *v;
    // Only reachable when rounding moved the median just outside [mu-sigma, mu+sigma].
    range = {m.min, m.max};
    sketch = build_sketch(data, range, bins);
    return *approx_from_sketch(sketch, target);
}

} // namespace

double binmedian(std::span<const double> data, BinParams params, BinmedianStats* stats) {
    return binmedian_impl(data, nullptr, params, stats);
}

double binmedian(std::span<const double> data, const Moments& moments, BinParams params,
                 BinmedianStats* stats) {
    return binmedian_impl(data, &moments, params, stats);
}

double binapprox(std::span<const double> data, std::size_t bins) {
    return binapprox_impl(data, compute_moments(data), bins);
}

double binapprox(std::span<const double> data, const Moments& moments, std::size_t bins) {
    return binapprox_impl(data, moments, bins);
}

std::optional<double> approx_from_sketch(const BinSketch& sketch, MedianTarget target) {
    return midpoint_of(BinMapper(sketch.range, sketch.bins()), sketch, target);
}

} // namespace medbin
