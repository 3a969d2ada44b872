#include "medbin/updatable.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "detail/successive_binning.hpp"

namespace medbin {

UpdatableMedian::UpdatableMedian(std::vector<double> initial, BinParams params)
    : params_(params), data_(std::move(initial)) {
    params_.validate();
    if (data_.empty()) throw ContractViolation("UpdatableMedian needs at least one point");
    require_finite(data_, "initial data");
    rebuild();
}

void UpdatableMedian::rebuild() {
    base_ = compute_moments(data_);
    n0_ = data_.size();
    ++rebuild_count_;
    stale_ = false;
    if (base_.constant()) {
        sketch_.reset();
    } else {
        sketch_ = build_sketch(data_, initial_range(base_), params_.bins);
    }
}

void UpdatableMedian::apply(std::span<const double> points, bool increment) {
    if (!sketch_) return;
    const BinMapper map(sketch_->range, sketch_->bins());
    std::vector<std::uint64_t> delta(sketch_->bins() + 2, 0);
    for (const double x : points) ++delta[static_cast<std::size_t>(map.slot(x) + 1)];

    auto counter = [&](std::size_t i) -> std::uint64_t& {
        if (i == 0) return sketch_->n_left;
        if (i == delta.size() - 1) return sketch_->n_right;
        return sketch_->counts[i - 1];
    };
    if (!increment) {
        for (std::size_t i = 0; i < delta.size(); ++i) {
            if (counter(i) < delta[i]) throw ContractViolation("bin count would go negative");
        }
    }
    for (std::size_t i = 0; i < delta.size(); ++i) {
        if (increment) counter(i) += delta[i];
        else counter(i) -= delta[i];
    }
}

void UpdatableMedian::add(std::span<const double> points) {
    require_finite(points, "added points");
    apply(points, true);
    if (!sketch_) {
        for (const double x : points) {
            if (data_.empty() || x != base_.min) {
                stale_ = true;
                break;
            }
        }
    }
    data_.insert(data_.end(), points.begin(), points.end());
}

void UpdatableMedian::remove(std::span<const double> points) {
    if (points.empty()) return;
    // Keyed by value; +0.0 and -0.0 are the same value.
    std::unordered_map<double, std::size_t> pending;
    for (const double x : points) ++pending[x == 0.0 ? 0.0 : x];

    std::vector<char> drop(data_.size(), 0);
    std::vector<double> victims;
    victims.reserve(points.size());
    std::size_t outstanding = points.size();
    for (std::size_t i = 0; i < data_.size() && outstanding > 0; ++i) {
        const double x = data_[i];
        auto it = pending.find(x == 0.0 ? 0.0 : x);
        if (it == pending.end() || it->second == 0) continue;
        --it->second;
        --outstanding;
        drop[i] = 1;
        victims.push_back(x);
    }
    if (outstanding > 0) {
        for (const auto& [value, left] : pending) {
            if (left > 0) {
                throw ContractViolation("remove: value " + std::to_string(value) +
                                        " is not present in the data");
            }
        }
    }

    apply(victims, false);
    std::size_t w = 0;
    for (std::size_t i = 0; i < data_.size(); ++i) {
        if (!drop[i]) data_[w++] = data_[i];
    }
    data_.resize(w);
    if (!sketch_ && data_.empty()) stale_ = true;
}

bool UpdatableMedian::needs_rebuild(MedianTarget target) const {
    if (!sketch_) return stale_;
    if (!find_median_bin(*sketch_, target.lo()).in_bin()) return true;
    return target.is_pair() && !find_median_bin(*sketch_, target.hi()).in_bin();
}

double UpdatableMedian::query_exact() {
    if (data_.empty()) throw ContractViolation("median of an empty UpdatableMedian");
    last_query_passes_ = 0;
    const auto target = MedianTarget::for_size(data_.size());
    if (needs_rebuild(target)) {
        rebuild();
        last_query_passes_ += 2;
    }
    if (!sketch_) return base_.min;

    BinmedianStats stats;
    detail::LocalSurvivors src(data_, &stats);
    const double v = detail::successive_binning(src, sketch_->range, *sketch_, target, params_, stats);
    last_query_passes_ += stats.input_passes;
    return v;
}

ApproxMedian UpdatableMedian::query_approx() {
    if (data_.empty()) throw ContractViolation("median of an empty UpdatableMedian");
    last_query_passes_ = 0;
    const auto target = MedianTarget::for_size(data_.size());
    if (needs_rebuild(target)) {
        rebuild();
        last_query_passes_ += 2;
    }
    if (!sketch_) return {base_.min, 0.0};

    const double b = static_cast<double>(params_.bins);
    // sigma0 of the cached bins; half their width when they span [min, max].
    const double mu = base_.mean();
    const double sigma = base_.sigma();
    const bool sigma_bins = sketch_->range == BinRange{mu - sigma, mu + sigma};
    const double sigma0 = sigma_bins ? sigma : (sketch_->range.hi - sketch_->range.lo) / 2;
    const double growth = std::sqrt(static_cast<double>(std::max(data_.size(), n0_)) /
                                    static_cast<double>(n0_));
    if (auto v = approx_from_sketch(*sketch_, target)) return {*v, growth * sigma0 / b};

    // Rounding right after a rebuild; bin across the data's extent instead.
    const BinRange extent{base_.min, base_.max};
    const BinSketch wide = build_sketch(data_, extent, params_.bins);
    ++last_query_passes_;
    return {*approx_from_sketch(wide, target), (extent.hi - extent.lo) / 2 / b};
}

bool UpdatableMedian::consistent() const {
    if (!sketch_) return true;
    return sketch_->n_total() == data_.size();
}

} // namespace medbin
