#include "medbin/distributed.hpp"

#include <algorithm>
#include <vector>

#include "detail/successive_binning.hpp"

namespace medbin {

void CommLog::gather(std::size_t partitions, std::size_t words_each) {
    ++gather_rounds;
    messages += partitions;
    payload_words += partitions * words_each;
    max_message_words = std::max(max_message_words, words_each);
}

void CommLog::gather(std::span<const std::size_t> words) {
    ++gather_rounds;
    messages += words.size();
    for (const auto w : words) {
        payload_words += w;
        max_message_words = std::max(max_message_words, w);
    }
}

Moments partial_moments(Partition partition) { return compute_moments(partition); }

Moments merge_moments(const Moments& a, const Moments& b) { return merge(a, b); }

PartialCounts zero_counts(const BinRange& range, std::size_t bins) { return BinSketch(range, bins); }

PartialCounts partial_counts(Partition partition, const BinRange& range, std::size_t bins) {
    return build_sketch(partition, range, bins);
}

PartialCounts merge_counts(const PartialCounts& a, const PartialCounts& b) {
    if (!(a.range == b.range) || a.bins() != b.bins()) {
        throw ContractViolation("merge_counts: partial counts over different bins");
    }
    PartialCounts out = a;
    for (std::size_t i = 0; i < out.counts.size(); ++i) out.counts[i] += b.counts[i];
    out.n_left += b.n_left;
    out.n_right += b.n_right;
    return out;
}

namespace {

constexpr std::size_t kMomentWords = 5;

Moments gather_moments(std::span<const Partition> parts, CommLog& log) {
    Moments total;
    for (const auto& p : parts) total = merge_moments(total, partial_moments(p));
    log.gather(parts.size(), kMomentWords);
    return total;
}

PartialCounts gather_counts(std::span<const Partition> parts, const BinRange& range,
                            std::size_t bins, CommLog& log) {
    ++log.broadcasts;
    PartialCounts total = zero_counts(range, bins);
    for (const auto& p : parts) total = merge_counts(total, partial_counts(p, range, bins));
    log.gather(parts.size(), bins + 2);
    return total;
}

// Coordinator view of survivors spread over partitions.
class SpreadSurvivors {
public:
    SpreadSurvivors(std::span<const Partition> parts, std::uint64_t total, const Moments& extent,
                    CommLog& log)
        : total_(total), extent_(extent), log_(log) {
        nodes_.reserve(parts.size());
        for (const auto& p : parts) nodes_.emplace_back(p);
    }

    std::uint64_t size() const { return total_; }

    BinSketch count(const BinMapper& map) {
        ++log_.broadcasts;
        BinSketch total = zero_counts(map.range(), map.bins());
        for (auto& node : nodes_) total = merge_counts(total, node.count(map));
        log_.gather(nodes_.size(), map.bins() + 2);
        return total;
    }

    Moments extent() {
        if (extent_) return *extent_;
        ++log_.broadcasts;
        Moments e;
        for (auto& node : nodes_) {
            if (node.size() == 0) continue;
            const Moments local = node.extent();
            e.min = std::min(e.min, local.min);
            e.max = std::max(e.max, local.max);
        }
        e.count = total_;
        log_.gather(nodes_.size(), 2);
        extent_ = e;
        return e;
    }

    void keep(const BinMapper& map, std::size_t bin, std::uint64_t count) {
        ++log_.broadcasts;
        for (auto& node : nodes_) node.keep(map, bin, 0);
        total_ = count;
        extent_.reset();
    }

    std::vector<double> collect_all() {
        ++log_.broadcasts;
        std::vector<double> out;
        std::vector<std::size_t> words;
        for (auto& node : nodes_) {
            auto part = node.collect_all();
            words.push_back(part.size());
            out.insert(out.end(), part.begin(), part.end());
        }
        log_.gather(words);
        return out;
    }

    std::pair<std::vector<double>, std::vector<double>> collect_bins(const BinMapper& map,
                                                                     std::size_t b1, std::size_t b2) {
        ++log_.broadcasts;
        std::pair<std::vector<double>, std::vector<double>> out;
        std::vector<std::size_t> words;
        for (auto& node : nodes_) {
            auto [l, r] = node.collect_bins(map, b1, b2);
            words.push_back(l.size() + r.size());
            out.first.insert(out.first.end(), l.begin(), l.end());
            out.second.insert(out.second.end(), r.begin(), r.end());
        }
        log_.gather(words);
        return out;
    }

private:
    std::vector<detail::LocalSurvivors> nodes_;
    std::uint64_t total_;
    std::optional<Moments> extent_;
    CommLog& log_;
};

} // namespace

double distributed_binapprox(std::span<const Partition> partitions, std::size_t bins, CommLog* log) {
    if (bins < 2) throw ConfigError("bin count B must be at least 2");
    CommLog local;
    CommLog& comm = log ? *log : local;

    const Moments m = gather_moments(partitions, comm);
    if (m.empty()) throw ContractViolation("distributed_binapprox over no data");
    if (m.constant()) return m.mean();
    const auto target = MedianTarget::for_size(m.count);

    const PartialCounts counts = gather_counts(partitions, initial_range(m), bins, comm);
    if (auto v = approx_from_sketch(counts, target)) return *v;
    const PartialCounts wide = gather_counts(partitions, {m.min, m.max}, bins, comm);
    return *approx_from_sketch(wide, target);
}

double distributed_binmedian(std::span<const Partition> partitions, BinParams params, CommLog* log,
                             BinmedianStats* stats) {
    params.validate();
    CommLog local_log;
    CommLog& comm = log ? *log : local_log;
    BinmedianStats local_stats;
    BinmedianStats& st = stats ? *stats : local_stats;
    st = {};

    const Moments m = gather_moments(partitions, comm);
    if (m.empty()) throw ContractViolation("distributed_binmedian over no data");
    const auto target = MedianTarget::for_size(m.count);
    SpreadSurvivors src(partitions, m.count, m, comm);
    if (m.count <= params.cutoff) {
        auto all = src.collect_all();
        return insertion_sort_median(all, target);
    }
    if (m.constant()) return m.min;
    return detail::successive_binning(src, initial_range(m), std::nullopt, target, params, st);
}

} // namespace medbin
