#pragma once

#include <cstddef>
#include <span>

#include "medbin/bin_engine.hpp"
#include "medbin/moments.hpp"

namespace medbin {

// In-process simulation of a coordinator talking to data partitions. Each
// partition only ever reports moments, bin counts, extents or (at the end)
// its few surviving points; the coordinator merges and broadcasts ranges.

using Partition = std::span<const double>;

/// Bin counts of one partition over a broadcast range. Same layout as a sketch.
using PartialCounts = BinSketch;

/// Message accounting for the simulated topology. Payload is measured in
/// 64-bit words.
struct CommLog {
    std::size_t gather_rounds = 0;
    std::size_t broadcasts = 0;
    std::size_t messages = 0; // partition -> coordinator
    std::size_t payload_words = 0;
    std::size_t max_message_words = 0;

    void gather(std::size_t partitions, std::size_t words_each);
    void gather(std::span<const std::size_t> words);
};

Moments partial_moments(Partition partition);
Moments merge_moments(const Moments& a, const Moments& b);

PartialCounts zero_counts(const BinRange& range, std::size_t bins);
PartialCounts partial_counts(Partition partition, const BinRange& range, std::size_t bins);

/// Field-wise sum. Throws ContractViolation if range or bin count differ.
PartialCounts merge_counts(const PartialCounts& a, const PartialCounts& b);

/// One moments round, one counting round, midpoint of the median bin.
double distributed_binapprox(std::span<const Partition> partitions, std::size_t bins = 1000,
                             CommLog* log = nullptr);

/// Binning rounds driven by the coordinator until at most C points survive,
/// which are then shipped and finished by insertion sort.
double distributed_binmedian(std::span<const Partition> partitions, BinParams params = {},
                             CommLog* log = nullptr, BinmedianStats* stats = nullptr);

} // namespace medbin
