#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>

namespace medbin {

// A caller broke a documented precondition (rank out of range, empty input,
// removing a value that is not present, ...).
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Invalid algorithm or generator parameters.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The rank(s) a median query is after. Ranks are 1-based.
///
/// A single target (odd n) names one order statistic; a pair target (even n)
/// names two adjacent ones whose mean is the median.
class MedianTarget {
public:
    static MedianTarget single(std::size_t k) { return {k, k}; }
    static MedianTarget pair(std::size_t k_lo) { return {k_lo, k_lo + 1}; }

    /// Median rank(s) of a data set of size n: (n+1)/2, or n/2 and n/2+1.
    static MedianTarget for_size(std::size_t n) {
        if (n == 0) throw ContractViolation("median of an empty data set");
        return n % 2 == 1 ? single((n + 1) / 2) : pair(n / 2);
    }

    bool is_pair() const { return lo_ != hi_; }
    std::size_t lo() const { return lo_; }
    std::size_t hi() const { return hi_; }

    /// Same shape (single/pair) with a new low rank.
    MedianTarget rebased(std::size_t k_lo) const { return is_pair() ? pair(k_lo) : single(k_lo); }

    /// Throws unless every rank lies in [1, n].
    void check(std::size_t n) const;

    friend bool operator==(const MedianTarget&, const MedianTarget&) = default;

private:
    MedianTarget(std::size_t lo, std::size_t hi) : lo_(lo), hi_(hi) {}
    std::size_t lo_;
    std::size_t hi_;
};

/// Throws ContractViolation naming the first NaN or infinite entry.
void require_finite(std::span<const double> values, const std::string& what = "data");

} // namespace medbin
