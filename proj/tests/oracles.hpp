#pragma once

// Reference implementations used only by tests. They share no code with the
// library's algorithms.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace oracle {

inline double sorted_kth(std::vector<double> v, std::size_t k) {
    std::sort(v.begin(), v.end());
    return v.at(k - 1);
}

// Full sort, middle element or the correctly rounded mean of the middle two.
inline double sorted_median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n % 2 == 1) return v[n / 2];
    const double a = v[n / 2 - 1];
    const double b = v[n / 2];
    return std::midpoint(a, b);
}

struct TwoPass {
    double mean;
    double sigma;
};

// Textbook two-pass population moments.
inline TwoPass two_pass(std::span<const double> v) {
    long double s = 0;
    for (double x : v) s += x;
    const long double mean = s / static_cast<long double>(v.size());
    long double ss = 0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return {static_cast<double>(mean), static_cast<double>(std::sqrt(ss / static_cast<long double>(v.size())))};
}

using Rational = boost::multiprecision::cpp_rational;

// Exact value of a finite double.
inline Rational exact(double x) {
    int e = 0;
    const double m = std::frexp(x, &e); // x = m * 2^e, 0.5 <= |m| < 1
    const auto mant = static_cast<std::int64_t>(std::ldexp(m, 53));
    Rational r(mant);
    const int shift = e - 53;
    if (shift >= 0) {
        r *= Rational(boost::multiprecision::cpp_int(1) << shift);
    } else {
        r /= Rational(boost::multiprecision::cpp_int(1) << -shift);
    }
    return r;
}

// -1 left, B right, else floor((x - lo) * B / (hi - lo)) in exact arithmetic,
// with x == hi in bin B-1.
inline long exact_bin(double x, double lo, double hi, long bins) {
    if (x < lo) return -1;
    if (x > hi) return bins;
    if (x == hi) return bins - 1;
    const Rational t = (exact(x) - exact(lo)) * bins / (exact(hi) - exact(lo));
    const auto q = boost::multiprecision::numerator(t) / boost::multiprecision::denominator(t);
    return static_cast<long>(q);
}

// Distance from x to the nearest exact bin edge, measured in ulps of x.
inline bool near_edge(double x, double lo, double hi, long bins) {
    const Rational t = (exact(x) - exact(lo)) * bins / (exact(hi) - exact(lo));
    const auto q = boost::multiprecision::numerator(t) / boost::multiprecision::denominator(t);
    const Rational frac = t - Rational(q);
    const Rational width = (exact(hi) - exact(lo)) / bins;
    const Rational ulp = exact(std::nextafter(std::fabs(x), INFINITY) - std::fabs(x));
    return frac * width <= 2 * ulp || (1 - frac) * width <= 2 * ulp;
}

// Rank k (1-based) lands in the bin whose label appears at position k of the
// expanded, sorted multiset of labels (-1 = left, B = right).
inline long expanded_bin(std::uint64_t n_left, const std::vector<std::uint64_t>& counts,
                         std::uint64_t n_right, std::uint64_t k) {
    std::vector<long> labels(n_left, -1);
    for (std::size_t b = 0; b < counts.size(); ++b) labels.insert(labels.end(), counts[b], static_cast<long>(b));
    labels.insert(labels.end(), n_right, static_cast<long>(counts.size()));
    return labels.at(k - 1);
}

} // namespace oracle
