#include "medbin/moments.hpp"

#include <algorithm>
#include <cmath>

namespace medbin {

double Moments::mean() const {
    if (count == 0) return 0.0;
    if (min == max) return min;
    return sum / static_cast<double>(count);
}

double Moments::variance() const {
    if (count == 0 || min == max) return 0.0;
    const double n = static_cast<double>(count);
    const double mu = sum / n;
    return std::max(0.0, sum_sq / n - mu * mu);
}

double Moments::sigma() const { return std::sqrt(variance()); }

Moments compute_moments(std::span<const double> data) {
    Moments m;
    for (const double x : data) m.add(x);
    return m;
}

Moments merge(const Moments& a, const Moments& b) {
    Moments m;
    m.count = a.count + b.count;
    m.sum = a.sum + b.sum;
    m.sum_sq = a.sum_sq + b.sum_sq;
    m.min = std::min(a.min, b.min);
    m.max = std::max(a.max, b.max);
    return m;
}

} // namespace medbin
