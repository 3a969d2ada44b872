#include "medbin/types.hpp"

#include <cmath>

namespace medbin {

void MedianTarget::check(std::size_t n) const {
    if (lo_ < 1 || hi_ > n) {
        throw ContractViolation("rank " + std::to_string(lo_ < 1 ? lo_ : hi_) +
                                " outside [1, " + std::to_string(n) + "]");
    }
}

void require_finite(std::span<const double> values, const std::string& what) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            throw ContractViolation(what + ": non-finite value at index " + std::to_string(i));
        }
    }
}

} // namespace medbin
