#include <cmath>

#include "latent/simd/gower_kernels.hpp"

namespace latent::simd::scalar {

MatchCount count_codes(const std::uint8_t* a, const std::uint8_t* b, std::size_t n, bool skip_double_zero) {
    MatchCount out;
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i] == kMissingCode || b[i] == kMissingCode) continue;
        if (skip_double_zero && a[i] == 0 && b[i] == 0) continue;
        ++out.comparable;
        out.matches += a[i] == b[i];
    }
    return out;
}

RangeSum range_sum(const double* a, const double* b, const double* range, std::size_t n) {
    RangeSum out;
    double lane[4] = {0.0, 0.0, 0.0, 0.0};
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        for (std::size_t l = 0; l < 4; ++l) {
            const double x = a[i + l], y = b[i + l];
            const bool valid = !std::isnan(x) && !std::isnan(y);
            const double s = 1.0 - std::fabs(x - y) / range[i + l];
            lane[l] += valid ? s : 0.0;
            out.comparable += valid;
        }
    }
    double sum = (lane[0] + lane[1]) + (lane[2] + lane[3]);
    for (; i < n; ++i) {
        const double x = a[i], y = b[i];
        if (std::isnan(x) || std::isnan(y)) continue;
        sum += 1.0 - std::fabs(x - y) / range[i];
        ++out.comparable;
    }
    out.sum = sum;
    return out;
}

}  // namespace latent::simd::scalar
