// AArch64 only; NEON is part of the base ISA there.

#include <arm_neon.h>

#include <cmath>

#include "latent/simd/gower_kernels.hpp"

namespace latent::simd::neon {

MatchCount count_codes(const std::uint8_t* a, const std::uint8_t* b, std::size_t n, bool skip_double_zero) {
    MatchCount out;
    const uint8x16_t missing = vdupq_n_u8(kMissingCode);
    const uint8x16_t zero = vdupq_n_u8(0);
    std::size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        const uint8x16_t va = vld1q_u8(a + i);
        const uint8x16_t vb = vld1q_u8(b + i);
        uint8x16_t skip = vorrq_u8(vceqq_u8(va, missing), vceqq_u8(vb, missing));
        if (skip_double_zero) skip = vorrq_u8(skip, vandq_u8(vceqq_u8(va, zero), vceqq_u8(vb, zero)));
        const uint8x16_t comparable = vmvnq_u8(skip);
        const uint8x16_t equal = vandq_u8(vceqq_u8(va, vb), comparable);
        out.comparable += vaddvq_u8(vshrq_n_u8(comparable, 7));
        out.matches += vaddvq_u8(vshrq_n_u8(equal, 7));
    }
    const MatchCount tail = scalar::count_codes(a + i, b + i, n - i, skip_double_zero);
    out.comparable += tail.comparable;
    out.matches += tail.matches;
    return out;
}

RangeSum range_sum(const double* a, const double* b, const double* range, std::size_t n) {
    RangeSum out;
    const float64x2_t one = vdupq_n_f64(1.0);
    float64x2_t acc01 = vdupq_n_f64(0.0);
    float64x2_t acc23 = vdupq_n_f64(0.0);
    auto step = [&](float64x2_t acc, std::size_t at) {
        const float64x2_t va = vld1q_f64(a + at);
        const float64x2_t vb = vld1q_f64(b + at);
        const float64x2_t vr = vld1q_f64(range + at);
        const uint64x2_t valid = vandq_u64(vceqq_f64(va, va), vceqq_f64(vb, vb));
        const float64x2_t sim = vsubq_f64(one, vdivq_f64(vabdq_f64(va, vb), vr));
        out.comparable += static_cast<std::uint32_t>(vaddvq_u64(vshrq_n_u64(valid, 63)));
        return vaddq_f64(acc, vreinterpretq_f64_u64(vandq_u64(vreinterpretq_u64_f64(sim), valid)));
    };
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc01 = step(acc01, i);
        acc23 = step(acc23, i + 2);
    }
    double sum = (vgetq_lane_f64(acc01, 0) + vgetq_lane_f64(acc01, 1)) +
                 (vgetq_lane_f64(acc23, 0) + vgetq_lane_f64(acc23, 1));
    for (; i < n; ++i) {
        const double x = a[i], y = b[i];
        if (std::isnan(x) || std::isnan(y)) continue;
        sum += 1.0 - std::fabs(x - y) / range[i];
        ++out.comparable;
    }
    out.sum = sum;
    return out;
}

}  // namespace latent::simd::neon
