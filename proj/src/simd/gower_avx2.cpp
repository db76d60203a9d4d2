// Compiled with -mavx2; only reached after a runtime CPU check.

#include <immintrin.h>

#include <bit>
#include <cmath>

#include "latent/simd/gower_kernels.hpp"

namespace latent::simd::avx2 {

MatchCount count_codes(const std::uint8_t* a, const std::uint8_t* b, std::size_t n, bool skip_double_zero) {
    MatchCount out;
    const __m256i missing = _mm256_set1_epi8(static_cast<char>(kMissingCode));
    const __m256i zero = _mm256_setzero_si256();
    std::size_t i = 0;
    for (; i + 32 <= n; i += 32) {
        const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
        const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
        __m256i skip = _mm256_or_si256(_mm256_cmpeq_epi8(va, missing), _mm256_cmpeq_epi8(vb, missing));
        if (skip_double_zero)
            skip = _mm256_or_si256(skip, _mm256_and_si256(_mm256_cmpeq_epi8(va, zero), _mm256_cmpeq_epi8(vb, zero)));
        const __m256i equal = _mm256_andnot_si256(skip, _mm256_cmpeq_epi8(va, vb));
        const auto skip_bits = static_cast<std::uint32_t>(_mm256_movemask_epi8(skip));
        const auto equal_bits = static_cast<std::uint32_t>(_mm256_movemask_epi8(equal));
        out.comparable += 32u - static_cast<std::uint32_t>(std::popcount(skip_bits));
        out.matches += static_cast<std::uint32_t>(std::popcount(equal_bits));
    }
    const MatchCount tail = scalar::count_codes(a + i, b + i, n - i, skip_double_zero);
    out.comparable += tail.comparable;
    out.matches += tail.matches;
    return out;
}

RangeSum range_sum(const double* a, const double* b, const double* range, std::size_t n) {
    RangeSum out;
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d sign = _mm256_set1_pd(-0.0);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d va = _mm256_loadu_pd(a + i);
        const __m256d vb = _mm256_loadu_pd(b + i);
        const __m256d vr = _mm256_loadu_pd(range + i);
        const __m256d valid = _mm256_cmp_pd(va, vb, _CMP_ORD_Q);
        const __m256d dist = _mm256_andnot_pd(sign, _mm256_sub_pd(va, vb));
        const __m256d sim = _mm256_sub_pd(one, _mm256_div_pd(dist, vr));
        acc = _mm256_add_pd(acc, _mm256_and_pd(sim, valid));
        out.comparable += static_cast<std::uint32_t>(std::popcount(static_cast<unsigned>(_mm256_movemask_pd(valid))));
    }
    alignas(32) double lane[4];
    _mm256_store_pd(lane, acc);
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

}  // namespace latent::simd::avx2
