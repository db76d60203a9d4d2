#pragma once

// Inner loops of the Gower pair computation.
//
// Every variant produces bit-identical results: code kernels count in
// integers, and the range kernel accumulates in four interleaved lanes that
// are combined as (l0 + l1) + (l2 + l3) before a sequential tail. The scalar
// reference follows the same lane layout as AVX2 (one 4-wide register) and
// NEON (two 2-wide registers).

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace latent::simd {

enum class Isa { Scalar, Avx2, Neon };

std::string_view isa_name(Isa isa);

// Code value marking a missing categorical/binary observation.
inline constexpr std::uint8_t kMissingCode = 0xFF;

struct MatchCount {
    std::uint32_t matches = 0;
    std::uint32_t comparable = 0;
};

struct RangeSum {
    double sum = 0.0;
    std::uint32_t comparable = 0;
};

// Equality matches over `n` codes. A position is comparable when neither side
// is kMissingCode and, if `skip_double_zero`, not both zero.
using CountCodesFn = MatchCount (*)(const std::uint8_t* a, const std::uint8_t* b, std::size_t n,
                                    bool skip_double_zero);

// Sum of 1 - |a - b| / range over positions where neither side is NaN.
// Ranges must be positive.
using RangeSumFn = RangeSum (*)(const double* a, const double* b, const double* range, std::size_t n);

struct GowerKernels {
    Isa isa;
    CountCodesFn count_codes;
    RangeSumFn range_sum;
};

namespace scalar {
MatchCount count_codes(const std::uint8_t* a, const std::uint8_t* b, std::size_t n, bool skip_double_zero);
RangeSum range_sum(const double* a, const double* b, const double* range, std::size_t n);
}  // namespace scalar

// True when the variant is compiled in and the running CPU supports it.
bool isa_available(Isa isa);
Isa best_available_isa();

// Throws std::invalid_argument when the variant is unavailable.
const GowerKernels& kernels_for(Isa isa);

// Process-wide selection; defaults to best_available_isa().
const GowerKernels& active_kernels();
void set_active_isa(Isa isa);

}  // namespace latent::simd
