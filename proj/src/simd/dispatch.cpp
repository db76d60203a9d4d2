#include <atomic>
#include <stdexcept>
#include <string>

#include "latent/simd/gower_kernels.hpp"

namespace latent::simd {

#if defined(LATENT_HAVE_AVX2_KERNELS)
namespace avx2 {
MatchCount count_codes(const std::uint8_t* a, const std::uint8_t* b, std::size_t n, bool skip_double_zero);
RangeSum range_sum(const double* a, const double* b, const double* range, std::size_t n);
}  // namespace avx2
#endif

#if defined(LATENT_HAVE_NEON_KERNELS)
namespace neon {
MatchCount count_codes(const std::uint8_t* a, const std::uint8_t* b, std::size_t n, bool skip_double_zero);
RangeSum range_sum(const double* a, const double* b, const double* range, std::size_t n);
}  // namespace neon
#endif

namespace {

constexpr GowerKernels kScalar{Isa::Scalar, &scalar::count_codes, &scalar::range_sum};
#if defined(LATENT_HAVE_AVX2_KERNELS)
constexpr GowerKernels kAvx2{Isa::Avx2, &avx2::count_codes, &avx2::range_sum};
#endif
#if defined(LATENT_HAVE_NEON_KERNELS)
constexpr GowerKernels kNeon{Isa::Neon, &neon::count_codes, &neon::range_sum};
#endif

std::atomic<const GowerKernels*>& active_slot() {
    static std::atomic<const GowerKernels*> slot{&kernels_for(best_available_isa())};
    return slot;
}

}  // namespace

std::string_view isa_name(Isa isa) {
    switch (isa) {
        case Isa::Scalar: return "scalar";
        case Isa::Avx2: return "avx2";
        case Isa::Neon: return "neon";
    }
    return "scalar";
}

bool isa_available(Isa isa) {
    switch (isa) {
        case Isa::Scalar: return true;
        case Isa::Avx2:
#if defined(LATENT_HAVE_AVX2_KERNELS)
            return __builtin_cpu_supports("avx2");
#else
            return false;
#endif
        case Isa::Neon:
#if defined(LATENT_HAVE_NEON_KERNELS)
            return true;
#else
            return false;
#endif
    }
    return false;
}

Isa best_available_isa() {
    if (isa_available(Isa::Avx2)) return Isa::Avx2;
    if (isa_available(Isa::Neon)) return Isa::Neon;
    return Isa::Scalar;
}

const GowerKernels& kernels_for(Isa isa) {
    if (!isa_available(isa)) throw std::invalid_argument("SIMD variant '" + std::string(isa_name(isa)) +
                                                         "' is not available on this machine");
    switch (isa) {
#if defined(LATENT_HAVE_AVX2_KERNELS)
        case Isa::Avx2: return kAvx2;
#endif
#if defined(LATENT_HAVE_NEON_KERNELS)
        case Isa::Neon: return kNeon;
#endif
        default: return kScalar;
    }
}

const GowerKernels& active_kernels() { return *active_slot().load(std::memory_order_acquire); }

void set_active_isa(Isa isa) { active_slot().store(&kernels_for(isa), std::memory_order_release); }

}  // namespace latent::simd
