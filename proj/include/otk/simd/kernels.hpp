#pragma once

#include <cstddef>
#include <cstdint>

// Runtime-dispatched arithmetic kernels. Every kernel has a scalar reference
// implementation and (on x86-64 with AVX2) a vector variant that is required
// to produce bit-identical output. To keep that guarantee the kernels use
// only IEEE mul/add/sub/div/sqrt/floor and integer ops; anything involving
// libm transcendentals (Box-Muller, exp) stays outside this layer.

namespace otk::simd {

enum class Isa { scalar, avx2 };

struct Kernels {
    // Philox4x32-10 counter blocks. Block b (b = block0+i) is keyed by
    // (key_lo, key_hi) with counter (lo32(b), hi32(b), tag, rep) and writes
    // 4 words to out[4*i .. 4*i+3].
    void (*philox_bulk)(std::uint64_t key, std::uint32_t tag, std::uint32_t rep,
                        std::uint64_t block0, std::size_t n_blocks, std::uint32_t* out);

    // y[i] = x[i]
    void (*map_identity)(const double* x, double* y, std::size_t n);
    // y[i] = 1 if lo <= x[i] < hi else 0
    void (*map_indicator)(const double* x, double* y, std::size_t n, double lo, double hi);
    // y[i] = sqrt(min(|x[i]|, cap))
    void (*map_sqrtabs)(const double* x, double* y, std::size_t n, double cap);
    // y[i] = h_deg(x[i]), orthonormal probabilists' Hermite polynomial via the
    // recurrence h_{j+1} = (x*h_j - sqrt(j)*h_{j-1}) * rsqrt(j+1)
    void (*map_hermite)(const double* x, double* y, std::size_t n, int deg);
    // y[i] = fold of x[i] into [-halfwidth, halfwidth] with period 4*halfwidth
    // via u = (x+M) - 4M*floor((x+M)/(4M)); y = u<2M ? u-M : 3M-u
    void (*map_fold)(const double* x, double* y, std::size_t n, double halfwidth);
    // 4-lane strided sum: acc[j] += v[4i+j]; total = (acc0+acc1)+(acc2+acc3),
    // then remaining <4 elements appended left to right.
    double (*sum_stride4)(const double* v, std::size_t n);
};

const Kernels& scalar_kernels();
#if defined(__x86_64__)
const Kernels* avx2_kernels();  // nullptr when the CPU lacks AVX2
#endif

// Active table: AVX2 when available, overridable with OTK_SIMD=scalar|avx2.
const Kernels& kernels();
Isa active_isa();
const char* isa_name(Isa isa);

}  // namespace otk::simd
