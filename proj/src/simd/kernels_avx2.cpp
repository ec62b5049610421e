// AVX2 variants of the dispatched kernels. Compiled with -mavx2 only; the
// dispatcher never hands out this table unless the CPU reports AVX2.
// Contract: bit-identical output to the scalar reference (enforced in tests),
// hence plain mul/add ordering, no FMA.

#if defined(__x86_64__)

#include "otk/simd/kernels.hpp"

#include <immintrin.h>

#include <cmath>

namespace otk::simd {
namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

// 4 philox blocks per iteration, one 32-bit word per 64-bit lane.
void philox_bulk_avx2(std::uint64_t key, std::uint32_t tag, std::uint32_t rep,
                      std::uint64_t block0, std::size_t n_blocks, std::uint32_t* out) {
    const std::uint32_t key0 = static_cast<std::uint32_t>(key);
    const std::uint32_t key1 = static_cast<std::uint32_t>(key >> 32);
    const __m256i m0 = _mm256_set1_epi64x(kPhiloxM0);
    const __m256i m1 = _mm256_set1_epi64x(kPhiloxM1);
    const __m256i w0 = _mm256_set1_epi64x(kWeyl0);
    const __m256i w1 = _mm256_set1_epi64x(kWeyl1);
    const __m256i lo32 = _mm256_set1_epi64x(0xFFFFFFFFll);
    const __m256i ctag = _mm256_set1_epi64x(tag);
    const __m256i crep = _mm256_set1_epi64x(rep);

    std::size_t i = 0;
    for (; i + 4 <= n_blocks; i += 4) {
        const std::uint64_t b0 = block0 + i;
        __m256i c0 = _mm256_set_epi64x(
            static_cast<long long>((b0 + 3) & 0xFFFFFFFFull),
            static_cast<long long>((b0 + 2) & 0xFFFFFFFFull),
            static_cast<long long>((b0 + 1) & 0xFFFFFFFFull),
            static_cast<long long>(b0 & 0xFFFFFFFFull));
        __m256i c1 = _mm256_set_epi64x(
            static_cast<long long>((b0 + 3) >> 32), static_cast<long long>((b0 + 2) >> 32),
            static_cast<long long>((b0 + 1) >> 32), static_cast<long long>(b0 >> 32));
        __m256i c2 = ctag;
        __m256i c3 = crep;
        __m256i k0 = _mm256_set1_epi64x(key0);
        __m256i k1 = _mm256_set1_epi64x(key1);
        for (int r = 0; r < 10; ++r) {
            const __m256i p0 = _mm256_mul_epu32(c0, m0);
            const __m256i p1 = _mm256_mul_epu32(c2, m1);
            const __m256i hi0 = _mm256_srli_epi64(p0, 32);
            const __m256i lo0 = _mm256_and_si256(p0, lo32);
            const __m256i hi1 = _mm256_srli_epi64(p1, 32);
            const __m256i lo1 = _mm256_and_si256(p1, lo32);
            c0 = _mm256_xor_si256(_mm256_xor_si256(hi1, c1), k0);
            c1 = lo1;
            c2 = _mm256_xor_si256(_mm256_xor_si256(hi0, c3), k1);
            c3 = lo0;
            k0 = _mm256_and_si256(_mm256_add_epi64(k0, w0), lo32);
            k1 = _mm256_and_si256(_mm256_add_epi64(k1, w1), lo32);
        }
        alignas(32) std::uint64_t w[4][4];
        _mm256_store_si256(reinterpret_cast<__m256i*>(w[0]), c0);
        _mm256_store_si256(reinterpret_cast<__m256i*>(w[1]), c1);
        _mm256_store_si256(reinterpret_cast<__m256i*>(w[2]), c2);
        _mm256_store_si256(reinterpret_cast<__m256i*>(w[3]), c3);
        for (int lane = 0; lane < 4; ++lane)
            for (int word = 0; word < 4; ++word)
                out[4 * (i + lane) + word] = static_cast<std::uint32_t>(w[word][lane]);
    }
    if (i < n_blocks)
        scalar_kernels().philox_bulk(key, tag, rep, block0 + i, n_blocks - i, out + 4 * i);
}

void map_identity_avx2(const double* x, double* y, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) _mm256_storeu_pd(y + i, _mm256_loadu_pd(x + i));
    for (; i < n; ++i) y[i] = x[i];
}

void map_indicator_avx2(const double* x, double* y, std::size_t n, double lo, double hi) {
    const __m256d vlo = _mm256_set1_pd(lo);
    const __m256d vhi = _mm256_set1_pd(hi);
    const __m256d one = _mm256_set1_pd(1.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d v = _mm256_loadu_pd(x + i);
        const __m256d m = _mm256_and_pd(_mm256_cmp_pd(v, vlo, _CMP_GE_OQ),
                                        _mm256_cmp_pd(v, vhi, _CMP_LT_OQ));
        _mm256_storeu_pd(y + i, _mm256_and_pd(m, one));
    }
    for (; i < n; ++i) y[i] = (x[i] >= lo && x[i] < hi) ? 1.0 : 0.0;
}

void map_sqrtabs_avx2(const double* x, double* y, std::size_t n, double cap) {
    const __m256d vcap = _mm256_set1_pd(cap);
    const __m256d absmask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7FFFFFFFFFFFFFFFll));
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d a = _mm256_and_pd(_mm256_loadu_pd(x + i), absmask);
        _mm256_storeu_pd(y + i, _mm256_sqrt_pd(_mm256_min_pd(a, vcap)));
    }
    for (; i < n; ++i) {
        const double a = std::fabs(x[i]);
        y[i] = std::sqrt(a < cap ? a : cap);
    }
}

void map_hermite_avx2(const double* x, double* y, std::size_t n, int deg) {
    if (deg == 0) {
        const __m256d one = _mm256_set1_pd(1.0);
        std::size_t i = 0;
        for (; i + 4 <= n; i += 4) _mm256_storeu_pd(y + i, one);
        for (; i < n; ++i) y[i] = 1.0;
        return;
    }
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d v = _mm256_loadu_pd(x + i);
        __m256d hm = _mm256_set1_pd(1.0);
        __m256d h = v;
        for (int j = 1; j < deg; ++j) {
            const __m256d s = _mm256_set1_pd(std::sqrt(static_cast<double>(j)));
            const __m256d r = _mm256_set1_pd(1.0 / std::sqrt(static_cast<double>(j + 1)));
            const __m256d hp = _mm256_mul_pd(
                _mm256_sub_pd(_mm256_mul_pd(v, h), _mm256_mul_pd(s, hm)), r);
            hm = h;
            h = hp;
        }
        _mm256_storeu_pd(y + i, h);
    }
    if (i < n) scalar_kernels().map_hermite(x + i, y + i, n - i, deg);
}

void map_fold_avx2(const double* x, double* y, std::size_t n, double m) {
    const __m256d vm = _mm256_set1_pd(m);
    const __m256d period = _mm256_set1_pd(4.0 * m);
    const __m256d two_m = _mm256_set1_pd(2.0 * m);
    const __m256d three_m = _mm256_set1_pd(3.0 * m);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d a = _mm256_add_pd(_mm256_loadu_pd(x + i), vm);
        const __m256d f = _mm256_floor_pd(_mm256_div_pd(a, period));
        const __m256d u = _mm256_sub_pd(a, _mm256_mul_pd(period, f));
        const __m256d mask = _mm256_cmp_pd(u, two_m, _CMP_LT_OQ);
        _mm256_storeu_pd(y + i, _mm256_blendv_pd(_mm256_sub_pd(three_m, u),
                                                 _mm256_sub_pd(u, vm), mask));
    }
    if (i < n) scalar_kernels().map_fold(x + i, y + i, n - i, m);
}

double sum_stride4_avx2(const double* v, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(v + i));
    alignas(32) double a[4];
    _mm256_store_pd(a, acc);
    double total = (a[0] + a[1]) + (a[2] + a[3]);
    for (; i < n; ++i) total += v[i];
    return total;
}

}  // namespace

const Kernels* avx2_kernels() {
    if (!__builtin_cpu_supports("avx2")) return nullptr;
    static const Kernels k = {
        philox_bulk_avx2, map_identity_avx2, map_indicator_avx2,
        map_sqrtabs_avx2, map_hermite_avx2,  map_fold_avx2,
        sum_stride4_avx2,
    };
    return &k;
}

}  // namespace otk::simd

#endif  // __x86_64__
