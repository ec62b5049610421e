#include "otk/simd/kernels.hpp"

#include <cmath>

namespace otk::simd {
namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

void philox_bulk_scalar(std::uint64_t key, std::uint32_t tag, std::uint32_t rep,
                        std::uint64_t block0, std::size_t n_blocks, std::uint32_t* out) {
    const std::uint32_t key0 = static_cast<std::uint32_t>(key);
    const std::uint32_t key1 = static_cast<std::uint32_t>(key >> 32);
    for (std::size_t i = 0; i < n_blocks; ++i) {
        const std::uint64_t b = block0 + i;
        std::uint32_t c0 = static_cast<std::uint32_t>(b);
        std::uint32_t c1 = static_cast<std::uint32_t>(b >> 32);
        std::uint32_t c2 = tag;
        std::uint32_t c3 = rep;
        std::uint32_t k0 = key0, k1 = key1;
        for (int r = 0; r < 10; ++r) {
            const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * c0;
            const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * c2;
            const std::uint32_t n0 = static_cast<std::uint32_t>(p1 >> 32) ^ c1 ^ k0;
            const std::uint32_t n1 = static_cast<std::uint32_t>(p1);
            const std::uint32_t n2 = static_cast<std::uint32_t>(p0 >> 32) ^ c3 ^ k1;
            const std::uint32_t n3 = static_cast<std::uint32_t>(p0);
            c0 = n0; c1 = n1; c2 = n2; c3 = n3;
            k0 += kWeyl0; k1 += kWeyl1;
        }
        out[4 * i + 0] = c0;
        out[4 * i + 1] = c1;
        out[4 * i + 2] = c2;
        out[4 * i + 3] = c3;
    }
}

void map_identity_scalar(const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i];
}

void map_indicator_scalar(const double* x, double* y, std::size_t n, double lo, double hi) {
    for (std::size_t i = 0; i < n; ++i) y[i] = (x[i] >= lo && x[i] < hi) ? 1.0 : 0.0;
}

void map_sqrtabs_scalar(const double* x, double* y, std::size_t n, double cap) {
    for (std::size_t i = 0; i < n; ++i) {
        const double a = std::fabs(x[i]);
        y[i] = std::sqrt(a < cap ? a : cap);
    }
}

void map_hermite_scalar(const double* x, double* y, std::size_t n, int deg) {
    if (deg == 0) {
        for (std::size_t i = 0; i < n; ++i) y[i] = 1.0;
        return;
    }
    for (std::size_t i = 0; i < n; ++i) {
        double hm = 1.0;
        double h = x[i];
        for (int j = 1; j < deg; ++j) {
            const double s = std::sqrt(static_cast<double>(j));
            const double r = 1.0 / std::sqrt(static_cast<double>(j + 1));
            const double hp = (x[i] * h - s * hm) * r;
            hm = h;
            h = hp;
        }
        y[i] = h;
    }
}

void map_fold_scalar(const double* x, double* y, std::size_t n, double m) {
    const double period = 4.0 * m;
    const double two_m = 2.0 * m;
    const double three_m = 3.0 * m;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = x[i] + m;
        double u = a - period * std::floor(a / period);
        y[i] = (u < two_m) ? (u - m) : (three_m - u);
    }
}

double sum_stride4_scalar(const double* v, std::size_t n) {
    double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        a0 += v[i + 0];
        a1 += v[i + 1];
        a2 += v[i + 2];
        a3 += v[i + 3];
    }
    double total = (a0 + a1) + (a2 + a3);
    for (; i < n; ++i) total += v[i];
    return total;
}

}  // namespace

const Kernels& scalar_kernels() {
    static const Kernels k = {
        philox_bulk_scalar, map_identity_scalar, map_indicator_scalar,
        map_sqrtabs_scalar, map_hermite_scalar,  map_fold_scalar,
        sum_stride4_scalar,
    };
    return k;
}

}  // namespace otk::simd
