#include "otk/simd/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace otk::simd {
namespace {

Isa resolve_isa() {
    const char* env = std::getenv("OTK_SIMD");
    if (env != nullptr) {
        if (std::strcmp(env, "scalar") == 0) return Isa::scalar;
#if defined(__x86_64__)
        if (std::strcmp(env, "avx2") == 0 && avx2_kernels() != nullptr) return Isa::avx2;
#endif
        return Isa::scalar;  // unknown or unsupported request
    }
#if defined(__x86_64__)
    if (avx2_kernels() != nullptr) return Isa::avx2;
#endif
    return Isa::scalar;
}

}  // namespace

Isa active_isa() {
    static const Isa isa = resolve_isa();
    return isa;
}

const char* isa_name(Isa isa) {
    switch (isa) {
        case Isa::avx2: return "avx2";
        case Isa::scalar: default: return "scalar";
    }
}

const Kernels& kernels() {
#if defined(__x86_64__)
    if (active_isa() == Isa::avx2) return *avx2_kernels();
#endif
    return scalar_kernels();
}

}  // namespace otk::simd
