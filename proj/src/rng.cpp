#include "otk/rng.hpp"

#include <cmath>

#include "otk/simd/kernels.hpp"

namespace otk::rng {
namespace {

constexpr std::size_t kBlocksPerRefill = 512;
constexpr double kTwoPi = 6.283185307179586476925286766559;

inline double u64_to_open01(std::uint64_t v) {
    return static_cast<double>((v >> 11) + 1) * 0x1.0p-53;  // (0, 1]
}

inline double u64_to_halfopen01(std::uint64_t v) {
    return static_cast<double>(v >> 11) * 0x1.0p-53;  // [0, 1)
}

std::vector<std::uint64_t> philox_u64(std::uint64_t key, std::uint32_t tag, std::uint32_t rep,
                                      std::uint64_t block0, std::size_t n_blocks) {
    std::vector<std::uint32_t> words(4 * n_blocks);
    simd::kernels().philox_bulk(key, tag, rep, block0, n_blocks, words.data());
    std::vector<std::uint64_t> out(2 * n_blocks);
    for (std::size_t i = 0; i < n_blocks; ++i) {
        out[2 * i] = (static_cast<std::uint64_t>(words[4 * i]) << 32) | words[4 * i + 1];
        out[2 * i + 1] = (static_cast<std::uint64_t>(words[4 * i + 2]) << 32) | words[4 * i + 3];
    }
    return out;
}

}  // namespace

UniformStream::UniformStream(SeedSpec seed, StreamTag tag)
    : key_(seed.master_seed),
      rep_(seed.replication_index),
      tag_(static_cast<std::uint32_t>(tag)) {}

void UniformStream::refill() {
    buf_ = philox_u64(key_, tag_, rep_, next_block_, kBlocksPerRefill);
    next_block_ += kBlocksPerRefill;
    pos_ = 0;
}

double UniformStream::next_open01() {
    if (pos_ >= buf_.size()) refill();
    return u64_to_open01(buf_[pos_++]);
}

double UniformStream::next_halfopen01() {
    if (pos_ >= buf_.size()) refill();
    return u64_to_halfopen01(buf_[pos_++]);
}

NormalStream::NormalStream(SeedSpec seed, StreamTag tag)
    : key_(seed.master_seed),
      rep_(seed.replication_index),
      tag_(static_cast<std::uint32_t>(tag)) {}

void NormalStream::refill() {
    const auto u = philox_u64(key_, tag_, rep_, next_block_, kBlocksPerRefill);
    next_block_ += kBlocksPerRefill;
    buf_.resize(u.size());
    for (std::size_t i = 0; i + 1 < u.size(); i += 2) {
        const double r = std::sqrt(-2.0 * std::log(u64_to_open01(u[i])));
        const double a = kTwoPi * u64_to_halfopen01(u[i + 1]);
        buf_[i] = r * std::cos(a);
        buf_[i + 1] = r * std::sin(a);
    }
    pos_ = 0;
}

double NormalStream::next() {
    if (pos_ >= buf_.size()) refill();
    return buf_[pos_++];
}

void NormalStream::fill(double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = next();
}

}  // namespace otk::rng
