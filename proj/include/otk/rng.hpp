#pragma once

#include <cstdint>
#include <vector>

#include "otk/core.hpp"

namespace otk::rng {

// Stream tags keep the different draw purposes of one replication disjoint.
enum class StreamTag : std::uint32_t {
    normals = 0,
    uniforms = 1,
    initial = 2,
    events = 3,
};

// Counter-based uniform stream over Philox4x32-10. One counter block yields
// four 32-bit words = two doubles.
class UniformStream {
public:
    UniformStream(SeedSpec seed, StreamTag tag);

    // u in (0, 1]; safe as a log() argument
    double next_open01();
    // u in [0, 1)
    double next_halfopen01();

private:
    void refill();

    std::uint64_t key_;
    std::uint32_t rep_;
    std::uint32_t tag_;
    std::uint64_t next_block_ = 0;
    std::vector<std::uint64_t> buf_;
    std::size_t pos_ = 0;
};

// Standard normal stream: Philox uniforms through the Box-Muller transform.
// The transform stays scalar so that results do not depend on the dispatched
// kernel set.
class NormalStream {
public:
    explicit NormalStream(SeedSpec seed, StreamTag tag = StreamTag::normals);

    double next();
    void fill(double* out, std::size_t n);

private:
    void refill();

    std::uint64_t key_;
    std::uint32_t rep_;
    std::uint32_t tag_;
    std::uint64_t next_block_ = 0;
    std::vector<double> buf_;
    std::size_t pos_ = 0;
};

}  // namespace otk::rng
