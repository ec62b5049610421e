#pragma once

#include <cstdint>
#include <vector>

namespace otk {

// Equidistant grid on [0, T] with n steps of width delta = T/n.
struct TimeGrid {
    double horizon_T = 1.0;
    std::int64_t steps_n = 1;
    double delta = 1.0;
};

// Path sampled at all n+1 grid knots 0, delta, ..., T (fine resolution).
struct SamplePath {
    TimeGrid grid;
    std::vector<double> values;  // size steps_n + 1
};

// The estimator's data: samples at k*delta for k = 0..n-1 only.
struct ObservedPath {
    TimeGrid grid;
    std::vector<double> values;  // size steps_n
};

// Identifies one replication's random stream. The stream is a pure function
// of (master_seed, replication_index); parallel and serial runs agree.
struct SeedSpec {
    std::uint64_t master_seed = 0;
    std::uint32_t replication_index = 0;
};

TimeGrid make_grid(double horizon_T, std::int64_t steps_n);

// Keep every m-th value, m = fine.steps_n / n; drops the terminal point.
ObservedPath subsample(const SamplePath& fine, std::int64_t n);

void validate(const TimeGrid& grid);
void validate(const SamplePath& path);
void validate(const ObservedPath& path);

}  // namespace otk
