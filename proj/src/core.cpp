#include "otk/core.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace otk {

TimeGrid make_grid(double horizon_T, std::int64_t steps_n) {
    if (!(horizon_T > 0.0) || !std::isfinite(horizon_T))
        throw std::domain_error("make_grid: horizon T must be positive and finite");
    if (steps_n < 1) throw std::domain_error("make_grid: steps n must be >= 1");
    return TimeGrid{horizon_T, steps_n, horizon_T / static_cast<double>(steps_n)};
}

ObservedPath subsample(const SamplePath& fine, std::int64_t n) {
    validate(fine);
    if (n < 1) throw std::domain_error("subsample: n must be >= 1");
    if (fine.grid.steps_n % n != 0)
        throw std::domain_error("subsample: fine grid has " + std::to_string(fine.grid.steps_n) +
                                " steps, not divisible by " + std::to_string(n));
    const std::int64_t m = fine.grid.steps_n / n;
    ObservedPath obs;
    obs.grid = make_grid(fine.grid.horizon_T, n);
    obs.values.resize(static_cast<std::size_t>(n));
    for (std::int64_t k = 0; k < n; ++k)
        obs.values[static_cast<std::size_t>(k)] = fine.values[static_cast<std::size_t>(k * m)];
    return obs;
}

void validate(const TimeGrid& grid) {
    if (!(grid.horizon_T > 0.0) || grid.steps_n < 1)
        throw std::domain_error("TimeGrid: invalid T or n");
    const double expect = grid.horizon_T / static_cast<double>(grid.steps_n);
    if (std::fabs(grid.delta - expect) > 1e-12 * expect)
        throw std::domain_error("TimeGrid: delta does not equal T/n");
}

void validate(const SamplePath& path) {
    validate(path.grid);
    if (path.values.size() != static_cast<std::size_t>(path.grid.steps_n) + 1)
        throw std::domain_error("SamplePath: values length must be steps_n + 1");
}

void validate(const ObservedPath& path) {
    validate(path.grid);
    if (path.values.size() != static_cast<std::size_t>(path.grid.steps_n))
        throw std::domain_error("ObservedPath: values length must be steps_n");
}

}  // namespace otk
