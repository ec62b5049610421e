#include "otk/functionals.hpp"

#include <cmath>
#include <stdexcept>

#include "otk/rng.hpp"
#include "otk/simd/kernels.hpp"

namespace otk::functionals {
namespace {

// Conditional moments of (endpoint increment, integral increment) over one
// cell of width d, started at the cell's left point.
struct CellMoments {
    double mean_x_factor;  // E[X_{t+d} | X_t = x] = factor * x
    double mean_i_factor;  // E[int | X_t = x] = factor * x
    double sd_x;
    double cov_xi;
    double sd_i_resid;  // sqrt(Var I - cov^2/Var X)
};

CellMoments ou_moments(double d) {
    const double a = std::exp(-d);
    const double vx = -std::expm1(-2.0 * d);
    double vi, cov;
    if (d < 1e-2) {
        // 2d - 4(1-e^{-d}) + (1-e^{-2d}) and 2(1-e^{-d}) - (1-e^{-2d}),
        // summed as series to dodge the d^3/d^2-order cancellation
        const double d2 = d * d, d3 = d2 * d, d4 = d3 * d, d5 = d4 * d, d6 = d5 * d;
        vi = (2.0 / 3.0) * d3 - 0.5 * d4 + (7.0 / 30.0) * d5 - (1.0 / 12.0) * d6;
        cov = d2 - d3 + (7.0 / 12.0) * d4 - 0.25 * d5 + (31.0 / 360.0) * d6;
    } else {
        const double om = -std::expm1(-d);        // 1 - e^{-d}
        const double om2 = -std::expm1(-2.0 * d); // 1 - e^{-2d}
        vi = 2.0 * d - 4.0 * om + om2;
        cov = 2.0 * om - om2;
    }
    CellMoments m;
    m.mean_x_factor = a;
    m.mean_i_factor = (1.0 - a);
    m.sd_x = std::sqrt(vx);
    m.cov_xi = cov;
    const double resid = vi - cov * cov / vx;
    m.sd_i_resid = std::sqrt(resid > 0.0 ? resid : 0.0);
    return m;
}

CellMoments bm_moments(double d) {
    CellMoments m;
    m.mean_x_factor = 1.0;
    m.mean_i_factor = d;
    m.sd_x = std::sqrt(d);
    m.cov_xi = 0.5 * d * d;
    const double resid = d * d * d / 3.0 - 0.25 * d * d * d;  // = d^3/12
    m.sd_i_resid = std::sqrt(resid);
    return m;
}

}  // namespace

double gamma_riemann(const ObservedPath& obs, const funcspace::FunctionSpec& f) {
    validate(obs);
    std::vector<double> y(obs.values.size());
    f.eval_block(obs.values.data(), y.data(), y.size());
    return obs.grid.delta * simd::kernels().sum_stride4(y.data(), y.size());
}

double gamma_fine(const SamplePath& path, const funcspace::FunctionSpec& f) {
    validate(path);
    const std::size_t n = static_cast<std::size_t>(path.grid.steps_n);
    std::vector<double> y(n);
    f.eval_block(path.values.data(), y.data(), n);
    return path.grid.delta * simd::kernels().sum_stride4(y.data(), n);
}

double ergodic_average(const ObservedPath& obs, const funcspace::FunctionSpec& f) {
    return gamma_riemann(obs, f) / obs.grid.horizon_T;
}

GaussExactChain simulate_gauss_exact_chain(GaussProcess which, const TimeGrid& grid,
                                           const processes::InitialLaw& init, SeedSpec seed) {
    validate(grid);
    const std::size_t n = static_cast<std::size_t>(grid.steps_n);
    const CellMoments m = (which == GaussProcess::ou) ? ou_moments(grid.delta)
                                                      : bm_moments(grid.delta);
    const double beta = m.cov_xi / (m.sd_x * m.sd_x);  // regression of I on X

    GaussExactChain chain;
    chain.states.resize(n + 1);
    chain.integrals.resize(n);

    rng::NormalStream ns(seed);
    if (init.kind() == processes::InitialLaw::Kind::stationary) {
        if (which == GaussProcess::bm)
            throw std::domain_error("exact gaussian chain: BM has no stationary start");
        rng::NormalStream is(seed, rng::StreamTag::initial);
        chain.states[0] = is.next();
    } else if (init.kind() == processes::InitialLaw::Kind::point) {
        chain.states[0] = init.point_value();
    } else {
        rng::UniformStream us(seed, rng::StreamTag::initial);
        chain.states[0] = init.sample(us.next_halfopen01());
    }

    std::vector<double> z(2 * n);
    ns.fill(z.data(), 2 * n);
    for (std::size_t k = 0; k < n; ++k) {
        const double x = chain.states[k];
        const double xt = m.sd_x * z[2 * k];               // centered endpoint
        const double it = beta * xt + m.sd_i_resid * z[2 * k + 1];
        chain.states[k + 1] = m.mean_x_factor * x + xt;
        chain.integrals[k] = m.mean_i_factor * x + it;
    }
    return chain;
}

namespace {

std::pair<ObservedPath, double> exact_pair(GaussProcess which, const TimeGrid& grid,
                                           const processes::InitialLaw& init, SeedSpec seed) {
    const GaussExactChain chain = simulate_gauss_exact_chain(which, grid, init, seed);
    ObservedPath obs;
    obs.grid = grid;
    obs.values.assign(chain.states.begin(), chain.states.end() - 1);
    double gamma = simd::kernels().sum_stride4(chain.integrals.data(), chain.integrals.size());
    return {std::move(obs), gamma};
}

}  // namespace

std::pair<ObservedPath, double> simulate_ou_with_exact_integral(const TimeGrid& grid,
                                                                const processes::InitialLaw& init,
                                                                SeedSpec seed) {
    return exact_pair(GaussProcess::ou, grid, init, seed);
}

std::pair<ObservedPath, double> simulate_bm_with_exact_integral(const TimeGrid& grid,
                                                                const processes::InitialLaw& init,
                                                                SeedSpec seed) {
    return exact_pair(GaussProcess::bm, grid, init, seed);
}

}  // namespace otk::functionals
