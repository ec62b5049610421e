#include "otk/processes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "otk/quadrature.hpp"
#include "otk/rng.hpp"
#include "otk/simd/kernels.hpp"

namespace otk::processes {
namespace {

constexpr int kCdfKnots = 4096;         // inverse-CDF tabulation resolution
constexpr double kDefaultWindow = 16.0;  // stationary-sampling window for unbounded diffusions

std::vector<double> build_cdf_table(const std::function<double(double)>& pdf, double lo,
                                    double hi) {
    std::vector<double> cdf(kCdfKnots + 1, 0.0);
    const double h = (hi - lo) / kCdfKnots;
    double acc = 0.0;
    double prev = std::max(pdf(lo), 0.0);
    for (int i = 1; i <= kCdfKnots; ++i) {
        const double cur = std::max(pdf(lo + i * h), 0.0);
        acc += 0.5 * (prev + cur) * h;
        cdf[static_cast<std::size_t>(i)] = acc;
        prev = cur;
    }
    if (!(acc > 0.0) || !std::isfinite(acc))
        throw std::domain_error("InitialLaw: density has no positive mass on its support");
    for (auto& v : cdf) v /= acc;
    return cdf;
}

double sample_state(const std::vector<double>& probs, double u) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
        acc += probs[i];
        if (u < acc) return static_cast<double>(i);
    }
    return static_cast<double>(probs.size() - 1);
}

double draw_initial(const InitialLaw& init, SeedSpec seed,
                    const std::function<double()>& stationary_draw) {
    switch (init.kind()) {
        case InitialLaw::Kind::point: return init.point_value();
        case InitialLaw::Kind::density: {
            rng::UniformStream us(seed, rng::StreamTag::initial);
            return init.sample(us.next_halfopen01());
        }
        case InitialLaw::Kind::stationary: default: return stationary_draw();
    }
}

}  // namespace

void JumpProcess::validate(bool require_reversible) const {
    if (states < 1 || transition_P.size() != static_cast<std::size_t>(states) * states ||
        stationary_mu.size() != static_cast<std::size_t>(states))
        throw std::domain_error("JumpProcess: inconsistent dimensions");
    if (!(rate_lambda > 0.0)) throw std::domain_error("JumpProcess: rate must be positive");
    double mu_sum = 0.0;
    for (int x = 0; x < states; ++x) {
        double row = 0.0;
        for (int y = 0; y < states; ++y) {
            if (p(x, y) < 0.0) throw std::domain_error("JumpProcess: negative transition entry");
            row += p(x, y);
        }
        if (std::fabs(row - 1.0) > 1e-12)
            throw std::domain_error("JumpProcess: row of P does not sum to 1");
        if (stationary_mu[static_cast<std::size_t>(x)] < 0.0)
            throw std::domain_error("JumpProcess: negative stationary mass");
        mu_sum += stationary_mu[static_cast<std::size_t>(x)];
    }
    if (std::fabs(mu_sum - 1.0) > 1e-12)
        throw std::domain_error("JumpProcess: stationary law does not sum to 1");
    for (int y = 0; y < states; ++y) {
        double v = 0.0;
        for (int x = 0; x < states; ++x) v += stationary_mu[static_cast<std::size_t>(x)] * p(x, y);
        if (std::fabs(v - stationary_mu[static_cast<std::size_t>(y)]) > 1e-10)
            throw std::domain_error("JumpProcess: mu is not stationary for P");
    }
    if (require_reversible && !is_reversible())
        throw std::domain_error("JumpProcess: transition matrix must be symmetric");
}

bool JumpProcess::is_reversible(double tol) const {
    for (int x = 0; x < states; ++x)
        for (int y = x + 1; y < states; ++y)
            if (std::fabs(p(x, y) - p(y, x)) > tol) return false;
    return true;
}

InitialLaw InitialLaw::stationary() { return InitialLaw{}; }

InitialLaw InitialLaw::point(double x0) {
    InitialLaw law;
    law.kind_ = Kind::point;
    law.point_ = x0;
    return law;
}

InitialLaw InitialLaw::density(std::function<double(double)> pdf, double support_lo,
                               double support_hi) {
    if (!(support_lo < support_hi)) throw std::domain_error("InitialLaw: empty support");
    InitialLaw law;
    law.kind_ = Kind::density;
    law.lo_ = support_lo;
    law.hi_ = support_hi;
    law.pdf_ = std::move(pdf);
    const double mass =
        otk::quad::integrate_gl_composite(law.pdf_, support_lo, support_hi, 16, 512);
    if (std::fabs(mass - 1.0) > 1e-6)
        throw std::domain_error("InitialLaw: density must integrate to 1 on its support");
    law.cdf_ = std::make_shared<const std::vector<double>>(
        build_cdf_table(law.pdf_, support_lo, support_hi));
    return law;
}

double InitialLaw::sample(double u01) const {
    if (kind_ != Kind::density) throw std::logic_error("InitialLaw::sample: not a density law");
    const auto& cdf = *cdf_;
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u01);
    std::size_t j = static_cast<std::size_t>(it - cdf.begin());
    if (j == 0) j = 1;
    if (j >= cdf.size()) j = cdf.size() - 1;
    const double h = (hi_ - lo_) / kCdfKnots;
    const double c0 = cdf[j - 1], c1 = cdf[j];
    const double t = (c1 > c0) ? (u01 - c0) / (c1 - c0) : 0.0;
    return lo_ + (static_cast<double>(j - 1) + t) * h;
}

SamplePath simulate_ou(const TimeGrid& grid, const InitialLaw& init, SeedSpec seed) {
    validate(grid);
    const std::size_t n = static_cast<std::size_t>(grid.steps_n);
    const double a = std::exp(-grid.delta);
    const double s = std::sqrt(-std::expm1(-2.0 * grid.delta));
    rng::NormalStream ns(seed);
    SamplePath path;
    path.grid = grid;
    path.values.resize(n + 1);
    path.values[0] = draw_initial(init, seed, [&seed] {
        rng::NormalStream is(seed, rng::StreamTag::initial);
        return is.next();
    });
    std::vector<double> z(n);
    ns.fill(z.data(), n);
    for (std::size_t k = 0; k < n; ++k) path.values[k + 1] = a * path.values[k] + s * z[k];
    return path;
}

SamplePath simulate_bm(const TimeGrid& grid, const InitialLaw& init, SeedSpec seed) {
    validate(grid);
    if (init.kind() == InitialLaw::Kind::stationary)
        throw std::domain_error("simulate_bm: needs a compactly supported density or point start");
    const std::size_t n = static_cast<std::size_t>(grid.steps_n);
    const double sd = std::sqrt(grid.delta);
    rng::NormalStream ns(seed);
    SamplePath path;
    path.grid = grid;
    path.values.resize(n + 1);
    path.values[0] = draw_initial(init, seed, [] { return 0.0; });
    std::vector<double> z(n);
    ns.fill(z.data(), n);
    for (std::size_t k = 0; k < n; ++k) path.values[k + 1] = path.values[k] + sd * z[k];
    return path;
}

double fold(double x, double M) {
    if (!(M > 0.0)) throw std::domain_error("fold: M must be positive");
    double y;
    simd::kernels().map_fold(&x, &y, 1, M);
    return y;
}

SamplePath simulate_reflected_bm(const TimeGrid& grid, double M, const InitialLaw& init,
                                 SeedSpec seed) {
    if (!(M > 0.0)) throw std::domain_error("simulate_reflected_bm: M must be positive");
    InitialLaw start = init;
    if (init.kind() == InitialLaw::Kind::stationary) {
        // invariant law of the reflected motion: uniform on [-M, M]
        start = InitialLaw::density([M](double) { return 0.5 / M; }, -M, M);
    } else if (init.kind() == InitialLaw::Kind::point) {
        if (std::fabs(init.point_value()) > M)
            throw std::domain_error("simulate_reflected_bm: start outside [-M, M]");
    } else {
        if (init.support_lo() < -M || init.support_hi() > M)
            throw std::domain_error("simulate_reflected_bm: start law not supported in [-M, M]");
    }
    SamplePath path = simulate_bm(grid, start, seed);
    simd::kernels().map_fold(path.values.data(), path.values.data(), path.values.size(), M);
    return path;
}

SamplePath simulate_jump(const TimeGrid& grid, const JumpProcess& jp, const InitialLaw& init,
                         SeedSpec seed) {
    validate(grid);
    jp.validate();
    const double mean_events = jp.rate_lambda * grid.horizon_T;
    if (mean_events > 700.0)
        throw std::domain_error("simulate_jump: lambda*T beyond the supported range (700)");

    rng::UniformStream events(seed, rng::StreamTag::events);

    double state;
    if (init.kind() == InitialLaw::Kind::stationary) {
        rng::UniformStream is(seed, rng::StreamTag::initial);
        state = sample_state(jp.stationary_mu, is.next_halfopen01());
    } else if (init.kind() == InitialLaw::Kind::point) {
        const int s0 = static_cast<int>(std::llround(init.point_value()));
        if (s0 < 0 || s0 >= jp.states)
            throw std::domain_error("simulate_jump: point start is not a valid state");
        state = static_cast<double>(s0);
    } else {
        throw std::domain_error("simulate_jump: start law must be stationary or a point state");
    }

    // N ~ Poisson(lambda T) by Knuth's product, then N uniform event times
    const double floor_p = std::exp(-mean_events);
    std::size_t n_events = 0;
    double prod = events.next_open01();
    while (prod > floor_p) {
        ++n_events;
        prod *= events.next_open01();
    }
    std::vector<double> times(n_events);
    for (auto& t : times) t = grid.horizon_T * events.next_halfopen01();
    std::sort(times.begin(), times.end());

    const std::size_t n = static_cast<std::size_t>(grid.steps_n);
    SamplePath path;
    path.grid = grid;
    path.values.resize(n + 1);
    std::size_t e = 0;
    for (std::size_t k = 0; k <= n; ++k) {
        const double t = grid.delta * static_cast<double>(k);
        while (e < n_events && times[e] <= t) {
            const int x = static_cast<int>(state);
            double u = events.next_halfopen01();
            double acc = 0.0;
            int y = jp.states - 1;
            for (int j = 0; j < jp.states; ++j) {
                acc += jp.p(x, j);
                if (u < acc) { y = j; break; }
            }
            state = static_cast<double>(y);
            ++e;
        }
        path.values[k] = state;
    }
    return path;
}

SamplePath simulate_scalar_diffusion(const TimeGrid& grid, const std::function<double(double)>& b,
                                     const std::function<double(double)>& sigma, double bound_lo,
                                     double bound_hi, const InitialLaw& init, SeedSpec seed) {
    validate(grid);
    const bool lo_finite = std::isfinite(bound_lo);
    const bool hi_finite = std::isfinite(bound_hi);
    const double probe_lo = lo_finite ? bound_lo : -kDefaultWindow;
    const double probe_hi = hi_finite ? bound_hi : kDefaultWindow;
    for (int i = 0; i <= 1024; ++i) {
        const double x = probe_lo + (probe_hi - probe_lo) * i / 1024.0;
        if (!(sigma(x) > 0.0))
            throw std::domain_error("simulate_scalar_diffusion: volatility touches zero");
    }

    InitialLaw start = init;
    if (init.kind() == InitialLaw::Kind::stationary)
        start = stationary_diffusion_law(b, sigma, bound_lo, bound_hi);

    const std::size_t n = static_cast<std::size_t>(grid.steps_n);
    const double sqdt = std::sqrt(grid.delta);
    rng::NormalStream ns(seed);
    SamplePath path;
    path.grid = grid;
    path.values.resize(n + 1);
    path.values[0] = draw_initial(start, seed, [] { return 0.0; });
    std::vector<double> z(n);
    ns.fill(z.data(), n);
    double x = path.values[0];
    for (std::size_t k = 0; k < n; ++k) {
        const double vol = sigma(x);
        if (!(vol > 0.0))
            throw std::domain_error("simulate_scalar_diffusion: volatility touches zero");
        x += b(x) * grid.delta + vol * sqdt * z[k];
        if (lo_finite && x < bound_lo) x = bound_lo;
        if (hi_finite && x > bound_hi) x = bound_hi;
        path.values[k + 1] = x;
    }
    return path;
}

InitialLaw stationary_diffusion_law(const std::function<double(double)>& b,
                                    const std::function<double(double)>& sigma, double bound_lo,
                                    double bound_hi) {
    const double lo = std::isfinite(bound_lo) ? bound_lo : -kDefaultWindow;
    const double hi = std::isfinite(bound_hi) ? bound_hi : kDefaultWindow;
    const SpeedDensity sd = speed_density(b, sigma, 0.5 * (lo + hi), bound_lo, bound_hi);
    if (!sd.integrable)
        throw std::domain_error(
            "stationary_diffusion_law: speed density not integrable on the given range");
    const double c0 = sd.normalizer;
    auto m = sd.unnormalized;
    return InitialLaw::density([c0, m](double x) { return c0 * m(x); }, lo, hi);
}

SpeedDensity speed_density(const std::function<double(double)>& b,
                           const std::function<double(double)>& sigma, double x0,
                           double range_lo, double range_hi) {
    auto integrand = [b, sigma](double y) {
        const double s2 = sigma(y) * sigma(y);
        return 2.0 * b(y) / s2;
    };
    auto m = [b, sigma, x0, integrand](double x) {
        const double inner = otk::quad::integrate_adaptive(integrand, x0, x, 1e-10);
        const double s2 = sigma(x) * sigma(x);
        return std::exp(inner) / s2;
    };

    SpeedDensity result;
    result.unnormalized = m;
    const bool lo_inf = !std::isfinite(range_lo);
    const bool hi_inf = !std::isfinite(range_hi);
    double total;
    if (!lo_inf && !hi_inf) {
        total = otk::quad::integrate_adaptive(m, range_lo, range_hi, 1e-10);
        result.integrable = std::isfinite(total) && total > 0.0;
    } else {
        // expanding boxes around x0; divergence shows up as non-stabilizing mass
        double prev = 0.0;
        total = 0.0;
        bool converged = false;
        for (double box = 8.0; box <= 1024.0; box *= 2.0) {
            const double a = lo_inf ? x0 - box : range_lo;
            const double c = hi_inf ? x0 + box : range_hi;
            total = otk::quad::integrate_adaptive(m, a, c, 1e-10);
            if (!std::isfinite(total)) break;
            if (box > 8.0 && std::fabs(total - prev) <= 1e-9 * std::fabs(total)) {
                converged = true;
                break;
            }
            prev = total;
        }
        result.integrable = converged && std::isfinite(total) && total > 0.0;
    }
    result.normalizer = result.integrable ? 1.0 / total : 0.0;
    return result;
}

}  // namespace otk::processes
