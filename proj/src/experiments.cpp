#include "otk/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <thread>

#include "otk/functionals.hpp"
#include "otk/quadrature.hpp"
#include "otk/rng.hpp"
#include "otk/simd/kernels.hpp"

namespace otk::experiments {
namespace {

std::atomic<int> g_threads{0};  // 0 = unresolved

int resolve_threads() {
    if (const char* env = std::getenv("OTK_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

template <class PerRep>
void parallel_reps(std::size_t reps, PerRep&& body) {
    const int threads = worker_threads();
    if (threads <= 1 || reps < 2) {
        for (std::size_t r = 0; r < reps; ++r) body(r);
        return;
    }
    const std::size_t nw = std::min<std::size_t>(static_cast<std::size_t>(threads), reps);
    std::vector<std::thread> pool;
    pool.reserve(nw);
    std::atomic<std::size_t> cursor{0};
    constexpr std::size_t kChunk = 64;
    for (std::size_t w = 0; w < nw; ++w)
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t begin = cursor.fetch_add(kChunk);
                if (begin >= reps) return;
                const std::size_t end = std::min(begin + kChunk, reps);
                for (std::size_t r = begin; r < end; ++r) body(r);
            }
        });
    for (auto& t : pool) t.join();
}

struct MeanStderr {
    double mean = 0.0;
    double std_error = 0.0;
};

// deterministic: plain sequential pass in replication order
MeanStderr mean_and_stderr(const std::vector<double>& xs) {
    MeanStderr out;
    const std::size_t n = xs.size();
    double acc = 0.0;
    for (double x : xs) acc += x;
    out.mean = acc / static_cast<double>(n);
    if (n > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - out.mean) * (x - out.mean);
        out.std_error = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
    }
    return out;
}

bool exact_gaussian_truth(const ProcessConfig& cfg, const funcspace::FunctionSpec& f) {
    const bool gauss = std::holds_alternative<OuCfg>(cfg.model) ||
                       std::holds_alternative<BmCfg>(cfg.model);
    return gauss && f.kind() == funcspace::FuncKind::identity;
}

// resolve a stationary diffusion start once, not per replication
ProcessConfig materialized(const ProcessConfig& cfg) {
    if (const auto* dc = std::get_if<DiffusionCfg>(&cfg.model);
        dc != nullptr && cfg.init.kind() == processes::InitialLaw::Kind::stationary) {
        ProcessConfig out = cfg;
        out.init = processes::stationary_diffusion_law(dc->b, dc->sigma, dc->lo, dc->hi);
        return out;
    }
    return cfg;
}

SamplePath simulate_fine(const ProcessConfig& cfg, const TimeGrid& grid, SeedSpec seed) {
    if (std::holds_alternative<OuCfg>(cfg.model))
        return processes::simulate_ou(grid, cfg.init, seed);
    if (std::holds_alternative<BmCfg>(cfg.model))
        return processes::simulate_bm(grid, cfg.init, seed);
    if (const auto* r = std::get_if<ReflectedBmCfg>(&cfg.model))
        return processes::simulate_reflected_bm(grid, r->halfwidth, cfg.init, seed);
    if (const auto* j = std::get_if<JumpCfg>(&cfg.model))
        return processes::simulate_jump(grid, j->jp, cfg.init, seed);
    const auto& dc = std::get<DiffusionCfg>(cfg.model);
    return processes::simulate_scalar_diffusion(grid, dc.b, dc.sigma, dc.lo, dc.hi, cfg.init,
                                                seed);
}

// per-replication squared errors for every n in the sweep, common drivers
std::vector<std::vector<double>> sweep_sq_errors(const ProcessConfig& cfg,
                                                 const funcspace::FunctionSpec& f, double T,
                                                 const std::vector<std::int64_t>& ns,
                                                 int refinement_m, std::size_t reps,
                                                 SeedSpec seed) {
    if (ns.empty()) throw std::domain_error("sweep: needs at least one n");
    for (std::size_t i = 0; i + 1 < ns.size(); ++i)
        if (ns[i] >= ns[i + 1]) throw std::domain_error("sweep: ns must be strictly increasing");
    if (refinement_m < 1) throw std::domain_error("sweep: refinement must be >= 1");
    const std::int64_t n_max = ns.back();

    std::vector<std::vector<double>> sq(ns.size(), std::vector<double>(reps, 0.0));

    if (exact_gaussian_truth(cfg, f)) {
        const TimeGrid grid = make_grid(T, n_max);
        for (std::int64_t n : ns)
            if (n_max % n != 0)
                throw std::domain_error("sweep: every n must divide the largest n");
        const auto which = std::holds_alternative<OuCfg>(cfg.model)
                               ? functionals::GaussProcess::ou
                               : functionals::GaussProcess::bm;
        parallel_reps(reps, [&](std::size_t r) {
            const SeedSpec rs{seed.master_seed,
                              seed.replication_index + static_cast<std::uint32_t>(r)};
            const auto chain = functionals::simulate_gauss_exact_chain(which, grid, cfg.init, rs);
            double truth = 0.0;
            for (double v : chain.integrals) truth += v;
            for (std::size_t i = 0; i < ns.size(); ++i) {
                const std::int64_t n = ns[i];
                const std::int64_t stride = n_max / n;
                const double dn = T / static_cast<double>(n);
                double acc = 0.0;
                for (std::int64_t k = 0; k < n; ++k)
                    acc += chain.states[static_cast<std::size_t>(k * stride)];
                const double diff = truth - dn * acc;
                sq[i][r] = diff * diff;
            }
        });
        return sq;
    }

    const std::int64_t n_fine = n_max * refinement_m;
    const TimeGrid fine = make_grid(T, n_fine);
    for (std::int64_t n : ns)
        if (n_fine % n != 0)
            throw std::domain_error("sweep: fine grid must refine every n");
    const ProcessConfig ready = materialized(cfg);
    parallel_reps(reps, [&](std::size_t r) {
        const SeedSpec rs{seed.master_seed,
                          seed.replication_index + static_cast<std::uint32_t>(r)};
        const SamplePath path = simulate_fine(ready, fine, rs);
        std::vector<double> y(static_cast<std::size_t>(n_fine));
        f.eval_block(path.values.data(), y.data(), y.size());
        const double truth =
            fine.delta * simd::kernels().sum_stride4(y.data(), y.size());
        for (std::size_t i = 0; i < ns.size(); ++i) {
            const std::int64_t n = ns[i];
            const std::int64_t stride = n_fine / n;
            const double dn = T / static_cast<double>(n);
            double acc = 0.0;
            for (std::int64_t k = 0; k < n; ++k)
                acc += y[static_cast<std::size_t>(k * stride)];
            const double diff = truth - dn * acc;
            sq[i][r] = diff * diff;
        }
    });
    return sq;
}

void fit_loglog(RateFit& fit) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
    std::size_t used = 0;
    for (const auto& p : fit.points) {
        if (p.excluded) continue;
        const double x = std::log(p.abscissa);
        const double y = std::log(p.rms);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
        ++used;
    }
    if (used < 2) throw std::domain_error("rate fit: needs at least two usable points");
    const double n = static_cast<double>(used);
    const double det = n * sxx - sx * sx;
    fit.slope = (n * sxy - sx * sy) / det;
    fit.intercept = (sy - fit.slope * sx) / n;
    const double ss_tot = syy - sy * sy / n;
    double ss_res = 0.0;
    for (const auto& p : fit.points) {
        if (p.excluded) continue;
        const double e = std::log(p.rms) - (fit.slope * std::log(p.abscissa) + fit.intercept);
        ss_res += e * e;
    }
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
}

SweepPoint make_point(double abscissa, const MeanStderr& ms) {
    SweepPoint p;
    p.abscissa = abscissa;
    p.mean_sq = ms.mean;
    p.mean_sq_std_error = ms.std_error;
    if (ms.mean > 0.0) {
        p.rms = std::sqrt(ms.mean);
        p.rms_std_error = ms.std_error / (2.0 * p.rms);
    } else {
        p.excluded = true;
    }
    return p;
}

std::string model_tag(const ProcessModel& model) {
    if (std::holds_alternative<OuCfg>(model)) return "ou";
    if (std::holds_alternative<BmCfg>(model)) return "bm";
    if (std::holds_alternative<ReflectedBmCfg>(model)) return "reflected-bm";
    if (std::holds_alternative<JumpCfg>(model)) return "jump";
    return "euler-diffusion";
}

}  // namespace

std::string ProcessConfig::name() const { return model_tag(model); }

int worker_threads() {
    int v = g_threads.load();
    if (v == 0) {
        v = resolve_threads();
        g_threads.store(v);
    }
    return v;
}

void set_worker_threads(int n) { g_threads.store(n >= 1 ? n : 1); }

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string digest_string(const std::string& text) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(text)));
    return std::string(buf);
}

ErrorEstimate mc_l2_error(const ProcessConfig& cfg, const funcspace::FunctionSpec& f,
                          const TimeGrid& grid, int refinement_m, std::size_t reps,
                          SeedSpec seed) {
    validate(grid);
    if (reps < 100) throw std::domain_error("mc_l2_error: reps must be >= 100");
    const std::vector<std::int64_t> ns{grid.steps_n};
    const auto sq = sweep_sq_errors(cfg, f, grid.horizon_T, ns, refinement_m, reps, seed);
    const MeanStderr ms = mean_and_stderr(sq[0]);
    ErrorEstimate est;
    est.mean_sq = ms.mean;
    est.std_error = ms.std_error;
    est.reps = reps;
    est.config_digest = digest_string(
        "mc_l2_error;process=" + cfg.name() + ";f=" + f.name() +
        ";T=" + std::to_string(grid.horizon_T) + ";n=" + std::to_string(grid.steps_n) +
        ";m=" + std::to_string(refinement_m) + ";reps=" + std::to_string(reps) +
        ";seed=" + std::to_string(seed.master_seed) + ":" +
        std::to_string(seed.replication_index));
    return est;
}

RateFit rate_sweep(const ProcessConfig& cfg, const funcspace::FunctionSpec& f, double T,
                   const std::vector<std::int64_t>& ns, int refinement_m, std::size_t reps,
                   SeedSpec seed) {
    if (ns.size() < 4) throw std::domain_error("rate_sweep: needs at least 4 grid sizes");
    const auto sq = sweep_sq_errors(cfg, f, T, ns, refinement_m, reps, seed);
    RateFit fit;
    fit.points.reserve(ns.size());
    for (std::size_t i = 0; i < ns.size(); ++i)
        fit.points.push_back(make_point(T / static_cast<double>(ns[i]), mean_and_stderr(sq[i])));
    // delta descending
    std::sort(fit.points.begin(), fit.points.end(),
              [](const SweepPoint& a, const SweepPoint& b) { return a.abscissa > b.abscissa; });
    fit_loglog(fit);
    return fit;
}

BoundReport bound_check(const RateFit& fit, double T, double s, double norm_value,
                        double constant) {
    BoundReport report;
    report.constant = constant;
    report.s = s;
    report.norm_value = norm_value;
    for (const auto& p : fit.points) {
        if (p.excluded) continue;  // zero error satisfies any bound
        const double envelope =
            norm_value * std::sqrt(T) * std::pow(p.abscissa, 0.5 * (1.0 + s));
        report.ratios.push_back(p.rms / envelope);
    }
    report.max_ratio = 0.0;
    for (double r : report.ratios) report.max_ratio = std::max(report.max_ratio, r);
    report.ok = report.max_ratio <= constant;
    return report;
}

RateFit ergodic_sweep(const ProcessConfig& cfg, const funcspace::FunctionSpec& f,
                      const std::vector<double>& Ts, double delta, std::size_t reps,
                      SeedSpec seed) {
    if (Ts.size() < 4) throw std::domain_error("ergodic_sweep: needs at least 4 horizons");
    for (std::size_t i = 0; i + 1 < Ts.size(); ++i)
        if (!(Ts[i] < Ts[i + 1]))
            throw std::domain_error("ergodic_sweep: horizons must be increasing");
    if (!(delta > 0.0)) throw std::domain_error("ergodic_sweep: delta must be positive");
    std::vector<std::int64_t> steps(Ts.size());
    for (std::size_t j = 0; j < Ts.size(); ++j) {
        steps[j] = std::llround(Ts[j] / delta);
        if (std::fabs(static_cast<double>(steps[j]) * delta - Ts[j]) > 1e-9 * Ts[j])
            throw std::domain_error("ergodic_sweep: every T must be a multiple of delta");
    }
    const double mu_f = mu_integral(cfg, f);
    const std::int64_t n_max = steps.back();
    const TimeGrid coarse = make_grid(Ts.back(), n_max);

    const bool coarse_exact = std::holds_alternative<OuCfg>(cfg.model) ||
                              std::holds_alternative<ReflectedBmCfg>(cfg.model) ||
                              std::holds_alternative<JumpCfg>(cfg.model);
    if (std::holds_alternative<BmCfg>(cfg.model))
        throw std::domain_error("ergodic_sweep: BM has no invariant probability law");

    std::vector<std::vector<double>> sq(Ts.size(), std::vector<double>(reps, 0.0));
    const ProcessConfig ready = materialized(cfg);
    parallel_reps(reps, [&](std::size_t r) {
        const SeedSpec rs{seed.master_seed,
                          seed.replication_index + static_cast<std::uint32_t>(r)};
        SamplePath path;
        if (coarse_exact) {
            path = simulate_fine(ready, coarse, rs);
        } else {
            const TimeGrid fine = make_grid(Ts.back(), n_max * 64);
            path = simulate_fine(ready, fine, rs);
        }
        const std::int64_t stride = coarse_exact ? 1 : 64;
        std::vector<double> y(static_cast<std::size_t>(n_max));
        std::vector<double> xs(static_cast<std::size_t>(n_max));
        for (std::int64_t k = 0; k < n_max; ++k)
            xs[static_cast<std::size_t>(k)] = path.values[static_cast<std::size_t>(k * stride)];
        f.eval_block(xs.data(), y.data(), y.size());
        double acc = 0.0;
        std::size_t next = 0;
        for (std::int64_t k = 0; k < n_max; ++k) {
            acc += y[static_cast<std::size_t>(k)];
            while (next < steps.size() && k + 1 == steps[next]) {
                const double err = delta * acc / Ts[next] - mu_f;
                sq[next][r] = err * err;
                ++next;
            }
        }
    });

    RateFit fit;
    fit.points.reserve(Ts.size());
    for (std::size_t j = 0; j < Ts.size(); ++j)
        fit.points.push_back(make_point(Ts[j], mean_and_stderr(sq[j])));
    fit_loglog(fit);
    return fit;
}

NonstationaryReport nonstationary_check(const ProcessConfig& cfg,
                                        const funcspace::FunctionSpec& f, double T,
                                        const std::vector<std::int64_t>& ns, int refinement_m,
                                        std::size_t reps, SeedSpec seed, double s,
                                        double norm_value, double sup_density,
                                        double constant) {
    if (!(sup_density > 0.0) || !std::isfinite(sup_density))
        throw std::domain_error("nonstationary_check: sup of d eta/d mu must be finite");
    NonstationaryReport report;
    report.fit = rate_sweep(cfg, f, T, ns, refinement_m, reps, seed);
    report.sup_density = sup_density;
    report.bound =
        bound_check(report.fit, T, s, norm_value * std::sqrt(sup_density), constant);
    return report;
}

double mu_integral(const ProcessConfig& cfg, const funcspace::FunctionSpec& f) {
    if (std::holds_alternative<OuCfg>(cfg.model)) {
        const auto& rule = otk::quad::gauss_hermite_normal(256);
        std::vector<double> y(rule.nodes.size());
        f.eval_block(rule.nodes.data(), y.data(), y.size());
        double acc = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) acc += rule.weights[i] * y[i];
        return acc;
    }
    if (const auto* j = std::get_if<JumpCfg>(&cfg.model)) {
        double acc = 0.0;
        for (int x = 0; x < j->jp.states; ++x)
            acc += f(static_cast<double>(x)) * j->jp.stationary_mu[static_cast<std::size_t>(x)];
        return acc;
    }
    if (const auto* r = std::get_if<ReflectedBmCfg>(&cfg.model)) {
        const double M = r->halfwidth;
        auto g = [&f](double x) { return f(x); };
        return otk::quad::integrate_gl_composite(g, -M, M, 16, 128) / (2.0 * M);
    }
    if (const auto* dc = std::get_if<DiffusionCfg>(&cfg.model)) {
        const auto sd = processes::speed_density(dc->b, dc->sigma, 0.0, dc->lo, dc->hi);
        if (!sd.integrable)
            throw std::domain_error("mu_integral: speed density is not integrable");
        const double lo = std::isfinite(dc->lo) ? dc->lo : -16.0;
        const double hi = std::isfinite(dc->hi) ? dc->hi : 16.0;
        auto g = [&](double x) { return f(x) * sd.unnormalized(x); };
        return sd.normalizer * otk::quad::integrate_adaptive(g, lo, hi, 1e-9);
    }
    throw std::domain_error("mu_integral: process has no invariant probability law");
}

}  // namespace otk::experiments
