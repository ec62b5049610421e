// Acceptance suite: one checkable criterion per --criterion index, each
// printing a single PASS/FAIL line (plus measurement details) and returning
// a nonzero exit code on failure. Run all criteria with no arguments.

#include <cmath>
#include <complex>
#include <cstdio>
#include <cstring>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "otk/experiments.hpp"
#include "otk/functionals.hpp"
#include "otk/quadrature.hpp"
#include "otk/spectral.hpp"

using namespace otk;
using experiments::ProcessConfig;
using funcspace::FunctionSpec;
using processes::InitialLaw;

namespace {

constexpr std::uint64_t kMasterSeed = 20240810;
constexpr double kInf = std::numeric_limits<double>::infinity();

int g_failures = 0;

void report(int idx, bool ok, const std::string& what, const std::string& detail) {
    std::printf("[%s] criterion %2d: %s (%s)\n", ok ? "PASS" : "FAIL", idx, what.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

ProcessConfig ou_cfg() {
    ProcessConfig cfg;
    cfg.model = experiments::OuCfg{};
    return cfg;
}

processes::JumpProcess three_state_chain() {
    processes::JumpProcess jp;
    jp.rate_lambda = 1.0;
    jp.states = 3;
    jp.transition_P = {0.5, 0.3, 0.2, 0.3, 0.4, 0.3, 0.2, 0.3, 0.5};
    jp.stationary_mu = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    return jp;
}

const std::vector<double> kJumpTarget{1.0, -0.7, 0.2};

FunctionSpec jump_target_spec() {
    return FunctionSpec::tabulated({0.0, 1.0, 2.0}, kJumpTarget);
}

const std::vector<std::int64_t> kSweepNs{8, 16, 32, 64, 128};
constexpr std::size_t kSweepReps = 20000;

// ---------------------------------------------------------------- criterion 1
void criterion_closed_form_bm() {
    ProcessConfig cfg;
    cfg.model = experiments::BmCfg{};
    cfg.init = InitialLaw::point(0.0);
    bool ok = true;
    std::string detail;
    for (std::int64_t n : {16, 64, 256}) {
        const TimeGrid g = make_grid(1.0, n);
        const auto est =
            experiments::mc_l2_error(cfg, FunctionSpec::identity(), g, 1, 100000, {kMasterSeed, 0});
        const double target = std::sqrt(1.0) * g.delta / std::sqrt(3.0);
        const double rms = std::sqrt(est.mean_sq);
        const double rel = std::fabs(rms - target) / target;
        ok = ok && rel <= 0.02;
        detail += "n=" + std::to_string(n) + " rel=" + std::to_string(rel) + " ";
    }
    report(1, ok, "BM + identity RMS equals sqrt(T) delta / sqrt(3) within 2%", detail);
}

// ---------------------------------------------------------------- criterion 2
void criterion_spectral_vs_mc() {
    bool ok = true;
    std::string detail;
    auto check_instance = [&](const ProcessConfig& cfg, const FunctionSpec& f,
                              const spectral::SpectralModel& model, int refinement,
                              const char* tag) {
        for (std::int64_t n : {8, 32}) {
            const TimeGrid g = make_grid(1.0, n);
            const auto est = experiments::mc_l2_error(cfg, f, g, refinement, 100000,
                                                      {kMasterSeed + 2, 0});
            const double exact = spectral::exact_sq_error(model, g);
            const double z = (est.mean_sq - exact) / est.std_error;
            ok = ok && std::fabs(z) <= 3.0;
            detail += std::string(tag) + "/n" + std::to_string(n) + " z=" +
                      std::to_string(z).substr(0, 5) + " ";
        }
    };

    const auto id = FunctionSpec::identity();
    check_instance(ou_cfg(), id, spectral::hermite_decompose(id, 8, 64), 64, "ou-id");
    const auto h2 = FunctionSpec::hermite(2);
    check_instance(ou_cfg(), h2, spectral::hermite_decompose(h2, 8, 64), 512, "ou-h2");

    const auto jp = three_state_chain();
    ProcessConfig jcfg;
    jcfg.model = experiments::JumpCfg{jp};
    check_instance(jcfg, jump_target_spec(), spectral::jump_decompose(jp, kJumpTarget), 512,
                   "jump");

    report(2, ok, "MC mean squared error within 3 standard errors of the spectral value",
           detail);
}

// ---------------------------------------------------------------- criterion 3
void criterion_dual_oracle() {
    std::mt19937_64 gen(kMasterSeed + 3);
    std::uniform_int_distribution<int> sdist(2, 10);
    std::uniform_int_distribution<int> ndist(4, 64);
    std::uniform_real_distribution<double> unif(0.05, 1.0);
    std::uniform_real_distribution<double> fdist(-2.0, 2.0);
    bool ok = true;
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const int S = sdist(gen);
        std::vector<double> w(static_cast<std::size_t>(S) * S, 0.0);
        for (int x = 0; x < S; ++x)
            for (int y = x + 1; y < S; ++y) {
                const double v = unif(gen);
                w[static_cast<std::size_t>(x) * S + y] = v;
                w[static_cast<std::size_t>(y) * S + x] = v;
            }
        double maxrow = 0.0;
        for (int x = 0; x < S; ++x) {
            double row = 0.0;
            for (int y = 0; y < S; ++y) row += w[static_cast<std::size_t>(x) * S + y];
            maxrow = std::max(maxrow, row);
        }
        processes::JumpProcess jp;
        jp.states = S;
        jp.rate_lambda = 0.5 + 1.5 * unif(gen);
        jp.transition_P.assign(static_cast<std::size_t>(S) * S, 0.0);
        for (int x = 0; x < S; ++x) {
            double off = 0.0;
            for (int y = 0; y < S; ++y)
                if (y != x) {
                    const double v = w[static_cast<std::size_t>(x) * S + y] / (1.1 * maxrow);
                    jp.transition_P[static_cast<std::size_t>(x) * S + y] = v;
                    off += v;
                }
            jp.transition_P[static_cast<std::size_t>(x) * S + x] = 1.0 - off;
        }
        jp.stationary_mu.assign(static_cast<std::size_t>(S), 1.0 / S);
        std::vector<double> f(static_cast<std::size_t>(S));
        for (auto& v : f) v = fdist(gen);
        const TimeGrid g = make_grid(1.0, ndist(gen));
        const double via_psi = spectral::exact_sq_error(spectral::jump_decompose(jp, f), g);
        const double via_expm = spectral::exact_sq_error_jump_bruteforce(jp, f, g);
        const double rel = std::fabs(via_psi - via_expm) / std::fabs(via_expm);
        worst = std::max(worst, rel);
        ok = ok && rel <= 1e-8;
    }
    report(3, ok, "psi-sum equals the matrix-exponential double sum on 10 random chains",
           "max rel diff = " + std::to_string(worst));
}

// ------------------------------------------------------- criteria 4-7 sweeps
experiments::RateFit sweep_c4() {
    return experiments::rate_sweep(ou_cfg(), FunctionSpec::identity(), 1.0, kSweepNs, 64,
                                   kSweepReps, {kMasterSeed + 4, 0});
}

experiments::RateFit sweep_c5() {
    return experiments::rate_sweep(ou_cfg(), FunctionSpec::indicator(0.0, kInf), 1.0, kSweepNs,
                                   64, kSweepReps, {kMasterSeed + 5, 0});
}

experiments::RateFit sweep_c6() {
    return experiments::rate_sweep(ou_cfg(), FunctionSpec::holder_abs(0.5, 4.0), 1.0, kSweepNs,
                                   64, kSweepReps, {kMasterSeed + 6, 0});
}

experiments::RateFit sweep_c7() {
    ProcessConfig jcfg;
    jcfg.model = experiments::JumpCfg{three_state_chain()};
    return experiments::rate_sweep(jcfg, jump_target_spec(), 1.0, kSweepNs, 64, kSweepReps,
                                   {kMasterSeed + 7, 0});
}

void criterion_rate_smooth() {
    const auto fit = sweep_c4();
    const bool ok = fit.slope >= 0.9 && fit.slope <= 1.1 && fit.r_squared >= 0.99;
    report(4, ok, "OU + identity sweep slope in [0.9, 1.1] with r^2 >= 0.99",
           "slope = " + std::to_string(fit.slope) + ", r^2 = " + std::to_string(fit.r_squared));
}

void criterion_rate_indicator() {
    const auto fit = sweep_c5();
    const bool ok = fit.slope >= 0.65 && fit.slope <= 0.85;
    report(5, ok, "OU + half-line indicator sweep slope in [0.65, 0.85]",
           "slope = " + std::to_string(fit.slope));
}

void criterion_rate_holder() {
    const auto fit = sweep_c6();
    const bool ok = fit.slope >= 0.65 && fit.slope <= 0.85;
    report(6, ok, "OU + clamped sqrt(|x|) sweep slope in [0.65, 0.85]",
           "slope = " + std::to_string(fit.slope));
}

void criterion_rate_jump() {
    const auto fit = sweep_c7();
    const bool ok = fit.slope >= 0.9 && fit.slope <= 1.1;
    report(7, ok, "3-state jump chain sweep slope in [0.9, 1.1]",
           "slope = " + std::to_string(fit.slope));
}

// ---------------------------------------------------------------- criterion 8
void criterion_ergodic() {
    const std::vector<double> Ts{25.0, 50.0, 100.0, 200.0, 400.0};
    const auto fit = experiments::ergodic_sweep(ou_cfg(), FunctionSpec::identity(), Ts, 0.25,
                                                2000, {kMasterSeed + 8, 0});
    bool ok = fit.slope >= -0.6 && fit.slope <= -0.4;

    // high-frequency sampling buys essentially nothing at fixed T
    const auto fine = experiments::ergodic_sweep(ou_cfg(), FunctionSpec::identity(), Ts, 0.0625,
                                                 2000, {kMasterSeed + 8, 0});
    const double rms_coarse = fit.points.back().rms;
    const double rms_fine = fine.points.back().rms;
    const double rel = std::fabs(rms_coarse - rms_fine) / rms_fine;
    ok = ok && rel < 0.25;

    // fitted constant against the spectral long-run variance at lambda = -1
    const double predicted = std::sqrt(spectral::psi_ergodic({-1.0, 0.0}, 400.0).real() * 400.0);
    const double fitted = std::exp(fit.intercept);
    const double factor = fitted / predicted;

    report(8, ok,
           "ergodic sweep slope in [-0.6, -0.4]; delta vs delta/4 differ < 25% at T = 400",
           "slope = " + std::to_string(fit.slope) + ", rel change = " + std::to_string(rel) +
               ", fitted/spectral constant = " + std::to_string(factor));
}

// ---------------------------------------------------------------- criterion 9
std::complex<double> psi_diag_quad_oracle(std::complex<double> lam, std::int64_t n,
                                          double delta) {
    const auto& rule = quad::gauss_legendre(48);
    std::complex<double> tri = 0.0, single = 0.0;
    for (int i = 0; i < 48; ++i) {
        const double h = 0.5 * delta * (rule.nodes[i] + 1.0);
        const double wh = 0.5 * delta * rule.weights[i];
        std::complex<double> inner = 0.0;
        for (int j = 0; j < 48; ++j) {
            const double t = 0.5 * (rule.nodes[j] + 1.0);
            inner += 0.5 * rule.weights[j] * (std::exp(lam * h * (1.0 - t)) - 1.0);
        }
        tri += wh * h * inner;
        single += wh * (1.0 - std::exp(lam * h));
    }
    return 2.0 * static_cast<double>(n) * (tri + delta * single);
}

void criterion_psi_properties() {
    std::mt19937_64 gen(kMasterSeed + 9);
    std::uniform_real_distribution<double> logmod(std::log(1e-6), std::log(1e6));
    std::uniform_real_distribution<double> angle(M_PI / 2.0, 3.0 * M_PI / 2.0);
    std::uniform_real_distribution<double> sdist(0.0, 1.0);
    const std::int64_t n = 16;
    const double delta = 1.0 / 16.0;

    std::size_t violations = 0;
    for (int i = 0; i < 10000; ++i) {
        const std::complex<double> z = std::polar(std::exp(logmod(gen)), angle(gen));
        const double s = sdist(gen);
        if (std::abs(1.0 - std::exp(z)) > 2.0 * std::pow(std::abs(z), s) * (1.0 + 1e-12))
            ++violations;
        const std::complex<double> lam = z / delta;
        const double psi = std::abs(spectral::psi_diag(lam, n, delta));
        const double env = 4.0 * static_cast<double>(n) * std::pow(delta, 2.0 + s) *
                           std::pow(std::abs(lam), s);
        if (psi > env * (1.0 + 1e-12)) ++violations;
    }

    double max_rel = 0.0;
    std::uniform_real_distribution<double> logmod2(std::log(1e-3), std::log(20.0));
    for (int i = 0; i < 64; ++i) {
        const std::complex<double> z = std::polar(std::exp(logmod2(gen)), angle(gen));
        const std::complex<double> lam = z / delta;
        const std::complex<double> closed = spectral::psi_diag(lam, n, delta);
        const std::complex<double> q = psi_diag_quad_oracle(lam, n, delta);
        max_rel = std::max(max_rel, std::abs(closed - q) / std::abs(q));
    }

    const bool ok = violations == 0 && max_rel <= 1e-8;
    report(9, ok, "psi bounds hold on 10^4 samples; closed form matches quadrature to 1e-8",
           "violations = " + std::to_string(violations) +
               ", max quadrature rel = " + std::to_string(max_rel));
}

// --------------------------------------------------------------- criterion 10
void criterion_bound_ledger() {
    constexpr double kC = 8.0;
    bool ok = true;
    double worst = 0.0;
    std::string detail;

    auto ledger = [&](const experiments::RateFit& fit, double s, double norm, const char* tag) {
        const auto rep = experiments::bound_check(fit, 1.0, s, norm, kC);
        ok = ok && rep.ok;
        worst = std::max(worst, rep.max_ratio);
        detail += std::string(tag) + " max ratio " + std::to_string(rep.max_ratio) + "; ";
    };

    // smooth case: ||identity||_{D^1} = 1
    const auto id_model = spectral::hermite_decompose(FunctionSpec::identity(), 8, 64);
    ledger(sweep_c4(), 1.0, spectral::ds_norm(id_model, 1.0).value, "ou-id(s=1)");

    // indicator: the dimension-free indicator envelope at s = 1/2
    ledger(sweep_c5(), 0.5, 1.0, "ou-ind(s=1/2)");

    // Hoelder alpha = 1/2 with the grid Hoelder norm
    const auto holder = FunctionSpec::holder_abs(0.5, 4.0);
    const double hnorm = funcspace::holder_norm(holder, 0.5, -4.5, 4.5, 513);
    ledger(sweep_c6(), 0.5, hnorm, "ou-holder(s=1/2)");

    // jump chain at full rate with its exact D^1 norm
    const auto jmodel = spectral::jump_decompose(three_state_chain(), kJumpTarget);
    ledger(sweep_c7(), 1.0, spectral::ds_norm(jmodel, 1.0).value, "jump(s=1)");

    report(10, ok, "every sweep point satisfies rms <= 8 norm sqrt(T) delta^{(1+s)/2}", detail);
}

// --------------------------------------------------------------- criterion 11
void criterion_folding_stability() {
    const auto eta = InitialLaw::density([](double) { return 0.5; }, -1.0, 1.0);
    const auto f = FunctionSpec::indicator(0.0, kInf);
    std::vector<std::vector<double>> rms_by_m;
    for (double M : {4.0, 8.0}) {
        ProcessConfig cfg;
        cfg.model = experiments::ReflectedBmCfg{M};
        cfg.init = eta;
        const auto fit =
            experiments::rate_sweep(cfg, f, 1.0, kSweepNs, 64, kSweepReps, {kMasterSeed + 11, 0});
        std::vector<double> rms;
        for (const auto& p : fit.points) rms.push_back(p.rms);
        rms_by_m.push_back(rms);
    }
    double max_rel = 0.0;
    for (std::size_t k = 0; k < rms_by_m[0].size(); ++k)
        max_rel = std::max(max_rel,
                           std::fabs(rms_by_m[1][k] - rms_by_m[0][k]) / rms_by_m[0][k]);
    const bool ok = max_rel < 0.05;
    report(11, ok, "reflected-BM indicator sweep stable in the barrier level (M = 4 vs 8)",
           "max rel change = " + std::to_string(max_rel));
}

}  // namespace

int main(int argc, char** argv) {
    int which = 0;
    for (int i = 1; i + 1 < argc; ++i)
        if (std::strcmp(argv[i], "--criterion") == 0) which = std::atoi(argv[i + 1]);

    using Runner = void (*)();
    const Runner runners[] = {
        criterion_closed_form_bm, criterion_spectral_vs_mc, criterion_dual_oracle,
        criterion_rate_smooth,    criterion_rate_indicator, criterion_rate_holder,
        criterion_rate_jump,      criterion_ergodic,        criterion_psi_properties,
        criterion_bound_ledger,   criterion_folding_stability,
    };
    if (which >= 1 && which <= 11) {
        runners[which - 1]();
    } else {
        for (const auto& run : runners) run();
    }
    return g_failures == 0 ? 0 : 1;
}
