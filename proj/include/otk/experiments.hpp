#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "otk/core.hpp"
#include "otk/funcspace.hpp"
#include "otk/processes.hpp"

namespace otk::experiments {

struct OuCfg {};
struct BmCfg {};
struct ReflectedBmCfg {
    double halfwidth = 1.0;
};
struct JumpCfg {
    processes::JumpProcess jp;
};
struct DiffusionCfg {
    std::function<double(double)> b;
    std::function<double(double)> sigma;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
};
using ProcessModel = std::variant<OuCfg, BmCfg, ReflectedBmCfg, JumpCfg, DiffusionCfg>;

struct ProcessConfig {
    ProcessModel model;
    processes::InitialLaw init = processes::InitialLaw::stationary();
    std::string name() const;
};

// Monte Carlo estimate of ||Gamma - Gamma_hat||^2_{L2(P)}.
struct ErrorEstimate {
    double mean_sq = 0.0;
    double std_error = 0.0;  // standard error of mean_sq
    std::size_t reps = 0;
    std::string config_digest;
};

struct SweepPoint {
    double abscissa = 0.0;  // delta for rate sweeps, T for ergodic sweeps
    double rms = 0.0;
    double rms_std_error = 0.0;  // delta-method from the mean-square error
    double mean_sq = 0.0;
    double mean_sq_std_error = 0.0;
    bool excluded = false;  // zero error; left out of the regression
};

// Log-log regression output.
struct RateFit {
    std::vector<SweepPoint> points;
    double slope = 0.0;
    double intercept = 0.0;  // log of the fitted constant
    double r_squared = 0.0;
};

struct BoundReport {
    double constant = 8.0;
    double s = 1.0;
    double norm_value = 1.0;
    std::vector<double> ratios;  // rms / (norm sqrt(T) delta^{(1+s)/2}) per point
    double max_ratio = 0.0;
    bool ok = true;  // max_ratio <= constant
};

struct NonstationaryReport {
    RateFit fit;
    BoundReport bound;         // ratios already divided by sup_density^{1/2}
    double sup_density = 1.0;  // ||d eta / d mu||_inf
};

int worker_threads();
void set_worker_threads(int n);  // <= 1 forces serial execution

// Simulates `reps` stationary replications on the fine grid (refinement_m
// fine steps per observation step) and averages (gamma_true - gamma_hat)^2.
// OU/BM with the identity target use the exact-gaussian truth instead.
ErrorEstimate mc_l2_error(const ProcessConfig& cfg, const funcspace::FunctionSpec& f,
                          const TimeGrid& grid, int refinement_m, std::size_t reps,
                          SeedSpec seed);

// One mc_l2_error per n with common random numbers (one finest-grid
// simulation per replication, subsampled), then OLS of log rms on log delta.
RateFit rate_sweep(const ProcessConfig& cfg, const funcspace::FunctionSpec& f, double T,
                   const std::vector<std::int64_t>& ns, int refinement_m, std::size_t reps,
                   SeedSpec seed);

// rms <= constant * norm * sqrt(T) * delta^{(1+s)/2} at every sweep point.
BoundReport bound_check(const RateFit& fit, double T, double s, double norm_value,
                        double constant = 8.0);

// RMS of (ergodic average - int f dmu) against T at fixed delta.
RateFit ergodic_sweep(const ProcessConfig& cfg, const funcspace::FunctionSpec& f,
                      const std::vector<double>& Ts, double delta, std::size_t reps,
                      SeedSpec seed);

// Sweep started from a non-invariant density eta; checks the bound inflated
// by ||d eta/d mu||_inf^{1/2}.
NonstationaryReport nonstationary_check(const ProcessConfig& cfg,
                                        const funcspace::FunctionSpec& f, double T,
                                        const std::vector<std::int64_t>& ns, int refinement_m,
                                        std::size_t reps, SeedSpec seed, double s,
                                        double norm_value, double sup_density,
                                        double constant = 8.0);

// int f dmu for the configured process's invariant law.
double mu_integral(const ProcessConfig& cfg, const funcspace::FunctionSpec& f);

std::uint64_t fnv1a64(const std::string& text);
std::string digest_string(const std::string& text);

}  // namespace otk::experiments
