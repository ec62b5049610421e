#pragma once

#include <utility>
#include <vector>

#include "otk/core.hpp"
#include "otk/funcspace.hpp"
#include "otk/processes.hpp"

namespace otk::functionals {

enum class TruthKind { fine_grid, exact_gaussian };

struct FunctionalPair {
    double gamma_true = 0.0;
    double gamma_hat = 0.0;
    TruthKind truth_kind = TruthKind::fine_grid;
};

// Left-endpoint Riemann sum over the n observations: sum f(X_{k d}) d.
double gamma_riemann(const ObservedPath& obs, const funcspace::FunctionSpec& f);

// Same rule on the fine grid (the last knot is unused); ground-truth proxy.
double gamma_fine(const SamplePath& path, const funcspace::FunctionSpec& f);

// gamma_riemann / T, the plug-in estimator of int f dmu.
double ergodic_average(const ObservedPath& obs, const funcspace::FunctionSpec& f);

enum class GaussProcess { ou, bm };

// One replication of the jointly Gaussian pair: per grid cell the exact
// bivariate law of (endpoint, integral of the path over the cell) given the
// cell's start point. states has n+1 entries, integrals n entries; the sum of
// integrals is an exact draw of Gamma_T(identity) jointly with the samples.
struct GaussExactChain {
    std::vector<double> states;
    std::vector<double> integrals;
};

GaussExactChain simulate_gauss_exact_chain(GaussProcess which, const TimeGrid& grid,
                                           const processes::InitialLaw& init, SeedSpec seed);

// Observed path plus exact Gamma_T(identity); truth_kind = exact-gaussian.
std::pair<ObservedPath, double> simulate_ou_with_exact_integral(const TimeGrid& grid,
                                                                const processes::InitialLaw& init,
                                                                SeedSpec seed);
std::pair<ObservedPath, double> simulate_bm_with_exact_integral(const TimeGrid& grid,
                                                                const processes::InitialLaw& init,
                                                                SeedSpec seed);

}  // namespace otk::functionals
