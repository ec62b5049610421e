#pragma once

#include <complex>
#include <string>
#include <vector>

#include "otk/core.hpp"
#include "otk/funcspace.hpp"
#include "otk/processes.hpp"

namespace otk::spectral {

// Discrete spectral decomposition {(lambda_k, c_k)} of a normal generator
// acting on a target f: c_k = <f, phi_k>_mu in the mu-orthonormal eigenbasis.
struct SpectralModel {
    std::vector<std::complex<double>> eigenvalues;  // Re <= 0
    std::vector<double> coefficients;
    std::string label;        // "ou-hermite" or "jump-eigen"
    double norm_mu_sq = 0.0;  // reference ||f||_mu^2 for the truncation defect

    double coeff_sq_sum() const;
    double parseval_defect() const;  // norm_mu_sq - sum c_k^2
};

struct DsNorm {
    double s = 0.0;
    double value = 0.0;
    int truncation_K = 0;
};

// Projections of f onto the orthonormalized Hermite basis (Gauss-Hermite
// quadrature with the standard normal weight); eigenvalues -k.
SpectralModel hermite_decompose(const funcspace::FunctionSpec& f, int K, int quad_nodes);

// Eigendecomposition of L = lambda (P - I) for a reversible (symmetric P)
// chain; f given as a state-indexed vector.
SpectralModel jump_decompose(const processes::JumpProcess& jp, const std::vector<double>& f);

// (sum_k |lambda_k|^s c_k^2)^{1/2}; s = -1 requires f centered.
DsNorm ds_norm(const SpectralModel& model, double s);

// Diagonal error function
//   Psi(lambda) = 2n ( iint_{0<r<h<d} (e^{lambda(h-r)} - 1) dr dh
//                      + d int_0^d (1 - e^{lambda h}) dh ),
// evaluated in closed form with a series branch near lambda*d = 0.
std::complex<double> psi_diag(std::complex<double> lambda, std::int64_t n, double delta);

// Off-diagonal error function, via the geometric sum
//   sum_{k>l} e^{lambda (k-l-1) d} = n/(1-e^{lambda d}) - (1-e^{lambda n d})/(1-e^{lambda d})^2.
std::complex<double> psi_offdiag(std::complex<double> lambda, std::int64_t n, double delta);

// Long-run averaging function 2 (e^{lambda T} - 1 - lambda T)/(lambda T)^2
// with Psi(0) = 1.
std::complex<double> psi_ergodic(std::complex<double> lambda, double T);

// Exact ||Gamma_T(f) - Gamma_hat_{T,n}(f)||^2_{L2(P)} for a stationary start:
// sum_k Re[psi_diag + psi_offdiag](lambda_k) c_k^2.
double exact_sq_error(const SpectralModel& model, const TimeGrid& grid);

// Independent oracle: the pre-spectral double sum over observation cells with
// <P_t f, f>_mu = f' diag(mu) e^{tL} f via matrix exponentials and 2-D
// Gauss-Legendre panels. States <= 50, n <= 256.
double exact_sq_error_jump_bruteforce(const processes::JumpProcess& jp,
                                      const std::vector<double>& f, const TimeGrid& grid,
                                      int panel_order = 8);

// e^z - 1 without cancellation for small |z|
std::complex<double> cexpm1(std::complex<double> z);

}  // namespace otk::spectral
