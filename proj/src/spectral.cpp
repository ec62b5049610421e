#include "otk/spectral.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <map>
#include <stdexcept>

#include "otk/quadrature.hpp"

namespace otk::spectral {
namespace {

using cplx = std::complex<double>;

constexpr double kSeriesRadius = 0.25;  // |z| switch to Taylor branches
constexpr double kZeroEigTol = 1e-12;

void require_left_halfplane(cplx lambda) {
    if (lambda.real() > 1e-12)
        throw std::domain_error("psi: eigenvalue must satisfy Re(lambda) <= 0");
}

// F(z) = (e^z - 1 - z)/z^2 + 1/2 - (e^z - 1)/z, so Psi = 2 n d^2 F(lambda d).
cplx F_diag(cplx z) {
    if (std::abs(z) < kSeriesRadius) {
        // -sum_{m>=1} (m+1)/(m+2)! z^m
        cplx acc = 0.0, term = 1.0;
        double fact = 2.0;  // (m+2)!/ (m) running
        for (int m = 1; m <= 17; ++m) {
            term *= z;
            fact *= static_cast<double>(m + 2);
            acc -= term * (static_cast<double>(m + 1) / fact);
        }
        return acc;
    }
    const cplx em = cexpm1(z);
    return (em - z) / (z * z) + 0.5 - em / z;
}

// E1(z) = (e^z - 1 - z)/z = int_0^1 (e^{zt} - 1) dt
cplx E1(cplx z) {
    if (std::abs(z) < kSeriesRadius) {
        cplx acc = 0.0, term = 1.0;
        double fact = 1.0;
        for (int m = 1; m <= 17; ++m) {
            term *= z;
            fact *= static_cast<double>(m + 1);
            acc += term / fact;
        }
        return acc;
    }
    return (cexpm1(z) - z) / z;
}

// E2(z) = (e^z - 1)/z - e^z
cplx E2(cplx z) {
    if (std::abs(z) < kSeriesRadius) {
        cplx acc = 0.0, term = 1.0;
        double fact = 1.0;
        for (int m = 1; m <= 17; ++m) {
            term *= z;
            fact *= static_cast<double>(m + 1);
            acc -= term * static_cast<double>(m) / fact;
        }
        return acc;
    }
    const cplx em = cexpm1(z);
    return em / z - (em + 1.0);
}

}  // namespace

cplx cexpm1(cplx z) {
    const double x = z.real();
    const double y = z.imag();
    const double em = std::expm1(x);
    const double sh = std::sin(0.5 * y);
    return {em * std::cos(y) - 2.0 * sh * sh, (em + 1.0) * std::sin(y)};
}

double SpectralModel::coeff_sq_sum() const {
    double acc = 0.0;
    for (double c : coefficients) acc += c * c;
    return acc;
}

double SpectralModel::parseval_defect() const { return norm_mu_sq - coeff_sq_sum(); }

namespace {

// shared projection core: c_k = sum_i wproj_i g_k(x_i) with the
// e^{-x^2/4}-scaled orthonormal recurrence, wproj_i = w_i e^{x_i^2/4} f(x_i)
void project_onto_hermite(const std::vector<double>& nodes, const std::vector<double>& wproj,
                          int K, SpectralModel& model) {
    const std::size_t nq = nodes.size();
    std::vector<double> gm(nq), g(nq);
    for (std::size_t i = 0; i < nq; ++i) {
        gm[i] = std::exp(-nodes[i] * nodes[i] / 4.0);
        g[i] = nodes[i] * gm[i];
    }
    model.eigenvalues.resize(static_cast<std::size_t>(K) + 1);
    model.coefficients.resize(static_cast<std::size_t>(K) + 1);
    for (int k = 0; k <= K; ++k) {
        model.eigenvalues[static_cast<std::size_t>(k)] = cplx(-static_cast<double>(k), 0.0);
        double ck = 0.0;
        const std::vector<double>& hk = (k == 0) ? gm : g;
        for (std::size_t i = 0; i < nq; ++i) ck += wproj[i] * hk[i];
        model.coefficients[static_cast<std::size_t>(k)] = ck;
        if (k >= 1 && k <= K - 1) {
            const double sk = std::sqrt(static_cast<double>(k));
            const double rk = 1.0 / std::sqrt(static_cast<double>(k + 1));
            for (std::size_t i = 0; i < nq; ++i) {
                const double gp = (nodes[i] * g[i] - sk * gm[i]) * rk;
                gm[i] = g[i];
                g[i] = gp;
            }
        }
    }
}

}  // namespace

SpectralModel hermite_decompose(const funcspace::FunctionSpec& f, int K, int quad_nodes) {
    if (K < 0) throw std::domain_error("hermite_decompose: K must be >= 0");
    if (quad_nodes < std::max(2 * K, 8))
        throw std::domain_error("hermite_decompose: quad_nodes must be >= max(2K, 8)");

    SpectralModel model;
    model.label = "ou-hermite";

    // Indicator targets have a jump, which Gauss-Hermite resolves poorly; the
    // projection integral is restricted to the support instead, where the
    // integrand is analytic and composite Gauss-Legendre is exact in practice.
    if (const auto* ind = std::get_if<funcspace::IndicatorTag>(&f.class_tag())) {
        const double cutoff = 40.0;  // phi mass beyond is far below double eps
        const double lo = std::max(ind->lo, -cutoff);
        const double hi = std::min(ind->hi, cutoff);
        const int panels = std::max(quad_nodes / 8, 64);
        const auto& gl = otk::quad::gauss_legendre(16);
        std::vector<double> nodes, wproj;
        double norm_sq = 0.0;
        const double width = (hi - lo) / panels;
        for (int p = 0; p < panels; ++p) {
            const double a = lo + p * width;
            for (int i = 0; i < 16; ++i) {
                const double x = a + 0.5 * width * (gl.nodes[i] + 1.0);
                const double w = 0.5 * width * gl.weights[i];
                const double phi = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
                nodes.push_back(x);
                wproj.push_back(w * phi * std::exp(x * x / 4.0));
                norm_sq += w * phi;
            }
        }
        model.norm_mu_sq = f.declared_norm("mu_l2_sq").value_or(norm_sq);
        project_onto_hermite(nodes, wproj, K, model);
        return model;
    }

    const auto& rule = otk::quad::gauss_hermite_normal(quad_nodes);
    const std::size_t nq = rule.nodes.size();

    std::vector<double> fx(nq);
    f.eval_block(rule.nodes.data(), fx.data(), nq);

    double norm_sq = 0.0;
    double edge = 0.0;  // quadrature mass near the extreme nodes
    const double edge_cut = 0.9 * std::fabs(rule.nodes.back());
    for (std::size_t i = 0; i < nq; ++i) {
        if (!std::isfinite(fx[i]))
            throw std::domain_error("hermite_decompose: f not evaluable on the quadrature grid");
        const double term = rule.weights[i] * fx[i] * fx[i];
        norm_sq += term;
        if (std::fabs(rule.nodes[i]) > edge_cut) edge += term;
    }
    // an integrable f^2 dmu leaves nothing at the grid edge; growth like
    // e^{x^2/2} or faster concentrates there
    if (!std::isfinite(norm_sq) || (norm_sq > 0.0 && edge > 1e-8 * norm_sq))
        throw std::domain_error("hermite_decompose: f is not square-integrable against N(0,1)");

    std::vector<double> wproj(nq);
    for (std::size_t i = 0; i < nq; ++i) wproj[i] = rule.weights_equarter[i] * fx[i];
    model.norm_mu_sq = f.declared_norm("mu_l2_sq").value_or(norm_sq);
    project_onto_hermite(rule.nodes, wproj, K, model);
    return model;
}

SpectralModel jump_decompose(const processes::JumpProcess& jp, const std::vector<double>& f) {
    jp.validate(/*require_reversible=*/true);
    const int S = jp.states;
    if (f.size() != static_cast<std::size_t>(S))
        throw std::domain_error("jump_decompose: f must have one value per state");

    // mu-symmetrized transition matrix D^{1/2} P D^{-1/2}
    Eigen::MatrixXd A(S, S);
    Eigen::VectorXd sqmu(S);
    for (int x = 0; x < S; ++x) sqmu[x] = std::sqrt(jp.stationary_mu[static_cast<std::size_t>(x)]);
    for (int x = 0; x < S; ++x)
        for (int y = 0; y < S; ++y) {
            const double denom = sqmu[y] > 0.0 ? sqmu[y] : 1.0;
            A(x, y) = sqmu[x] * jp.p(x, y) / denom;
        }
    A = 0.5 * (A + A.transpose().eval());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("jump_decompose: eigensolver failed");

    SpectralModel model;
    model.label = "jump-eigen";
    model.eigenvalues.resize(static_cast<std::size_t>(S));
    model.coefficients.resize(static_cast<std::size_t>(S));
    double norm_sq = 0.0;
    for (int x = 0; x < S; ++x)
        norm_sq += f[static_cast<std::size_t>(x)] * f[static_cast<std::size_t>(x)] *
                   jp.stationary_mu[static_cast<std::size_t>(x)];
    model.norm_mu_sq = norm_sq;
    for (int k = 0; k < S; ++k) {
        double lam = jp.rate_lambda * (es.eigenvalues()[k] - 1.0);
        if (lam > 0.0 && lam < 1e-10) lam = 0.0;  // symmetric-solver round-off
        model.eigenvalues[static_cast<std::size_t>(k)] = cplx(lam, 0.0);
        double ck = 0.0;
        for (int x = 0; x < S; ++x)
            ck += f[static_cast<std::size_t>(x)] * sqmu[x] * es.eigenvectors()(x, k);
        model.coefficients[static_cast<std::size_t>(k)] = ck;
    }
    return model;
}

DsNorm ds_norm(const SpectralModel& model, double s) {
    if (s < -1.0 || s > 1.0) throw std::domain_error("ds_norm: s must lie in [-1, 1]");
    const double scale = std::sqrt(std::max(model.coeff_sq_sum(), 1e-300));
    double acc = 0.0;
    for (std::size_t k = 0; k < model.eigenvalues.size(); ++k) {
        const double mod = std::abs(model.eigenvalues[k]);
        const double c = model.coefficients[k];
        if (mod <= kZeroEigTol) {
            if (s < 0.0 && std::fabs(c) > 1e-9 * scale)
                throw std::domain_error(
                    "ds_norm: s < 0 requires a centered f (no mass at lambda = 0)");
            if (s == 0.0) acc += c * c;  // |0|^0 = 1 in the Parseval case
            continue;
        }
        acc += std::exp(s * std::log(mod)) * c * c;
    }
    DsNorm out;
    out.s = s;
    out.value = std::sqrt(acc);
    out.truncation_K = static_cast<int>(model.eigenvalues.size()) - 1;
    return out;
}

cplx psi_diag(cplx lambda, std::int64_t n, double delta) {
    require_left_halfplane(lambda);
    if (!(delta > 0.0) || n < 1) throw std::domain_error("psi_diag: invalid grid");
    const cplx z = lambda * delta;
    return 2.0 * static_cast<double>(n) * delta * delta * F_diag(z);
}

cplx psi_offdiag(cplx lambda, std::int64_t n, double delta) {
    require_left_halfplane(lambda);
    if (!(delta > 0.0) || n < 1) throw std::domain_error("psi_offdiag: invalid grid");
    if (lambda == cplx(0.0, 0.0)) return 0.0;
    const cplx z = lambda * delta;
    const double nd = static_cast<double>(n);
    const cplx nz = lambda * (nd * delta);

    // N = n (1 - e^z) - (1 - e^{nz}) = sum_{j>=2} (n^j - n) z^j / j!
    cplx N;
    if (std::abs(nz) < 0.5) {
        N = 0.0;
        cplx anz = nz;       // (nz)^j running
        cplx az = z;         // z^j running
        double fact = 1.0;   // j!
        for (int j = 2; j <= 24; ++j) {
            anz *= nz;
            az *= z;
            fact *= static_cast<double>(j);
            N += (anz - nd * az) / fact;
        }
    } else {
        N = -nd * cexpm1(z) + cexpm1(nz);
    }
    const cplx em = cexpm1(z);
    const cplx S = N / (em * em);
    return 2.0 * delta * delta * S * E1(z) * E2(z);
}

cplx psi_ergodic(cplx lambda, double T) {
    require_left_halfplane(lambda);
    if (!(T > 0.0)) throw std::domain_error("psi_ergodic: T must be positive");
    const cplx w = lambda * T;
    if (std::abs(w) < kSeriesRadius) {
        // 2 sum_{m>=0} w^m/(m+2)!
        cplx acc = 0.0, term = 1.0;
        double fact = 2.0;
        acc += 2.0 / fact;
        for (int m = 1; m <= 17; ++m) {
            term *= w;
            fact *= static_cast<double>(m + 2);
            acc += 2.0 * term / fact;
        }
        return acc;
    }
    return 2.0 * (cexpm1(w) - w) / (w * w);
}

double exact_sq_error(const SpectralModel& model, const TimeGrid& grid) {
    validate(grid);
    double acc = 0.0;
    for (std::size_t k = 0; k < model.eigenvalues.size(); ++k) {
        const cplx lam = model.eigenvalues[k];
        const double c = model.coefficients[k];
        if (c == 0.0 || std::abs(lam) <= kZeroEigTol) continue;
        const cplx total =
            psi_diag(lam, grid.steps_n, grid.delta) + psi_offdiag(lam, grid.steps_n, grid.delta);
        acc += total.real() * c * c;
    }
    return acc;
}

double exact_sq_error_jump_bruteforce(const processes::JumpProcess& jp,
                                      const std::vector<double>& f, const TimeGrid& grid,
                                      int panel_order) {
    validate(grid);
    jp.validate();
    const int S = jp.states;
    if (f.size() != static_cast<std::size_t>(S))
        throw std::domain_error("exact_sq_error_jump_bruteforce: f size mismatch");
    if (S > 50 || grid.steps_n > 256)
        throw std::domain_error(
            "exact_sq_error_jump_bruteforce: resource guard (states <= 50, n <= 256)");
    const int n = static_cast<int>(grid.steps_n);
    const double d = grid.delta;

    // generator L = lambda (P - I)
    Eigen::MatrixXd L(S, S);
    for (int x = 0; x < S; ++x)
        for (int y = 0; y < S; ++y)
            L(x, y) = jp.rate_lambda * (jp.p(x, y) - (x == y ? 1.0 : 0.0));
    Eigen::VectorXd fv(S), mf(S);
    for (int x = 0; x < S; ++x) {
        fv[x] = f[static_cast<std::size_t>(x)];
        mf[x] = jp.stationary_mu[static_cast<std::size_t>(x)] * fv[x];
    }

    // semigroup powers at whole steps: A_q = e^{q d L}
    std::vector<Eigen::MatrixXd> A(static_cast<std::size_t>(n) + 1);
    A[0] = Eigen::MatrixXd::Identity(S, S);
    const Eigen::MatrixXd E1step = (d * L).exp();
    for (int q = 1; q <= n; ++q) A[static_cast<std::size_t>(q)] = A[static_cast<std::size_t>(q - 1)] * E1step;

    // residual offsets rho in [0, d): w_rho = e^{rho L} f, cached by key
    std::map<double, Eigen::VectorXd> offset_cache;
    std::map<double, double> g_cache;
    auto g_of = [&](double t) {
        // g(t) = <P_t f, f>_mu, t = q d + rho
        auto git = g_cache.find(t);
        if (git != g_cache.end()) return git->second;
        const int q = std::min(static_cast<int>(std::floor(t / d + 1e-12)), n);
        double rho = t - q * d;
        if (rho < 0.0) rho = 0.0;
        auto it = offset_cache.find(rho);
        if (it == offset_cache.end()) {
            Eigen::MatrixXd Er = (rho * L).exp();
            it = offset_cache.emplace(rho, (Er * fv).eval()).first;
        }
        const double val = mf.dot(A[static_cast<std::size_t>(q)] * it->second);
        g_cache.emplace(t, val);
        return val;
    };

    const auto& rule = otk::quad::gauss_legendre(panel_order);
    const int p = panel_order;
    std::vector<double> uu(static_cast<std::size_t>(p)), ww(static_cast<std::size_t>(p));
    std::vector<double> t01(static_cast<std::size_t>(p)), w01(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i) {
        uu[static_cast<std::size_t>(i)] = 0.5 * d * (rule.nodes[static_cast<std::size_t>(i)] + 1.0);
        ww[static_cast<std::size_t>(i)] = 0.5 * d * rule.weights[static_cast<std::size_t>(i)];
        t01[static_cast<std::size_t>(i)] = 0.5 * (rule.nodes[static_cast<std::size_t>(i)] + 1.0);
        w01[static_cast<std::size_t>(i)] = 0.5 * rule.weights[static_cast<std::size_t>(i)];
    }

    // E[(f(X_r)-f(X_{t_k}))(f(X_h)-f(X_{t_l}))]
    //   = g(|r-h|) - g(|r-t_l|) - g(|h-t_k|) + g(|t_k-t_l|)
    // with r = t_k + u, h = t_l + v integrated over the cell square.
    //
    // Diagonal cells have a kink of g(|u-v|) along u = v, so they are split
    // into triangles; with v = t u the triangle integrand is smooth.
    const double g0 = g_of(0.0);
    double diag_cell = 0.0;
    for (int i = 0; i < p; ++i) {
        const double u = uu[static_cast<std::size_t>(i)];
        double inner = 0.0;
        for (int j = 0; j < p; ++j) {
            const double t = t01[static_cast<std::size_t>(j)];
            inner += w01[static_cast<std::size_t>(j)] *
                     (g_of(u * (1.0 - t)) - g_of(u) - g_of(u * t) + g0);
        }
        diag_cell += ww[static_cast<std::size_t>(i)] * u * inner;
    }
    diag_cell *= 2.0;  // the two triangles contribute equally

    double acc = static_cast<double>(n) * diag_cell;
    for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) {
            if (k == l) continue;
            const double dkl = d * (k - l);
            double cell = 0.0;
            for (int i = 0; i < p; ++i) {
                const double u = uu[static_cast<std::size_t>(i)];
                for (int j = 0; j < p; ++j) {
                    const double v = uu[static_cast<std::size_t>(j)];
                    const double val = g_of(std::fabs(dkl + u - v)) - g_of(std::fabs(dkl + u)) -
                                       g_of(std::fabs(-dkl + v)) + g_of(std::fabs(dkl));
                    cell += ww[static_cast<std::size_t>(i)] * ww[static_cast<std::size_t>(j)] * val;
                }
            }
            acc += cell;
        }
    }
    return acc;
}

}  // namespace otk::spectral
