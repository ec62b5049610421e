#include "otk/quadrature.hpp"

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace otk::quad {
namespace {

GaussLegendre build_gauss_legendre(int n) {
    if (n < 1) throw std::domain_error("gauss_legendre: order must be >= 1");
    GaussLegendre rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    // Newton on P_n from the Chebyshev-like initial guess
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double p = 0.0, dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= n; ++j) {
                const double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            p = p1;
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

GaussHermiteNormal build_gauss_hermite_normal(int n) {
    if (n < 2) throw std::domain_error("gauss_hermite_normal: order must be >= 2");
    // Golub-Welsch: Jacobi matrix of the probabilists' Hermite recurrence has
    // zero diagonal and off-diagonal sqrt(k).
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd sub(n - 1);
    for (int k = 1; k < n; ++k) sub[k - 1] = std::sqrt(static_cast<double>(k));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    GaussHermiteNormal rule;
    rule.nodes.assign(es.eigenvalues().data(), es.eigenvalues().data() + n);

    // Christoffel weights: w_i = 1 / sum_k h_k(x_i)^2 for the orthonormal
    // basis; evaluated on e^{-x^2/4}-scaled values to stay in range.
    rule.weights.resize(n);
    rule.weights_equarter.resize(n);
    for (int i = 0; i < n; ++i) {
        const double x = rule.nodes[i];
        const double scale = std::exp(-x * x / 4.0);
        double gm = scale;       // g_0
        double g = x * scale;    // g_1
        double tot = gm * gm + g * g;
        for (int k = 1; k < n - 1; ++k) {
            const double gp = (x * g - std::sqrt(static_cast<double>(k)) * gm) /
                              std::sqrt(static_cast<double>(k + 1));
            gm = g;
            g = gp;
            tot += g * g;
        }
        if (tot > 0.0) {
            rule.weights_equarter[i] = std::exp(-x * x / 4.0) / tot;
            rule.weights[i] = rule.weights_equarter[i] * std::exp(-x * x / 4.0);
        } else {
            // node so far out that even the scaled series underflows
            rule.weights_equarter[i] = 0.0;
            rule.weights[i] = 0.0;
        }
    }
    return rule;
}

template <typename Rule>
const Rule& cached(std::map<int, Rule>& cache, std::mutex& mu, int n, Rule (*builder)(int)) {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, builder(n)).first;
    return it->second;
}

}  // namespace

const GaussLegendre& gauss_legendre(int n) {
    static std::map<int, GaussLegendre> cache;
    static std::mutex mu;
    return cached(cache, mu, n, build_gauss_legendre);
}

const GaussHermiteNormal& gauss_hermite_normal(int n) {
    static std::map<int, GaussHermiteNormal> cache;
    static std::mutex mu;
    return cached(cache, mu, n, build_gauss_hermite_normal);
}

double integrate_gl(const std::function<double(double)>& f, double a, double b, int n) {
    const auto& rule = gauss_legendre(n);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return acc * half;
}

double integrate_gl_composite(const std::function<double(double)>& f, double a, double b,
                              int n, int panels) {
    double acc = 0.0;
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) acc += integrate_gl(f, a + p * h, a + (p + 1) * h, n);
    return acc;
}

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double tol) {
    return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 15, tol);
}

}  // namespace otk::quad
