#include "otk/funcspace.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <stdexcept>

#include "otk/quadrature.hpp"
#include "otk/simd/kernels.hpp"

namespace otk::funcspace {
namespace {

constexpr int kMollifyOrder = 64;

double bump_unnormalized(double y) {
    const double d = 1.0 - y * y;
    return d > 0.0 ? std::exp(-1.0 / d) : 0.0;
}

double bump_normalizer() {
    // fixed rule, shared with mollify's evaluation
    static const double val = [] {
        const auto& rule = otk::quad::gauss_legendre(kMollifyOrder);
        double acc = 0.0;
        for (int i = 0; i < kMollifyOrder; ++i)
            acc += rule.weights[i] * bump_unnormalized(rule.nodes[i]);
        return acc;
    }();
    return val;
}

double interp_tab(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const std::size_t j = static_cast<std::size_t>(it - xs.begin());
    const double t = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
    return ys[j - 1] + t * (ys[j] - ys[j - 1]);
}

}  // namespace

FunctionSpec FunctionSpec::identity() {
    FunctionSpec f;
    f.kind_ = FuncKind::identity;
    f.name_ = "identity";
    f.tag_ = SmoothTag{};
    return f;
}

FunctionSpec FunctionSpec::constant(double c) {
    FunctionSpec f = custom("constant", [c](double) { return c; }, SmoothTag{});
    return f;
}

FunctionSpec FunctionSpec::indicator(double lo, double hi) {
    if (!(lo < hi)) throw std::domain_error("indicator: requires lo < hi");
    FunctionSpec f;
    f.kind_ = FuncKind::indicator;
    f.name_ = "indicator";
    f.tag_ = IndicatorTag{lo, hi};
    f.p0_ = lo;
    f.p1_ = hi;
    return f;
}

FunctionSpec FunctionSpec::holder_abs(double alpha, double cap) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::domain_error("holder_abs: alpha in (0,1]");
    if (!(cap > 0.0)) throw std::domain_error("holder_abs: cap must be positive");
    FunctionSpec f;
    if (alpha == 0.5) {
        f.kind_ = FuncKind::sqrtabs;
    } else {
        f.kind_ = FuncKind::custom;
        f.eval_ = [alpha, cap](double x) { return std::pow(std::min(std::fabs(x), cap), alpha); };
    }
    f.name_ = "holder_abs";
    f.tag_ = HolderTag{alpha};
    f.p0_ = cap;
    f.p1_ = alpha;
    return f;
}

FunctionSpec FunctionSpec::hermite(int degree) {
    if (degree < 0) throw std::domain_error("hermite: degree must be >= 0");
    FunctionSpec f;
    f.kind_ = FuncKind::hermite;
    f.name_ = "hermite";
    f.tag_ = SmoothTag{};
    f.degree_ = degree;
    return f;
}

FunctionSpec FunctionSpec::tabulated(std::vector<double> xs, std::vector<double> ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw std::domain_error("tabulated: needs >= 2 (x, f(x)) pairs");
    if (!std::is_sorted(xs.begin(), xs.end()))
        throw std::domain_error("tabulated: x values must be sorted");
    FunctionSpec f;
    f.kind_ = FuncKind::tabulated;
    f.name_ = "tabulated";
    f.tag_ = GenericTag{};
    f.tab_x_ = std::move(xs);
    f.tab_y_ = std::move(ys);
    return f;
}

FunctionSpec FunctionSpec::custom(std::string name, std::function<double(double)> eval,
                                  ClassTag tag) {
    FunctionSpec f;
    f.kind_ = FuncKind::custom;
    f.name_ = std::move(name);
    f.tag_ = tag;
    f.eval_ = std::move(eval);
    return f;
}

double FunctionSpec::operator()(double x) const {
    switch (kind_) {
        case FuncKind::identity: return x;
        case FuncKind::indicator: return (x >= p0_ && x < p1_) ? 1.0 : 0.0;
        case FuncKind::sqrtabs: {
            const double a = std::fabs(x);
            return std::sqrt(a < p0_ ? a : p0_);
        }
        case FuncKind::hermite: {
            double y;
            simd::kernels().map_hermite(&x, &y, 1, degree_);
            return y;
        }
        case FuncKind::tabulated: return interp_tab(tab_x_, tab_y_, x);
        case FuncKind::custom: default: return eval_(x);
    }
}

void FunctionSpec::eval_block(const double* x, double* y, std::size_t n) const {
    const auto& k = simd::kernels();
    switch (kind_) {
        case FuncKind::identity: k.map_identity(x, y, n); return;
        case FuncKind::indicator: k.map_indicator(x, y, n, p0_, p1_); return;
        case FuncKind::sqrtabs: k.map_sqrtabs(x, y, n, p0_); return;
        case FuncKind::hermite: k.map_hermite(x, y, n, degree_); return;
        case FuncKind::tabulated:
            for (std::size_t i = 0; i < n; ++i) y[i] = interp_tab(tab_x_, tab_y_, x[i]);
            return;
        case FuncKind::custom: default:
            for (std::size_t i = 0; i < n; ++i) y[i] = eval_(x[i]);
            return;
    }
}

std::optional<double> FunctionSpec::declared_norm(const std::string& key) const {
    const auto it = declared_norms_.find(key);
    if (it == declared_norms_.end()) return std::nullopt;
    return it->second;
}

void FunctionSpec::declare_norm(const std::string& key, double value) {
    declared_norms_[key] = value;
}

double holder_norm(const FunctionSpec& f, double alpha, double lo, double hi, int grid_points) {
    if (grid_points < 2) throw std::domain_error("holder_norm: grid_points must be >= 2");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::domain_error("holder_norm: alpha in (0,1]");
    std::vector<double> xs(grid_points), ys(grid_points);
    const double h = (hi - lo) / (grid_points - 1);
    for (int i = 0; i < grid_points; ++i) xs[i] = lo + i * h;
    f.eval_block(xs.data(), ys.data(), xs.size());
    double best = 0.0;
    for (int i = 0; i < grid_points; ++i)
        for (int j = i + 1; j < grid_points; ++j) {
            const double q = std::fabs(ys[j] - ys[i]) / std::pow(xs[j] - xs[i], alpha);
            best = std::max(best, q);
        }
    return best;
}

FunctionSpec mollify(const FunctionSpec& f, double eps) {
    if (!(eps > 0.0)) throw std::domain_error("mollify: eps must be positive");
    const double c = 1.0 / bump_normalizer();
    const auto& rule = otk::quad::gauss_legendre(kMollifyOrder);
    std::vector<double> w(kMollifyOrder);
    for (int i = 0; i < kMollifyOrder; ++i)
        w[i] = c * rule.weights[i] * bump_unnormalized(rule.nodes[i]);
    const std::vector<double> nodes = rule.nodes;
    FunctionSpec base = f;
    auto smoothed = FunctionSpec::custom(
        f.name() + "_mollified",
        [base, eps, w, nodes](double x) {
            double acc = 0.0;
            for (std::size_t i = 0; i < w.size(); ++i) acc += w[i] * base(x - eps * nodes[i]);
            return acc;
        },
        SmoothTag{});
    return smoothed;
}

SobolevNorm sobolev_norm(const FunctionSpec& f, double s, double box_lo, double box_hi,
                         int fft_points) {
    if (!(s >= 0.0 && s <= 1.0)) throw std::domain_error("sobolev_norm: s in [0,1]");
    if (fft_points < 1024 || (fft_points & (fft_points - 1)) != 0)
        throw std::domain_error("sobolev_norm: fft_points must be a power of two >= 1024");
    if (!(box_lo < box_hi)) throw std::domain_error("sobolev_norm: empty box");

    const int n = fft_points;
    const double width = box_hi - box_lo;
    const double h = width / n;

    std::vector<double> xs(n), in(n);
    for (int i = 0; i < n; ++i) xs[i] = box_lo + i * h;
    f.eval_block(xs.data(), in.data(), xs.size());

    std::vector<std::complex<double>> out(static_cast<std::size_t>(n / 2 + 1));
    {
        static std::mutex plan_mutex;  // FFTW planning is not thread-safe
        std::lock_guard<std::mutex> lock(plan_mutex);
        fftw_plan plan = fftw_plan_dft_r2c_1d(
            n, in.data(), reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
        fftw_execute(plan);
        fftw_destroy_plan(plan);
    }

    // |Ff(u_j)|^2 ~= (h^2/(2pi)) |X_j|^2 at u_j = 2pi j / width; integrate
    // with du = 2pi/width, counting conjugate frequencies twice.
    const double du = 2.0 * M_PI / width;
    const double scale = h * h / (2.0 * M_PI);
    double acc = 0.0;
    for (int j = 0; j <= n / 2; ++j) {
        const double u = du * j;
        const double mult = (j == 0 || j == n / 2) ? 1.0 : 2.0;
        acc += mult * std::pow(1.0 + u, 2.0 * s) * scale * std::norm(out[j]);
    }
    const double norm_sq = acc * du / std::sqrt(2.0 * M_PI);

    // tail check: mass of f^2 outside the box against mass inside
    double inside = 0.0;
    for (int i = 0; i < n; ++i) inside += in[i] * in[i] * h;
    double outside = 0.0;
    const int m = 2048;
    const double hw = width / m;
    for (int i = 0; i < m; ++i) {
        const double xl = box_lo - width + (i + 0.5) * hw;
        const double xr = box_hi + (i + 0.5) * hw;
        outside += (f(xl) * f(xl) + f(xr) * f(xr)) * hw;
    }
    SobolevNorm result;
    result.value = std::sqrt(norm_sq);
    result.tail_warning = outside > 1e-6 * std::max(inside, 1e-300);
    return result;
}

double weighted_h1_norm(const FunctionSpec& f, const std::function<double(double)>& mu_density,
                        double lo, double hi) {
    const double step = (hi - lo) / 16384.0;
    auto f2mu = [&](double x) { return f(x) * f(x) * mu_density(x); };
    auto g2mu = [&](double x) {
        const double d = (f(x + step) - f(x - step)) / (2.0 * step);
        return d * d * mu_density(x);
    };
    const double l2 = otk::quad::integrate_gl_composite(f2mu, lo, hi, 16, 256);
    const double grad = otk::quad::integrate_gl_composite(g2mu, lo, hi, 16, 256);
    return std::sqrt(std::max(l2, 0.0)) + std::sqrt(std::max(grad, 0.0));
}

}  // namespace otk::funcspace
