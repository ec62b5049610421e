#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace otk::funcspace {

struct SmoothTag {};
struct HolderTag { double alpha; };
struct IndicatorTag { double lo; double hi; };  // 1_{[lo, hi)}
struct SobolevTag { double s; };
struct GenericTag {};
using ClassTag = std::variant<SmoothTag, HolderTag, IndicatorTag, SobolevTag, GenericTag>;

// Which dispatched block kernel evaluates the function, if any.
enum class FuncKind { identity, indicator, sqrtabs, hermite, tabulated, custom };

// An evaluable scalar function with class metadata and optional declared
// norms (e.g. analytic values recorded next to grid estimates).
class FunctionSpec {
public:
    static FunctionSpec identity();
    static FunctionSpec constant(double c);
    static FunctionSpec indicator(double lo, double hi);
    // min(|x|, cap)^alpha; 1/2-Hoelder instance hits the sqrt kernel
    static FunctionSpec holder_abs(double alpha, double cap);
    static FunctionSpec hermite(int degree);  // orthonormal probabilists' basis
    static FunctionSpec tabulated(std::vector<double> xs, std::vector<double> ys);
    static FunctionSpec custom(std::string name, std::function<double(double)> eval,
                               ClassTag tag = GenericTag{});

    double operator()(double x) const;
    void eval_block(const double* x, double* y, std::size_t n) const;

    FuncKind kind() const { return kind_; }
    const ClassTag& class_tag() const { return tag_; }
    const std::string& name() const { return name_; }

    std::optional<double> declared_norm(const std::string& key) const;
    void declare_norm(const std::string& key, double value);

    // kernel parameters (valid per kind)
    double param_lo() const { return p0_; }
    double param_hi() const { return p1_; }
    double param_cap() const { return p0_; }
    double param_alpha() const { return p1_; }
    int hermite_degree() const { return degree_; }

private:
    FunctionSpec() = default;

    FuncKind kind_ = FuncKind::custom;
    std::string name_;
    ClassTag tag_ = GenericTag{};
    std::function<double(double)> eval_;
    double p0_ = 0.0, p1_ = 0.0;
    int degree_ = 0;
    std::vector<double> tab_x_, tab_y_;
    std::map<std::string, double> declared_norms_;
};

// sup of |f(x)-f(y)| / |x-y|^alpha over all pairs of a uniform grid
// (a lower estimate of the true Hoelder norm).
double holder_norm(const FunctionSpec& f, double alpha, double lo, double hi, int grid_points);

// f * phi_eps for the standard bump kernel phi(y) = c exp(-1/(1-y^2)) on
// (-1,1); the normalizer c uses the same fixed Gauss-Legendre rule as the
// evaluation so constants mollify to themselves exactly.
FunctionSpec mollify(const FunctionSpec& f, double eps);

struct SobolevNorm {
    double value = 0.0;
    bool tail_warning = false;  // significant mass of f outside the box
};

// Fractional Sobolev norm ((2pi)^{-1/2} int (1+|u|)^{2s} |Ff(u)|^2 du)^{1/2}
// from an FFT of f sampled on [box_lo, box_hi] (symmetric transform
// convention). fft_points must be a power of two >= 1024.
SobolevNorm sobolev_norm(const FunctionSpec& f, double s, double box_lo, double box_hi,
                         int fft_points);

// ||f||_mu + ||f'||_mu with central differences of step width/2^14.
double weighted_h1_norm(const FunctionSpec& f, const std::function<double(double)>& mu_density,
                        double lo, double hi);

}  // namespace otk::funcspace
