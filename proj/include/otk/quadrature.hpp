#pragma once

#include <functional>
#include <vector>

namespace otk::quad {

// Gauss-Legendre rule on [-1, 1].
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;
};

const GaussLegendre& gauss_legendre(int n);  // cached per order

// Integrate f over [a, b] with a single Gauss-Legendre panel of order n.
double integrate_gl(const std::function<double(double)>& f, double a, double b, int n);

// Composite rule: `panels` equal subintervals, order-n panel each.
double integrate_gl_composite(const std::function<double(double)>& f, double a, double b,
                              int n, int panels);

// Adaptive Gauss-Kronrod integration (both endpoints may be infinite).
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double tol = 1e-10);

// Gauss-Hermite rule rewritten for the standard normal measure:
//   integral of g against N(0,1)  ~=  sum_i weights[i] * g(nodes[i]).
// weights_equarter[i] = weights[i] * exp(nodes[i]^2/4); together with
// e^{-x^2/4}-scaled Hermite values it keeps projections of high degree
// inside double range.
struct GaussHermiteNormal {
    std::vector<double> nodes;
    std::vector<double> weights;
    std::vector<double> weights_equarter;
};

const GaussHermiteNormal& gauss_hermite_normal(int n);  // cached per order

}  // namespace otk::quad
