#pragma once

#include <functional>
#include <span>
#include <vector>

namespace glt {

/// Nodes and weights of an n-point Gauss-Legendre rule on [-1,1].
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Cached Gauss-Legendre rule (Newton iteration on Legendre polynomials).
const GaussLegendreRule& gauss_legendre(int n);

/// ∫_a^b f dx with an n-point Gauss-Legendre rule.
double gl_integrate(const std::function<double(double)>& f, double a, double b, int n = 16);

/// Composite rule over contiguous panels given by breakpoints.
double gl_integrate_panels(const std::function<double(double)>& f,
                           std::span<const double> breakpoints, int n = 16);

/// Breakpoints for [a,b] split into `count` equal panels.
std::vector<double> linear_breakpoints(double a, double b, int count);

/// Breakpoints geometrically graded toward `a` (a < b), finest panel ~ b*ratio^count.
std::vector<double> graded_breakpoints(double a, double b, int count, double ratio = 0.5);

/// Adaptive Simpson, used by test oracles and tabulated-F transforms.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-10, int max_depth = 40);

} // namespace glt
