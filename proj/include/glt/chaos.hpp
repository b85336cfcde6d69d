#pragma once

#include "glt/hermite.hpp"
#include "glt/kernels.hpp"

#include <functional>
#include <string>
#include <vector>

namespace glt {

/// Heat kernel density gamma(t,x); 0 by convention at t = 0.
double heat_kernel(double t, double x);

/// ∫_0^rho gamma(r,a) dr = 2 rho gamma(rho,a) - 2|a| Phibar(|a|/sqrt(rho)).
double heat_kernel_antiderivative(double rho, double a);

/// xi_{t,k}(x) = pi^{1/4} (k!)^{1/2} R^{k/2} exp(-x^2/4R) e_k(x/sqrt(2R)),
/// assembled in log space.
double xi_tk(double R_t, int k, double x);

/// Schwartz test function eta held as Hermite coefficients, paired with a
/// kernel family through <g_t, eta>.
struct TestFunction {
    HermiteCoeffs eta;

    double l2_norm_sq() const;
    double pairing(const Kernel& k, double t) const;
};

/// S(delta_a(G_s))(eta) = (2 pi R_s)^{-1/2} exp(-(a - <g_s,eta>)^2 / 2R_s).
double s_transform_delta(const Kernel& k, double a, double s, const TestFunction& eta);

/// S(F(G_t))(eta) = ∫ F(x) gamma(R_t, x - <g_t,eta>) dx, adaptive quadrature.
double s_transform_functional(const std::function<double(double)>& F, const Kernel& k,
                              double t, const TestFunction& eta);

/// Level-grid tabulated F, zero-extended outside its support.
struct GridFunction {
    std::vector<double> x;  // strictly increasing
    std::vector<double> y;
    double operator()(double v) const;  // linear interpolation, 0 outside
};

struct STransformResult {
    double value = 0.0;
    bool support_clipped = false;  // Gaussian mass reached beyond the tabulated support
};

STransformResult s_transform_functional(const GridFunction& F, const Kernel& k, double t,
                                        const TestFunction& eta);

/// Time-quadrature results carry the mass excluded near the zero set of R.
struct QuadResult {
    double value = 0.0;
    double excluded_mass = 0.0;
    std::string note;
};

/// E[l_T(a)] = ∫_0^T gamma(R_s, a) ds, excluding {s: R_s < theta}.
QuadResult expected_localtime(const Kernel& k, double a, double T, double theta = 1e-12);

/// E[L_T(a)] = ∫_0^T gamma(R_s, a) dR_s (Lebesgue-Stieltjes).
QuadResult expected_weighted_localtime(const Kernel& k, double a, double T);

/// Guarded time quadrature of ∫_0^T gamma(R(s), a) ds for an arbitrary
/// variance function; throws when the graded panels near a zero of R fail
/// to decay (R^{-1/2} not integrable at a = 0).
QuadResult integrate_heat_kernel_in_time(const std::function<double(double)>& R, double a,
                                         double T, double theta = 1e-12);

/// Chaos-series second moment of the local time.
struct VarianceSeriesResult {
    double second_moment = 0.0;
    std::vector<double> terms;  // k = 0..K
    double last_term = 0.0;
    bool truncation_warning = false;  // last terms not decreasing
};

/// E[l_T(a)^2] = sum_{k<=K} k! ∬ phi_k(s) phi_k(u) R_{s,u}^k ds du with
/// phi_k(s) = xi_{s,k}(a) / (sqrt(2 pi R_s) k! R_s^k).
VarianceSeriesResult localtime_variance_series(const Kernel& k, double a, double T, int K,
                                               int nodes_hint = 220);

} // namespace glt
