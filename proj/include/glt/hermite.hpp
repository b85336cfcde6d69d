#pragma once

#include <functional>
#include <span>
#include <vector>

namespace glt {

/// Truncated Hermite-coefficient vector c_k = <f, e_k>, k = 0..K.
struct HermiteCoeffs {
    std::vector<double> coeffs;

    int truncation() const { return static_cast<int>(coeffs.size()) - 1; }
};

/// |f|_p truncated at the stored coefficients. For p < 0 the summands
/// decrease in k, so `value` is a lower bound and `tail_weight` carries
/// the certified weight (2K+4)^{2p} * sum c_k^2 of what truncation drops.
struct SobolevNorm {
    double value = 0.0;
    double tail_weight = 0.0;
};

/// e_k(x), the k-th orthonormal Hermite function. Scaled three-term
/// recurrence; stable for k up to ~1e4 and |x| up to ~1e3.
double hermite_eval(int k, double x);

/// e_0(x)..e_kmax(x) in one recurrence pass. out.size() must be kmax+1.
void hermite_eval_all(int kmax, double x, std::span<double> out);

/// e_k'(x) = sqrt(k/2) e_{k-1}(x) - sqrt((k+1)/2) e_{k+1}(x).
double hermite_derivative(int k, double x);

/// Gauss-Hermite rule for weight e^{-x^2}. `plain_weights[i]` is
/// w_i * e^{x_i^2}, assembled in log space so tail nodes of high-order
/// rules survive; with these, ∫ f dx ≈ Σ plain_weights[i] f(x_i) for f
/// that decays like the integrands arising here.
struct GaussHermiteRule {
    std::vector<double> nodes;
    std::vector<double> plain_weights;
};

const GaussHermiteRule& gauss_hermite(int order);

/// Coefficients <f, e_k> for k = 0..K by Gauss-Hermite quadrature.
/// quad_order = 0 picks the default 2K+32.
HermiteCoeffs hermite_coeffs(const std::function<double(double)>& f, int K, int quad_order = 0);

/// Coefficients of the point-evaluation functional delta_t: coeffs[k] = e_k(t).
HermiteCoeffs delta_coeffs(double t, int K);

SobolevNorm sobolev_norm(const HermiteCoeffs& c, int p);

/// Σ c_k e_k(x).
double synthesize(const HermiteCoeffs& c, double x);

} // namespace glt
