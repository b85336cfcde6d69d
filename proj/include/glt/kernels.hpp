#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace glt {

enum class KernelKind { bm, bridge, fbm, mbm, vgamma };

/// Functional Hurst parameter for mBm. The Holder constant is declared
/// metadata, not verified; evaluations are clamped into (margin, 1-margin).
struct HurstFunction {
    std::function<double(double)> h;
    double holder_constant = 1.0;
    double margin = 0.01;
    std::string description = "custom";

    double operator()(double t) const;

    static HurstFunction constant(double value);
    /// h(t) = from + (to-from)*t, clamped.
    static HurstFunction linear(double from, double to);
};

/// One of the reference Gaussian process families, described through its
/// variance/covariance closed forms and kernel representation. Immutable.
class Kernel {
public:
    static Kernel brownian();
    static Kernel brownian_bridge();
    static Kernel fractional(double H);
    static Kernel multifractional(HurstFunction h);
    static Kernel v_gamma(double alpha);

    KernelKind kind() const { return kind_; }
    std::string name() const;
    /// Human-readable label with parameters, e.g. "fbm(H=0.7)".
    std::string label() const;
    double hurst() const;
    double alpha() const;
    const HurstFunction& hurst_function() const;

    bool in_domain(double t) const;

    /// R_t = E[G_t^2].
    double variance(double t) const;
    /// R_{t,s} = E[G_t G_s].
    double covariance(double t, double s) const;

    double variance_derivative(double t) const;
    double variance_second_derivative(double t) const;
    bool has_variance_second_derivative() const;

    /// Whether forward Wick-Riemann sums are certified for this kernel
    /// (H-type regularity >= 1/2). Scans h over [0,1] for mBm.
    bool forward_sum_regular() const;
    std::string forward_sum_note() const;

    /// True if t -> R_t is nondecreasing on [0,T] (scan-based for mBm).
    bool increasing_variance_on(double T, int scan = 512) const;

    /// <g_t, e_k> for k = 0..K.
    std::vector<double> hermite_pairing(double t, int K) const;

    /// Moving-average kernel of the V_gamma family, eps(u) = sqrt((gamma^2)'(u)).
    double epsilon(double u) const;

private:
    Kernel(KernelKind k) : kind_(k) {}
    KernelKind kind_;
    double H_ = 0.5;
    double alpha_ = 0.5;
    HurstFunction h_;
};

/// c_x = sqrt(2*pi / (Gamma(2x+1) sin(pi x))), x in (0,1).
double c_constant(double x);

/// Fourier symbol of M_H: sqrt(2*pi)/c_H * |xi|^{1/2-H}. xi = 0 is singular.
double mh_multiplier(double H, double xi);

/// Frequency-quadrature layout for the Parseval covariance route.
struct FreqQuad {
    double xi_min = 1e-6;
    double xi_max = 1e4;
    int gl_log = 16;         // nodes per log panel (half-decade) below 1
    double linear_width = 0.5;
    int gl_linear = 8;
};

struct ParsevalResult {
    double value = 0.0;
    double tail_bound = 0.0;  // truncation remainder bound (oscillatory + small-xi next order)
};

/// (1/2pi) ∫ m_{Ht} m_{Hs} (1-e^{-it xi})(1-e^{is xi})/xi^2 dxi over
/// [-xi_max,-xi_min] ∪ [xi_min, xi_max], plus analytic small-xi and
/// non-oscillatory tail corrections.
ParsevalResult covariance_via_parseval(double Ht, double Hs, double t, double s,
                                       const FreqQuad& q = {});

struct SignedMeasureOnGrid {
    std::vector<double> grid;
    std::vector<double> increments;  // increments[i] = R_{t_{i+1}} - R_{t_i}
    double total_variation = 0.0;

    double net() const;
};

SignedMeasureOnGrid dR_measure(const Kernel& k, std::span<const double> grid);

/// Truncated |g'_t|_{-q} via the Hermite coefficients of g'_t
/// (bm: delta_t; fbm: Fourier route). Other families are unsupported.
double kernel_derivative_norm(const Kernel& k, double t, int q, int K);

} // namespace glt
