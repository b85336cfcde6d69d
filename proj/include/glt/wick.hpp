#pragma once

#include "glt/chaos.hpp"
#include "glt/simulate.hpp"

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace glt {

/// Forward Wick-Riemann integral samples with the covariance-correction
/// ledger. Deterministic given (ensemble, F, grid, delta).
struct WickIntegralReport {
    std::vector<double> integrals;    // per path
    std::vector<double> corrections;  // per path: sum F'(G_i) (R_{t_i,t_{i+1}} - R_{t_i})
    int grid_points = 0;
    double delta = 0.0;               // mollification half-width (0 = none)
    std::string warning;              // set when forward sums lack regularity backing

    double mean() const;
    double std_error() const;
    double l2() const;  // sqrt(E[value^2])
};

/// X Y - <f,g> per sample: the Wick product of two first-chaos elements.
std::vector<double> wick_pair_first_chaos(std::span<const double> x, std::span<const double> y,
                                          double inner_fg);

/// Joint samples of (<.,f>, <.,g>, <.,eta>) for Hermite-coefficient vectors,
/// drawn through i.i.d. N(0,1) coordinates ζ_k. Rows: x, y, eta.
struct FirstChaosSamples {
    std::vector<double> x, y, eta;
};
FirstChaosSamples sample_first_chaos(const HermiteCoeffs& f, const HermiteCoeffs& g,
                                     const HermiteCoeffs& eta, int n, std::uint64_t seed);

/// Per path: sum_i [F(G_{t_i})(G_{t_{i+1}} - G_{t_i}) - F'(G_{t_i})(R_{t_i,t_{i+1}} - R_{t_i})].
WickIntegralReport wick_riemann_integral(const std::function<double(double)>& F,
                                         const std::function<double(double)>& Fprime,
                                         const PathEnsemble& e, double T);

/// E|N(0,v) - c|, folded-normal closed form.
double folded_normal_abs_mean(double variance, double c);

/// |E|N(0,R_T) - c| - |c| - E[L_T(c)]|, the Tanaka identity in expectation.
double tanaka_check_expectation(const Kernel& k, double c, double T);

struct TanakaPathResult {
    WickIntegralReport wick;
    std::vector<double> residuals;  // per path
    double mean_residual = 0.0;
    double std_error = 0.0;
    double l2 = 0.0;
};

/// Per path: |G_T - c| - |c| - WR(sign_delta) - Lhat_T(c), with the ramp
/// mollification sign_delta and the 2*delta-window weighted local time.
/// delta <= 0 picks the default 0.05 sqrt(R_T). Kernels without forward-sum
/// regularity are rejected.
TanakaPathResult tanaka_check_path(const Kernel& k, double c, double T, const PathEnsemble& e,
                                   double delta);

} // namespace glt
