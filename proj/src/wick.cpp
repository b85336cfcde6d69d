#include "glt/wick.hpp"

#include "glt/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace glt {

double WickIntegralReport::mean() const {
    double s = 0.0;
    for (double v : integrals) s += v;
    return integrals.empty() ? 0.0 : s / integrals.size();
}

double WickIntegralReport::std_error() const {
    const std::size_t n = integrals.size();
    if (n < 2) return 0.0;
    const double m = mean();
    double ss = 0.0;
    for (double v : integrals) ss += (v - m) * (v - m);
    return std::sqrt(ss / (n - 1) / n);
}

double WickIntegralReport::l2() const {
    double ss = 0.0;
    for (double v : integrals) ss += v * v;
    return integrals.empty() ? 0.0 : std::sqrt(ss / integrals.size());
}

std::vector<double> wick_pair_first_chaos(std::span<const double> x, std::span<const double> y,
                                          double inner_fg) {
    if (x.size() != y.size())
        throw std::invalid_argument("wick_pair_first_chaos: sample size mismatch");
    if (!std::isfinite(inner_fg))
        throw std::invalid_argument("wick_pair_first_chaos: missing inner product");
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] * y[i] - inner_fg;
    return out;
}

FirstChaosSamples sample_first_chaos(const HermiteCoeffs& f, const HermiteCoeffs& g,
                                     const HermiteCoeffs& eta, int n, std::uint64_t seed) {
    const std::size_t K = std::max({f.coeffs.size(), g.coeffs.size(), eta.coeffs.size()});
    FirstChaosSamples s;
    s.x.resize(n);
    s.y.resize(n);
    s.eta.resize(n);
    for (int i = 0; i < n; ++i) {
        CounterRng rng(seed, static_cast<std::uint64_t>(i));
        double sx = 0.0, sy = 0.0, se = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            const double z = rng.normal();
            if (k < f.coeffs.size()) sx += f.coeffs[k] * z;
            if (k < g.coeffs.size()) sy += g.coeffs[k] * z;
            if (k < eta.coeffs.size()) se += eta.coeffs[k] * z;
        }
        s.x[i] = sx;
        s.y[i] = sy;
        s.eta[i] = se;
    }
    return s;
}

namespace {

// covariance corrections corr_i = R_{t_i,t_{i+1}} - R_{t_i} and increments
// dR_i on the portion of the grid up to T
struct GridCovariance {
    int m = 0;  // usable grid points
    std::vector<double> corr;
    std::vector<double> dR;
};

GridCovariance grid_covariance(const PathEnsemble& e, double T) {
    GridCovariance g;
    g.m = e.n_times();
    while (g.m > 1 && e.grid[g.m - 1] > T + 1e-12) --g.m;
    if (g.m < 2) throw std::invalid_argument("wick_riemann_integral: grid has no span up to T");
    g.corr.resize(g.m - 1);
    g.dR.resize(g.m - 1);
    for (int i = 0; i + 1 < g.m; ++i) {
        const double Ri = e.kernel.variance(e.grid[i]);
        g.corr[i] = e.kernel.covariance(e.grid[i], e.grid[i + 1]) - Ri;
        g.dR[i] = e.kernel.variance(e.grid[i + 1]) - Ri;
    }
    return g;
}

} // namespace

WickIntegralReport wick_riemann_integral(const std::function<double(double)>& F,
                                         const std::function<double(double)>& Fprime,
                                         const PathEnsemble& e, double T) {
    if (!F || !Fprime)
        throw std::runtime_error("wick_riemann_integral: F and F' are both required");
    const auto gc = grid_covariance(e, T);

    WickIntegralReport rep;
    rep.grid_points = gc.m;
    rep.warning = e.kernel.forward_sum_note();
    rep.integrals.resize(e.n_paths());
    rep.corrections.resize(e.n_paths());
    for (int p = 0; p < e.n_paths(); ++p) {
        double sum = 0.0, corr = 0.0;
        for (int i = 0; i + 1 < gc.m; ++i) {
            const double gi = e.paths(p, i);
            sum += F(gi) * (e.paths(p, i + 1) - gi);
            corr += Fprime(gi) * gc.corr[i];
        }
        rep.integrals[p] = sum - corr;
        rep.corrections[p] = corr;
    }
    return rep;
}

double folded_normal_abs_mean(double variance, double c) {
    if (variance < 0.0) throw std::invalid_argument("folded_normal_abs_mean: negative variance");
    if (variance == 0.0) return std::abs(c);
    const double sd = std::sqrt(variance);
    const double ac = std::abs(c);
    return sd * std::sqrt(2.0 / 3.14159265358979323846) * std::exp(-c * c / (2.0 * variance)) +
           ac * std::erf(ac / (sd * std::sqrt(2.0)));
}

double tanaka_check_expectation(const Kernel& k, double c, double T) {
    const double lhs = folded_normal_abs_mean(k.variance(T), c) - std::abs(c);
    const double rhs = expected_weighted_localtime(k, c, T).value;
    return std::abs(lhs - rhs);
}

TanakaPathResult tanaka_check_path(const Kernel& k, double c, double T, const PathEnsemble& e,
                                   double delta) {
    if (!k.forward_sum_regular())
        throw std::runtime_error("tanaka_check_path: " + k.forward_sum_note());
    if (delta <= 0.0) delta = 0.05 * std::sqrt(k.variance(T));
    const auto gc = grid_covariance(e, T);

    TanakaPathResult out;
    out.wick.grid_points = gc.m;
    out.wick.delta = delta;
    out.wick.integrals.resize(e.n_paths());
    out.wick.corrections.resize(e.n_paths());
    out.residuals.resize(e.n_paths());

    auto sign_delta = [&](double x) { return std::clamp(x / delta, -1.0, 1.0); };

    for (int p = 0; p < e.n_paths(); ++p) {
        double sum = 0.0, corr = 0.0, lhat = 0.0;
        for (int i = 0; i + 1 < gc.m; ++i) {
            const double x = e.paths(p, i) - c;
            sum += sign_delta(x) * (e.paths(p, i + 1) - e.paths(p, i));
            if (std::abs(x) <= delta) {
                corr += gc.corr[i] / delta;           // F'' = sign_delta' = 1{|x|<=delta}/delta
                lhat += gc.dR[i] / (2.0 * delta);     // delta_c window of width 2 delta
            }
        }
        const double wick = sum - corr;
        out.wick.integrals[p] = wick;
        out.wick.corrections[p] = corr;
        out.residuals[p] =
            std::abs(e.paths(p, gc.m - 1) - c) - std::abs(c) - wick - lhat;
    }

    const std::size_t n = out.residuals.size();
    for (double r : out.residuals) out.mean_residual += r;
    out.mean_residual /= static_cast<double>(n);
    double ss = 0.0, l2 = 0.0;
    for (double r : out.residuals) {
        ss += (r - out.mean_residual) * (r - out.mean_residual);
        l2 += r * r;
    }
    out.std_error = n > 1 ? std::sqrt(ss / (n - 1) / n) : 0.0;
    out.l2 = std::sqrt(l2 / n);
    return out;
}

} // namespace glt
