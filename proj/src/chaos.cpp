#include "glt/chaos.hpp"

#include "glt/quad.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace glt {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrt2Pi = 2.50662827463100050242;

double phibar(double x) {  // P(N(0,1) > x)
    return 0.5 * std::erfc(x / std::sqrt(2.0));
}

} // namespace

double heat_kernel(double t, double x) {
    if (t < 0.0) throw std::invalid_argument("heat_kernel: negative time");
    if (t == 0.0) return 0.0;
    return std::exp(-x * x / (2.0 * t)) / std::sqrt(2.0 * kPi * t);
}

double heat_kernel_antiderivative(double rho, double a) {
    if (rho < 0.0) throw std::invalid_argument("heat_kernel_antiderivative: negative rho");
    if (rho == 0.0) return 0.0;
    return 2.0 * rho * heat_kernel(rho, a) - 2.0 * std::abs(a) * phibar(std::abs(a) / std::sqrt(rho));
}

double xi_tk(double R_t, int k, double x) {
    if (k < 0) throw std::invalid_argument("xi_tk: negative index");
    if (R_t <= 0.0) throw std::domain_error("xi_tk: requires R_t > 0");
    const double ek = hermite_eval(k, x / std::sqrt(2.0 * R_t));
    if (ek == 0.0) return 0.0;
    const double lg = 0.25 * std::log(kPi) + 0.5 * std::lgamma(k + 1.0) +
                      0.5 * k * std::log(R_t) - x * x / (4.0 * R_t) + std::log(std::abs(ek));
    const double v = std::exp(lg);
    return ek > 0.0 ? v : -v;
}

double TestFunction::l2_norm_sq() const {
    double s = 0.0;
    for (double c : eta.coeffs) s += c * c;
    return s;
}

double TestFunction::pairing(const Kernel& k, double t) const {
    const int K = eta.truncation();
    if (K < 0) return 0.0;
    const auto g = k.hermite_pairing(t, K);
    double s = 0.0;
    for (int j = 0; j <= K; ++j) s += eta.coeffs[j] * g[j];
    return s;
}

double s_transform_delta(const Kernel& k, double a, double s, const TestFunction& eta) {
    const double R = k.variance(s);
    if (R <= 0.0) throw std::domain_error("s_transform_delta: R_s = 0 (zero set of R)");
    const double m = eta.pairing(k, s);
    const double d = a - m;
    return std::exp(-d * d / (2.0 * R)) / std::sqrt(2.0 * kPi * R);
}

double s_transform_functional(const std::function<double(double)>& F, const Kernel& k,
                              double t, const TestFunction& eta) {
    const double R = k.variance(t);
    if (R <= 0.0) throw std::domain_error("s_transform_functional: R_t = 0");
    const double m = eta.pairing(k, t);
    const double sd = std::sqrt(R);
    auto g = [&](double x) { return F(x) * heat_kernel(R, x - m); };
    const double v = adaptive_simpson(g, m - 12.0 * sd, m + 12.0 * sd, 1e-12);
    if (!std::isfinite(v))
        throw std::runtime_error("s_transform_functional: divergent integrand");
    return v;
}

double GridFunction::operator()(double v) const {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("GridFunction: need matching x/y with >= 2 points");
    if (v < x.front() || v > x.back()) return 0.0;
    const auto it = std::upper_bound(x.begin(), x.end(), v);
    const std::size_t i = std::min(x.size() - 1, static_cast<std::size_t>(it - x.begin()));
    const std::size_t j = i == 0 ? 1 : i;
    const double w = (v - x[j - 1]) / (x[j] - x[j - 1]);
    return y[j - 1] + w * (y[j] - y[j - 1]);
}

STransformResult s_transform_functional(const GridFunction& F, const Kernel& k, double t,
                                        const TestFunction& eta) {
    const double R = k.variance(t);
    if (R <= 0.0) throw std::domain_error("s_transform_functional: R_t = 0");
    const double m = eta.pairing(k, t);
    const double sd = std::sqrt(R);
    STransformResult out;
    // support warning: non-negligible Gaussian mass outside the tabulation
    const double mass_below = phibar((m - F.x.front()) / sd);
    const double mass_above = phibar((F.x.back() - m) / sd);
    out.support_clipped = mass_below > 1e-10 || mass_above > 1e-10;
    auto g = [&](double x) { return F(x) * heat_kernel(R, x - m); };
    out.value = adaptive_simpson(g, m - 12.0 * sd, m + 12.0 * sd, 1e-12);
    return out;
}

QuadResult integrate_heat_kernel_in_time(const std::function<double(double)>& R, double a,
                                         double T, double theta) {
    if (!(T > 0.0)) throw std::invalid_argument("integrate_heat_kernel_in_time: T must be > 0");

    auto f = [&](double s) {
        const double r = R(s);
        return r < theta ? 0.0 : heat_kernel(r, a);
    };

    QuadResult out;
    bool excluded_any = false;
    auto add_panel = [&](double lo, double hi) {
        out.value += gl_integrate(f, lo, hi, 16);
        if (R(0.5 * (lo + hi)) < theta) {
            out.excluded_mass += hi - lo;  // time measure of {R < theta} hit
            excluded_any = true;
        }
    };

    // Geometric grading into an endpoint z starting from distance d; panel
    // integrals near a zero of R must eventually decay when a = 0, otherwise
    // R^{-1/2} is not integrable there.
    auto graded_toward = [&](double z, double d, double direction) {
        double prev_abs = -1.0;
        int grow_streak = 0;
        double edge = d;
        for (int j = 0; j < 64; ++j) {
            const double next = 0.5 * edge;
            const double s0 = z + direction * next;
            const double s1 = z + direction * edge;
            const double p = gl_integrate(f, std::min(s0, s1), std::max(s0, s1), 16);
            out.value += p;
            if (a == 0.0 && prev_abs >= 0.0) {
                grow_streak = std::abs(p) >= prev_abs && std::abs(p) > 1e-14 ? grow_streak + 1 : 0;
                if (grow_streak >= 8)
                    throw std::runtime_error(
                        "expected_localtime: divergence at a = 0, R^{-1/2} not integrable "
                        "near the zero set of R");
            }
            prev_abs = std::abs(p);
            edge = next;
        }
        // leftover sliver next to z
        const double s0 = z, s1 = z + direction * edge;
        add_panel(std::min(s0, s1), std::max(s0, s1));
    };

    graded_toward(0.0, 0.25 * T, +1.0);
    const int bulk = 48;
    for (int i = 0; i < bulk; ++i)
        add_panel(0.25 * T + 0.5 * T * i / bulk, 0.25 * T + 0.5 * T * (i + 1) / bulk);
    graded_toward(T, 0.25 * T, -1.0);

    if (excluded_any || out.excluded_mass > 0.0)
        out.note = "time quadrature excluded {s: R_s < theta}";
    return out;
}

QuadResult expected_localtime(const Kernel& k, double a, double T, double theta) {
    return integrate_heat_kernel_in_time([&](double s) { return k.variance(s); }, a, T, theta);
}

QuadResult expected_weighted_localtime(const Kernel& k, double a, double T) {
    if (!(T > 0.0)) throw std::invalid_argument("expected_weighted_localtime: T must be > 0");
    // Exact per monotone panel: contribution Gamma(R_end) - Gamma(R_start).
    QuadResult out;
    const int base = 2048;
    struct Seg { double lo, hi; int depth; };
    std::vector<Seg> stack;
    for (int i = base - 1; i >= 0; --i)
        stack.push_back({T * i / base, T * (i + 1) / base, 0});
    while (!stack.empty()) {
        const Seg s = stack.back();
        stack.pop_back();
        const double rlo = k.variance(s.lo), rhi = k.variance(s.hi);
        const double rmid = k.variance(0.5 * (s.lo + s.hi));
        const bool monotone = (rmid - rlo) * (rhi - rmid) >= 0.0;
        if (!monotone && s.depth < 24) {
            const double mid = 0.5 * (s.lo + s.hi);
            stack.push_back({mid, s.hi, s.depth + 1});
            stack.push_back({s.lo, mid, s.depth + 1});
            continue;
        }
        out.value += heat_kernel_antiderivative(rhi, a) - heat_kernel_antiderivative(rlo, a);
    }
    return out;
}

VarianceSeriesResult localtime_variance_series(const Kernel& k, double a, double T, int K,
                                               int nodes_hint) {
    if (K < 0) throw std::invalid_argument("localtime_variance_series: negative truncation");
    if (!(T > 0.0)) throw std::invalid_argument("localtime_variance_series: T must be > 0");

    // 1-d nodes: geometric grading toward 0 plus uniform bulk on [T/2, T]
    std::vector<double> pts, wts;
    {
        const int graded = 40;
        const int uniform = std::max(8, nodes_hint / 4);
        std::vector<double> edges;
        for (int j = graded; j >= 1; --j) edges.push_back(T * std::pow(0.5, j));
        for (int i = 1; i <= uniform; ++i) edges.push_back(T * 0.5 + T * 0.5 * i / uniform);
        const auto& rule = gauss_legendre(8);
        double prev = edges.front() * 0.5;
        for (double b : edges) {
            const double mid = 0.5 * (prev + b), hal = 0.5 * (b - prev);
            for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
                pts.push_back(mid + hal * rule.nodes[i]);
                wts.push_back(hal * rule.weights[i]);
            }
            prev = b;
        }
    }
    const int n = static_cast<int>(pts.size());

    std::vector<double> Rv(n), f(n);
    std::vector<std::vector<double>> E(n, std::vector<double>(K + 1));
    for (int i = 0; i < n; ++i) {
        Rv[i] = k.variance(pts[i]);
        if (Rv[i] <= 0.0) { f[i] = 0.0; continue; }
        hermite_eval_all(K, a / std::sqrt(2.0 * Rv[i]), E[i]);
        f[i] = wts[i] * std::exp(-a * a / (4.0 * Rv[i])) / std::sqrt(Rv[i]);
    }

    // correlation matrix over node pairs
    std::vector<std::vector<double>> rho(n, std::vector<double>(n));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            double r = 0.0;
            if (Rv[i] > 0.0 && Rv[j] > 0.0)
                r = std::clamp(k.covariance(pts[i], pts[j]) / std::sqrt(Rv[i] * Rv[j]), -1.0, 1.0);
            rho[i][j] = r;
            rho[j][i] = r;
        }
    }

    VarianceSeriesResult out;
    out.terms.resize(K + 1);
    std::vector<std::vector<double>> rp(n, std::vector<double>(n, 1.0));
    const double pref = 1.0 / (2.0 * std::sqrt(kPi));
    std::vector<double> v(n);
    for (int kk = 0; kk <= K; ++kk) {
        for (int i = 0; i < n; ++i) v[i] = f[i] * E[i][kk];
        double term = 0.0;
        for (int i = 0; i < n; ++i) {
            const auto& row = rp[i];
            double acc = 0.0;
            for (int j = 0; j < n; ++j) acc += row[j] * v[j];
            term += v[i] * acc;
        }
        out.terms[kk] = pref * term;
        out.second_moment += out.terms[kk];
        if (kk < K)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) rp[i][j] *= rho[i][j];
    }
    out.last_term = out.terms.back();
    if (K >= 4) {
        int grow = 0;
        for (int kk = K - 3; kk <= K; ++kk)
            if (std::abs(out.terms[kk]) > std::abs(out.terms[kk - 1])) ++grow;
        out.truncation_warning = grow >= 3;
    }
    return out;
}

} // namespace glt
