#include "glt/kernels.hpp"

#include "glt/hermite.hpp"
#include "glt/quad.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace glt {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrt2Pi = 2.50662827463100050242;

double clamp_hurst(double v, double margin) {
    return std::min(std::max(v, margin), 1.0 - margin);
}

} // namespace

double HurstFunction::operator()(double t) const {
    if (!h) throw std::invalid_argument("HurstFunction: empty evaluation rule");
    return clamp_hurst(h(t), margin);
}

HurstFunction HurstFunction::constant(double value) {
    HurstFunction f;
    f.h = [value](double) { return value; };
    f.holder_constant = 0.0;
    f.description = "constant:" + std::to_string(value);
    return f;
}

HurstFunction HurstFunction::linear(double from, double to) {
    HurstFunction f;
    f.h = [from, to](double t) { return from + (to - from) * t; };
    f.holder_constant = std::abs(to - from);
    f.description = "linear:" + std::to_string(from) + "," + std::to_string(to);
    return f;
}

Kernel Kernel::brownian() { return Kernel(KernelKind::bm); }

Kernel Kernel::brownian_bridge() { return Kernel(KernelKind::bridge); }

Kernel Kernel::fractional(double H) {
    if (H <= 0.0 || H >= 1.0) throw std::invalid_argument("fbm: H must be in (0,1)");
    Kernel k(KernelKind::fbm);
    k.H_ = H;
    return k;
}

Kernel Kernel::multifractional(HurstFunction h) {
    if (!h.h) throw std::invalid_argument("mbm: empty Hurst function");
    Kernel k(KernelKind::mbm);
    k.h_ = std::move(h);
    return k;
}

Kernel Kernel::v_gamma(double alpha) {
    if (alpha <= 0.0 || alpha >= 1.0) throw std::invalid_argument("vgamma: alpha must be in (0,1)");
    Kernel k(KernelKind::vgamma);
    k.alpha_ = alpha;
    return k;
}

std::string Kernel::name() const {
    switch (kind_) {
        case KernelKind::bm: return "bm";
        case KernelKind::bridge: return "bridge";
        case KernelKind::fbm: return "fbm";
        case KernelKind::mbm: return "mbm";
        case KernelKind::vgamma: return "vgamma";
    }
    return "?";
}

std::string Kernel::label() const {
    switch (kind_) {
        case KernelKind::fbm: return "fbm(H=" + std::to_string(H_) + ")";
        case KernelKind::mbm: return "mbm(h=" + h_.description + ")";
        case KernelKind::vgamma: return "vgamma(alpha=" + std::to_string(alpha_) + ")";
        default: return name();
    }
}

double Kernel::hurst() const {
    if (kind_ != KernelKind::fbm) throw std::logic_error("hurst(): not an fbm kernel");
    return H_;
}

double Kernel::alpha() const {
    if (kind_ != KernelKind::vgamma) throw std::logic_error("alpha(): not a vgamma kernel");
    return alpha_;
}

const HurstFunction& Kernel::hurst_function() const {
    if (kind_ != KernelKind::mbm) throw std::logic_error("hurst_function(): not an mbm kernel");
    return h_;
}

bool Kernel::in_domain(double t) const {
    switch (kind_) {
        case KernelKind::bridge: return t >= 0.0 && t <= 1.0;
        case KernelKind::vgamma: return t >= 0.0;
        default: return std::isfinite(t);
    }
}

double Kernel::variance(double t) const {
    if (!in_domain(t)) throw std::invalid_argument(name() + ": t outside domain");
    switch (kind_) {
        case KernelKind::bm: return std::abs(t);
        case KernelKind::bridge: return t * (1.0 - t);
        case KernelKind::fbm: return std::pow(std::abs(t), 2.0 * H_);
        case KernelKind::mbm: return t == 0.0 ? 0.0 : std::pow(std::abs(t), 2.0 * h_(t));
        case KernelKind::vgamma: return std::pow(t, alpha_);
    }
    return 0.0;
}

double Kernel::covariance(double t, double s) const {
    if (!in_domain(t) || !in_domain(s))
        throw std::invalid_argument(name() + ": (t,s) outside domain");
    switch (kind_) {
        case KernelKind::bm:
            // signed indicator convention: opposite signs never overlap
            if (t * s < 0.0) return 0.0;
            return std::min(std::abs(t), std::abs(s));
        case KernelKind::bridge:
            return std::min(t, s) - t * s;
        case KernelKind::fbm:
            return 0.5 * (std::pow(std::abs(t), 2.0 * H_) + std::pow(std::abs(s), 2.0 * H_) -
                          std::pow(std::abs(t - s), 2.0 * H_));
        case KernelKind::mbm: {
            const double ht = h_(t), hs = h_(s);
            const double hts = 0.5 * (ht + hs);
            const double chts = c_constant(hts);
            const double scale = chts * chts / (c_constant(ht) * c_constant(hs));
            return scale * 0.5 *
                   (std::pow(std::abs(t), 2.0 * hts) + std::pow(std::abs(s), 2.0 * hts) -
                    std::pow(std::abs(t - s), 2.0 * hts));
        }
        case KernelKind::vgamma: {
            const double m = std::min(t, s);
            if (m <= 0.0) return 0.0;
            if (t == s) return std::pow(t, alpha_);
            const double lo = std::min(t, s), hi = std::max(t, s);
            // R_{t,s} = alpha ∫_0^lo ((t-u)(s-u))^{(a-1)/2} du; substitute
            // v = (lo-u)^{(a+1)/2} to remove the endpoint singularity.
            const double a = alpha_;
            const double p = 2.0 / (a + 1.0);
            const double vmax = std::pow(lo, 0.5 * (a + 1.0));
            auto f = [&](double v) {
                const double lou = std::pow(v, p);  // lo - u
                return std::pow(hi - lo + lou, 0.5 * (a - 1.0));
            };
            const auto bp = graded_breakpoints(0.0, vmax, 40);
            return a * (2.0 / (a + 1.0)) * gl_integrate_panels(f, bp, 16);
        }
    }
    return 0.0;
}

double Kernel::variance_derivative(double t) const {
    switch (kind_) {
        case KernelKind::bm: return t >= 0.0 ? 1.0 : -1.0;
        case KernelKind::bridge: return 1.0 - 2.0 * t;
        case KernelKind::fbm: return 2.0 * H_ * std::pow(t, 2.0 * H_ - 1.0);
        case KernelKind::vgamma: return alpha_ * std::pow(t, alpha_ - 1.0);
        case KernelKind::mbm:
            throw std::runtime_error("mbm: R' requires h'; not available");
    }
    return 0.0;
}

double Kernel::variance_second_derivative(double t) const {
    switch (kind_) {
        case KernelKind::bm: return 0.0;
        case KernelKind::bridge: return -2.0;
        case KernelKind::fbm: return 2.0 * H_ * (2.0 * H_ - 1.0) * std::pow(t, 2.0 * H_ - 2.0);
        case KernelKind::vgamma: return alpha_ * (alpha_ - 1.0) * std::pow(t, alpha_ - 2.0);
        case KernelKind::mbm:
            throw std::runtime_error("mbm: R'' requires h''; not available");
    }
    return 0.0;
}

bool Kernel::has_variance_second_derivative() const { return kind_ != KernelKind::mbm; }

bool Kernel::forward_sum_regular() const {
    switch (kind_) {
        case KernelKind::bm:
        case KernelKind::bridge: return true;
        case KernelKind::fbm: return H_ >= 0.5;
        case KernelKind::mbm: {
            double hmin = 1.0;
            for (int i = 0; i <= 256; ++i) hmin = std::min(hmin, h_(i / 256.0));
            return hmin >= 0.5;
        }
        case KernelKind::vgamma: return alpha_ >= 1.0;  // never for alpha in (0,1)
    }
    return false;
}

std::string Kernel::forward_sum_note() const {
    if (forward_sum_regular()) return {};
    return label() + ": H-type regularity below 1/2; forward Wick-Riemann sums are not "
                     "certified for this kernel";
}

bool Kernel::increasing_variance_on(double T, int scan) const {
    double prev = variance(0.0 < T ? 0.0 : T);
    for (int i = 1; i <= scan; ++i) {
        const double r = variance(T * i / scan);
        if (r < prev - 1e-14) return false;
        prev = r;
    }
    return true;
}

double Kernel::epsilon(double u) const {
    if (kind_ != KernelKind::vgamma) throw std::logic_error("epsilon(): not a vgamma kernel");
    if (u <= 0.0) throw std::domain_error("epsilon: u must be positive");
    return std::sqrt(alpha_) * std::pow(u, 0.5 * (alpha_ - 1.0));
}

double c_constant(double x) {
    if (x <= 0.0 || x >= 1.0) throw std::invalid_argument("c_constant: x must be in (0,1)");
    return std::sqrt(2.0 * kPi / (std::tgamma(2.0 * x + 1.0) * std::sin(kPi * x)));
}

double mh_multiplier(double H, double xi) {
    if (H <= 0.0 || H >= 1.0) throw std::invalid_argument("mh_multiplier: H must be in (0,1)");
    if (xi == 0.0) throw std::domain_error("mh_multiplier: singular at xi = 0");
    return kSqrt2Pi / c_constant(H) * std::pow(std::abs(xi), 0.5 - H);
}

ParsevalResult covariance_via_parseval(double Ht, double Hs, double t, double s,
                                       const FreqQuad& q) {
    if (!(q.xi_min > 0.0) || !(q.xi_min < q.xi_max))
        throw std::invalid_argument("covariance_via_parseval: need 0 < xi_min < xi_max");
    const double pre = 2.0 / (c_constant(Ht) * c_constant(Hs));  // (1/pi) * 2pi/(c c')
    const double p = 1.0 - Ht - Hs;                              // |xi|^p from m m'

    auto bracket = [&](double x) {
        return 1.0 - std::cos(s * x) - std::cos(t * x) + std::cos((t - s) * x);
    };
    auto integrand = [&](double x) { return std::pow(x, p) * bracket(x) / (x * x); };

    double total = 0.0;
    // half-decade log panels below 1
    double lo = q.xi_min;
    const double step = std::sqrt(10.0);
    while (lo < 1.0) {
        const double hi = std::min(lo * step, 1.0);
        total += gl_integrate(integrand, lo, hi, q.gl_log);
        lo = hi;
    }
    // linear panels up to xi_max
    const double start = std::max(1.0, q.xi_min);
    const int n_lin = static_cast<int>(std::ceil((q.xi_max - start) / q.linear_width));
    for (int i = 0; i < n_lin; ++i) {
        const double a = start + i * q.linear_width;
        const double b = std::min(a + q.linear_width, q.xi_max);
        if (b <= a) break;
        total += gl_integrate(integrand, a, b, q.gl_linear);
    }

    ParsevalResult out;
    out.value = pre * total;
    // small-xi: bracket/xi^2 -> t*s
    out.value += pre * t * s * std::pow(q.xi_min, p + 1.0) / (p + 1.0);
    // tail: non-oscillatory part of the bracket
    double const_coef = 1.0;
    if (t == s) const_coef += 1.0;
    if (t == 0.0) const_coef -= 1.0;
    if (s == 0.0) const_coef -= 1.0;
    out.value += pre * const_coef * std::pow(q.xi_max, p - 1.0) / (1.0 - p);

    // remainder bound: integration by parts for each oscillatory cosine, plus
    // the next small-xi Taylor order
    double osc = 0.0;
    for (double u : {std::abs(t), std::abs(s), std::abs(t - s)})
        if (u > 0.0) osc += 4.0 / u * std::pow(q.xi_max, p - 1.0);
    const double smallxi =
        std::abs(t * s) * (t * t + s * s) / 24.0 * std::pow(q.xi_min, p + 3.0) / (p + 3.0);
    out.tail_bound = pre * (osc + smallxi);
    return out;
}

double SignedMeasureOnGrid::net() const {
    double sum = 0.0;
    for (double d : increments) sum += d;
    return sum;
}

SignedMeasureOnGrid dR_measure(const Kernel& k, std::span<const double> grid) {
    if (grid.size() < 2) throw std::invalid_argument("dR_measure: grid needs >= 2 points");
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        if (!(grid[i] < grid[i + 1]))
            throw std::invalid_argument("dR_measure: grid must be strictly increasing");
    SignedMeasureOnGrid m;
    m.grid.assign(grid.begin(), grid.end());
    m.increments.resize(grid.size() - 1);
    double prev = k.variance(grid[0]);
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const double next = k.variance(grid[i + 1]);
        m.increments[i] = next - prev;
        m.total_variation += std::abs(m.increments[i]);
        prev = next;
    }
    return m;
}

namespace {

// ∫_0^t e_k(u) du for all k <= K, composite Gauss-Legendre.
std::vector<double> indicator_pairing(double t, int K) {
    std::vector<double> out(K + 1, 0.0);
    if (t == 0.0) return out;
    const double w = std::min(0.25, kPi / (4.0 * std::sqrt(2.0 * K + 2.0)));
    const int panels = std::max(4, static_cast<int>(std::ceil(std::abs(t) / w)));
    const auto& rule = gauss_legendre(10);
    std::vector<double> ek(K + 1);
    for (int pnl = 0; pnl < panels; ++pnl) {
        const double a = t * pnl / panels, b = t * (pnl + 1) / panels;
        const double mid = 0.5 * (a + b), hal = 0.5 * (b - a);
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double x = mid + hal * rule.nodes[i];
            const double wt = hal * rule.weights[i];
            hermite_eval_all(K, x, ek);
            for (int k = 0; k <= K; ++k) out[k] += wt * ek[k];
        }
    }
    return out;
}

enum class FbmFreqMode { kernel, derivative };

// Frequency-domain Hermite coefficients of g_t = M_H 1_[0,t] or of g'_t,
// using the Fourier eigenrelation of the Hermite functions.
std::vector<double> fbm_freq_coeffs(double H, double t, int K, FbmFreqMode mode) {
    const double Xi = 2.0 * std::sqrt(K + 2.0) + 12.0;
    std::vector<double> nodes;
    std::vector<double> wts;
    {
        const auto& gr = gauss_legendre(12);
        double lo = 1e-14;
        while (lo < 1.0) {
            const double hi = std::min(lo * 10.0, 1.0);
            const double mid = 0.5 * (lo + hi), hal = 0.5 * (hi - lo);
            for (std::size_t i = 0; i < gr.nodes.size(); ++i) {
                nodes.push_back(mid + hal * gr.nodes[i]);
                wts.push_back(hal * gr.weights[i]);
            }
            lo = hi;
        }
        const double w =
            std::min({0.2, kPi / (4.0 * std::sqrt(2.0 * K + 2.0)),
                      kPi / (4.0 * std::max(1.0, std::abs(t)))});
        const int panels = static_cast<int>(std::ceil((Xi - 1.0) / w));
        const auto& gr2 = gauss_legendre(10);
        for (int pnl = 0; pnl < panels; ++pnl) {
            const double a = 1.0 + (Xi - 1.0) * pnl / panels;
            const double b = 1.0 + (Xi - 1.0) * (pnl + 1) / panels;
            const double mid = 0.5 * (a + b), hal = 0.5 * (b - a);
            for (std::size_t i = 0; i < gr2.nodes.size(); ++i) {
                nodes.push_back(mid + hal * gr2.nodes[i]);
                wts.push_back(hal * gr2.weights[i]);
            }
        }
    }

    std::vector<double> even_int(K + 1, 0.0), odd_int(K + 1, 0.0);
    std::vector<double> ek(K + 1);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double xi = nodes[i];
        const double wm = wts[i] * mh_multiplier(H, xi);
        hermite_eval_all(K, xi, ek);
        double fe, fo;
        if (mode == FbmFreqMode::kernel) {
            fe = std::sin(t * xi) / xi;
            fo = (std::cos(t * xi) - 1.0) / xi;
        } else {
            fe = std::cos(t * xi);
            fo = std::sin(t * xi);
        }
        for (int k = 0; k <= K; k += 2) even_int[k] += wm * ek[k] * fe;
        for (int k = 1; k <= K; k += 2) odd_int[k] += wm * ek[k] * fo;
    }

    std::vector<double> out(K + 1);
    const double norm = std::sqrt(2.0 / kPi);
    for (int k = 0; k <= K; ++k) {
        if (k % 2 == 0) {
            const double sign = (k / 2) % 2 == 0 ? 1.0 : -1.0;
            out[k] = sign * norm * even_int[k];
        } else if (mode == FbmFreqMode::kernel) {
            const double sign = ((k + 1) / 2) % 2 == 0 ? 1.0 : -1.0;
            out[k] = sign * norm * odd_int[k];
        } else {
            const double sign = ((k - 1) / 2) % 2 == 0 ? 1.0 : -1.0;
            out[k] = sign * norm * odd_int[k];
        }
    }
    return out;
}

// ∫_0^t eps(v) e_k(t-v) dv with the substitution v = w^{2/(a+1)}.
std::vector<double> vgamma_pairing(double alpha, double t, int K) {
    std::vector<double> out(K + 1, 0.0);
    if (t <= 0.0) return out;
    const double wmax = std::pow(t, 0.5 * (alpha + 1.0));
    const double pref = std::sqrt(alpha) * 2.0 / (alpha + 1.0);
    const auto bp = graded_breakpoints(0.0, wmax, 30);
    const auto& rule = gauss_legendre(12);
    std::vector<double> ek(K + 1);
    for (std::size_t pnl = 0; pnl + 1 < bp.size(); ++pnl) {
        const double mid = 0.5 * (bp[pnl] + bp[pnl + 1]);
        const double hal = 0.5 * (bp[pnl + 1] - bp[pnl]);
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double w = mid + hal * rule.nodes[i];
            const double wt = hal * rule.weights[i];
            const double u = t - std::pow(w, 2.0 / (alpha + 1.0));
            hermite_eval_all(K, u, ek);
            for (int k = 0; k <= K; ++k) out[k] += pref * wt * ek[k];
        }
    }
    return out;
}

} // namespace

std::vector<double> Kernel::hermite_pairing(double t, int K) const {
    if (K < 0) throw std::invalid_argument("hermite_pairing: negative truncation");
    if (!in_domain(t)) throw std::invalid_argument(name() + ": t outside domain");
    switch (kind_) {
        case KernelKind::bm:
            return indicator_pairing(t, K);
        case KernelKind::bridge: {
            auto a = indicator_pairing(t, K);
            const auto b = indicator_pairing(1.0, K);
            for (int k = 0; k <= K; ++k) a[k] -= t * b[k];
            return a;
        }
        case KernelKind::fbm:
            return fbm_freq_coeffs(H_, t, K, FbmFreqMode::kernel);
        case KernelKind::mbm:
            return fbm_freq_coeffs(h_(t), t, K, FbmFreqMode::kernel);
        case KernelKind::vgamma:
            return vgamma_pairing(alpha_, t, K);
    }
    return {};
}

double kernel_derivative_norm(const Kernel& k, double t, int q, int K) {
    if (K < 0) throw std::invalid_argument("kernel_derivative_norm: negative truncation");
    HermiteCoeffs c;
    switch (k.kind()) {
        case KernelKind::bm:
            c = delta_coeffs(t, K);
            break;
        case KernelKind::fbm:
            c.coeffs = fbm_freq_coeffs(k.hurst(), t, K, FbmFreqMode::derivative);
            break;
        default:
            throw std::runtime_error(k.name() +
                                     ": no implemented g'_t representation for this family");
    }
    return sobolev_norm(c, -q).value;
}

} // namespace glt
