#include "glt/hermite.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace glt {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kQuarterLogPi = 0.28618247146235004097;  // ln(pi)/4

// The recurrence is run on the polynomial part h_k = e_k * e^{x^2/2}
// (same three-term relation, Gaussian factor divided out), carrying a
// common log-scale so neither growth of h_k nor underflow of the
// Gaussian seed loses the oscillatory region of large-k functions.
struct ScaledPair {
    double prev;   // h_{k-1} mantissa
    double cur;    // h_k mantissa
    double log_scale;
};

void rescale(ScaledPair& s) {
    const double m = std::max(std::abs(s.prev), std::abs(s.cur));
    if (m > 1e120 || (m < 1e-120 && m > 0.0)) {
        const double f = 1.0 / m;
        s.prev *= f;
        s.cur *= f;
        s.log_scale += std::log(m);
    }
}

double materialize(double mantissa, double log_scale, double x) {
    if (mantissa == 0.0) return 0.0;
    const double lg = std::log(std::abs(mantissa)) + log_scale - 0.5 * x * x;
    const double v = std::exp(lg);
    return mantissa > 0.0 ? v : -v;
}

} // namespace

double hermite_eval(int k, double x) {
    if (k < 0) throw std::invalid_argument("hermite_eval: negative index");
    std::vector<double> out(k + 1);
    hermite_eval_all(k, x, out);
    return out[k];
}

void hermite_eval_all(int kmax, double x, std::span<double> out) {
    if (kmax < 0) throw std::invalid_argument("hermite_eval_all: negative index");
    if (out.size() != static_cast<std::size_t>(kmax) + 1)
        throw std::invalid_argument("hermite_eval_all: output span size mismatch");
    ScaledPair s{0.0, std::exp(-kQuarterLogPi), 0.0};
    out[0] = materialize(s.cur, s.log_scale, x);
    for (int j = 0; j < kmax; ++j) {
        const double next =
            std::sqrt(2.0 / (j + 1)) * x * s.cur - std::sqrt(double(j) / (j + 1)) * s.prev;
        s.prev = s.cur;
        s.cur = next;
        rescale(s);
        out[j + 1] = materialize(s.cur, s.log_scale, x);
    }
}

double hermite_derivative(int k, double x) {
    if (k < 0) throw std::invalid_argument("hermite_derivative: negative index");
    const double lower = k == 0 ? 0.0 : std::sqrt(0.5 * k) * hermite_eval(k - 1, x);
    return lower - std::sqrt(0.5 * (k + 1)) * hermite_eval(k + 1, x);
}

const GaussHermiteRule& gauss_hermite(int order) {
    if (order < 1) throw std::invalid_argument("gauss_hermite: order must be positive");
    static std::map<int, GaussHermiteRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(order);
    if (it != cache.end()) return it->second;

    // Golub-Welsch nodes for the physicists' weight e^{-x^2}: Jacobi matrix
    // has zero diagonal and off-diagonal sqrt(i/2).
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(order, order);
    for (int i = 1; i < order; ++i) {
        const double b = std::sqrt(0.5 * i);
        J(i, i - 1) = b;
        J(i - 1, i) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("gauss_hermite: eigensolver failed");

    // Weights through the Christoffel function: w_i e^{x_i^2} is exactly
    // 1 / sum_{k<order} e_k(x_i)^2, which is well scaled at every node
    // (all nodes lie inside the oscillatory region of e_{order-1}).
    GaussHermiteRule rule;
    rule.nodes.resize(order);
    rule.plain_weights.resize(order);
    std::vector<double> ek(order);
    for (int i = 0; i < order; ++i) {
        const double x = es.eigenvalues()(i);
        rule.nodes[i] = x;
        hermite_eval_all(order - 1, x, ek);
        double sum = 0.0;
        for (int k = 0; k < order; ++k) sum += ek[k] * ek[k];
        rule.plain_weights[i] = 1.0 / sum;
    }
    return cache.emplace(order, std::move(rule)).first->second;
}

HermiteCoeffs hermite_coeffs(const std::function<double(double)>& f, int K, int quad_order) {
    if (K < 0) throw std::invalid_argument("hermite_coeffs: negative truncation");
    if (quad_order <= 0) quad_order = 2 * K + 32;
    const auto& rule = gauss_hermite(quad_order);

    HermiteCoeffs out;
    out.coeffs.assign(K + 1, 0.0);
    std::vector<double> ek(K + 1);
    for (int i = 0; i < quad_order; ++i) {
        const double x = rule.nodes[i];
        const double wf = rule.plain_weights[i] * f(x);
        if (wf == 0.0) continue;
        hermite_eval_all(K, x, ek);
        for (int k = 0; k <= K; ++k) out.coeffs[k] += wf * ek[k];
    }
    for (int k = 0; k <= K; ++k)
        if (!std::isfinite(out.coeffs[k]))
            throw std::runtime_error("hermite_coeffs: non-finite coefficient at k=" +
                                     std::to_string(k));
    return out;
}

HermiteCoeffs delta_coeffs(double t, int K) {
    if (K < 0) throw std::invalid_argument("delta_coeffs: negative truncation");
    HermiteCoeffs out;
    out.coeffs.resize(K + 1);
    hermite_eval_all(K, t, out.coeffs);
    return out;
}

SobolevNorm sobolev_norm(const HermiteCoeffs& c, int p) {
    double sum = 0.0;
    double csum = 0.0;
    for (std::size_t k = 0; k < c.coeffs.size(); ++k) {
        const double ck = c.coeffs[k];
        if (!std::isfinite(ck)) throw std::invalid_argument("sobolev_norm: non-finite input");
        sum += std::pow(2.0 * k + 2.0, 2.0 * p) * ck * ck;
        csum += ck * ck;
    }
    SobolevNorm out;
    out.value = std::sqrt(sum);
    if (p < 0) {
        const double K = static_cast<double>(c.coeffs.size()) - 1.0;
        out.tail_weight = std::pow(2.0 * K + 4.0, 2.0 * p) * csum;
    }
    return out;
}

double synthesize(const HermiteCoeffs& c, double x) {
    const int K = c.truncation();
    if (K < 0) return 0.0;
    std::vector<double> ek(K + 1);
    hermite_eval_all(K, x, ek);
    double sum = 0.0;
    for (int k = 0; k <= K; ++k) sum += c.coeffs[k] * ek[k];
    return sum;
}

} // namespace glt
