#include "glt/localtime.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace glt {

BinSpec BinSpec::centered(double center, double width, int half_bins) {
    if (width <= 0.0 || half_bins < 0) throw std::invalid_argument("BinSpec: bad parameters");
    BinSpec b;
    b.width = width;
    b.lo = center - (half_bins + 0.5) * width;
    b.hi = center + (half_bins + 0.5) * width;
    return b;
}

int LocalTimeField::bin_index(double level) const {
    if (edges.size() < 2 || level < edges.front() || level >= edges.back()) return -1;
    return static_cast<int>((level - edges.front()) / binwidth());
}

Eigen::VectorXd LocalTimeField::ensemble_mean(std::size_t time_idx) const {
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(bins());
    for (const auto& m : per_path) mean += m.row(static_cast<int>(time_idx)).transpose();
    if (!per_path.empty()) mean /= static_cast<double>(per_path.size());
    return mean;
}

double LocalTimeField::value(int path, std::size_t time_idx, int bin) const {
    return per_path.at(path)(static_cast<int>(time_idx), bin);
}

namespace {

// Extend [lo,hi) along its own lattice until the sampled range is covered.
std::vector<double> build_edges(const BinSpec& spec, double sample_min, double sample_max) {
    if (spec.width <= 0.0) throw std::invalid_argument("estimate_localtime: bin width must be > 0");
    double lo = spec.lo, hi = std::max(spec.hi, spec.lo + spec.width);
    while (sample_min < lo) lo -= spec.width * std::ceil((lo - sample_min) / spec.width);
    while (sample_max >= hi) hi += spec.width * std::ceil((sample_max - hi) / spec.width + 1.0);
    const int n = static_cast<int>(std::lround((hi - lo) / spec.width));
    std::vector<double> edges(n + 1);
    for (int i = 0; i <= n; ++i) edges[i] = lo + i * spec.width;
    return edges;
}

std::vector<int> checkpoint_indices(const PathEnsemble& e, std::span<const double> checkpoints) {
    std::vector<int> idx;
    if (checkpoints.empty()) {
        idx.push_back(e.n_times() - 1);
        return idx;
    }
    for (double c : checkpoints) {
        const auto it = std::lower_bound(e.grid.begin(), e.grid.end(), c - 1e-12);
        if (it == e.grid.end()) throw std::invalid_argument("checkpoint beyond grid");
        idx.push_back(static_cast<int>(it - e.grid.begin()));
    }
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    return idx;
}

LocalTimeField estimate(const PathEnsemble& e, const BinSpec& spec,
                        std::span<const double> checkpoints, Weighting weighting) {
    if (e.n_times() < 2) throw std::invalid_argument("estimate_localtime: empty grid");

    // cell weights
    std::vector<double> w(e.n_times() - 1);
    if (weighting == Weighting::lebesgue) {
        for (int i = 0; i + 1 < e.n_times(); ++i) w[i] = e.grid[i + 1] - e.grid[i];
    } else {
        const auto m = dR_measure(e.kernel, e.grid);
        w = m.increments;
    }

    LocalTimeField field;
    field.weighting = weighting;
    field.occupancy_note =
        "left-endpoint occupancy: G_{t_i} weights the cell [t_i, t_{i+1})";
    field.edges = build_edges(spec, e.paths.minCoeff(), e.paths.maxCoeff());
    const auto cps = checkpoint_indices(e, checkpoints);
    field.times.reserve(cps.size());
    for (int c : cps) field.times.push_back(e.grid[c]);

    const int nb = field.bins();
    const double bw = field.binwidth();
    const double lo = field.edges.front();
    field.per_path.reserve(e.n_paths());
    for (int p = 0; p < e.n_paths(); ++p) {
        Eigen::MatrixXd snap = Eigen::MatrixXd::Zero(static_cast<int>(cps.size()), nb);
        Eigen::VectorXd hist = Eigen::VectorXd::Zero(nb);
        std::size_t next_cp = 0;
        for (int i = 0; i + 1 < e.n_times(); ++i) {
            while (next_cp < cps.size() && cps[next_cp] == i) {
                snap.row(static_cast<int>(next_cp)) = hist.transpose() / bw;
                ++next_cp;
            }
            const int b = static_cast<int>((e.paths(p, i) - lo) / bw);
            if (b >= 0 && b < nb) hist(b) += w[i];
        }
        while (next_cp < cps.size()) {
            snap.row(static_cast<int>(next_cp)) = hist.transpose() / bw;
            ++next_cp;
        }
        field.per_path.push_back(std::move(snap));
    }
    return field;
}

} // namespace

LocalTimeField estimate_localtime(const PathEnsemble& e, const BinSpec& bins,
                                  std::span<const double> checkpoints) {
    return estimate(e, bins, checkpoints, Weighting::lebesgue);
}

LocalTimeField estimate_weighted_localtime(const PathEnsemble& e, const BinSpec& bins,
                                           std::span<const double> checkpoints) {
    return estimate(e, bins, checkpoints, Weighting::dR);
}

double occupation_residual(const PathEnsemble& e, int path_index,
                           const std::function<double(double)>& Phi,
                           const LocalTimeField& field) {
    if (path_index < 0 || path_index >= e.n_paths())
        throw std::invalid_argument("occupation_residual: path index out of range");
    if (field.per_path.size() != static_cast<std::size_t>(e.n_paths()))
        throw std::invalid_argument("occupation_residual: field does not match ensemble");

    std::vector<double> w(e.n_times() - 1);
    if (field.weighting == Weighting::lebesgue) {
        for (int i = 0; i + 1 < e.n_times(); ++i) w[i] = e.grid[i + 1] - e.grid[i];
    } else {
        w = dR_measure(e.kernel, e.grid).increments;
    }

    double lhs = 0.0;
    for (int i = 0; i + 1 < e.n_times(); ++i) lhs += Phi(e.paths(path_index, i)) * w[i];

    const std::size_t t_idx = field.times.size() - 1;
    double rhs = 0.0;
    const double bw = field.binwidth();
    for (int b = 0; b < field.bins(); ++b)
        rhs += field.value(path_index, t_idx, b) * Phi(field.bin_center(b)) * bw;
    return std::abs(lhs - rhs);
}

double occupation_residual(const PathEnsemble& e, int path_index,
                           const std::function<double(double)>& Phi,
                           const LocalTimeField& field, Weighting expected) {
    if (expected != field.weighting)
        throw std::invalid_argument("occupation_residual: weighting mismatch with field");
    return occupation_residual(e, path_index, Phi, field);
}

IbpResult ibp_residual(const PathEnsemble& e, double a, double T, double binwidth) {
    const Kernel& k = e.kernel;
    if (!k.has_variance_second_derivative())
        throw std::runtime_error("ibp_residual: R'' unavailable for " + k.name());
    if (e.n_times() < 2) throw std::invalid_argument("ibp_residual: empty grid");
    if (binwidth <= 0.0) binwidth = default_binwidth(k, T);

    int m = e.n_times();
    while (m > 1 && e.grid[m - 1] > T + 1e-12) --m;
    const double lo = a - 0.5 * binwidth, hi = a + 0.5 * binwidth;

    const auto dR = dR_measure(k, std::span<const double>(e.grid.data(), m));
    const double RpT = k.variance_derivative(e.grid[m - 1]);
    std::vector<double> rpp(m);
    for (int i = 1; i < m; ++i) rpp[i] = k.variance_second_derivative(e.grid[i]);

    IbpResult out;
    for (int p = 0; p < e.n_paths(); ++p) {
        double weighted = 0.0;  // Lhat_T(a)
        double lhat = 0.0;      // lhat_{t_i}(a), running
        double quad = 0.0;      // sum lhat_{t_i} R''_{t_i} dt_i
        for (int i = 0; i + 1 < m; ++i) {
            const bool in = e.paths(p, i) >= lo && e.paths(p, i) < hi;
            if (in) weighted += dR.increments[i] / binwidth;
            // lhat at t_{i+1} after absorbing cell i; quadrature contribution
            // of node t_{i+1} uses the cell [t_{i+1}, t_{i+2})
            if (in) lhat += (e.grid[i + 1] - e.grid[i]) / binwidth;
            if (i + 2 < m) quad += lhat * rpp[i + 1] * (e.grid[i + 2] - e.grid[i + 1]);
        }
        // boundary term at s->0 vanishes: lhat at the grid start is an empty sum
        out.mean_abs_residual += std::abs(weighted - lhat * RpT + quad);
        out.mean_weighted_localtime += weighted;
    }
    out.mean_abs_residual /= e.n_paths();
    out.mean_weighted_localtime /= e.n_paths();
    return out;
}

double default_binwidth(const Kernel& k, double T) {
    return 0.04 * std::sqrt(k.variance(T));
}

void write_field_csv(const LocalTimeField& field, const std::string& path) {
    if (field.per_path.empty()) throw std::invalid_argument("write_field_csv: empty field");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_field_csv: cannot open " + path);
    char buf[40];
    out << "level,time,value\n";
    const auto mean_at = [&](std::size_t ti) { return field.ensemble_mean(ti); };
    for (std::size_t ti = 0; ti < field.times.size(); ++ti) {
        const Eigen::VectorXd mean = mean_at(ti);
        for (int b = 0; b < field.bins(); ++b) {
            std::snprintf(buf, sizeof(buf), "%.17g", field.bin_center(b));
            out << buf << ',';
            std::snprintf(buf, sizeof(buf), "%.17g", field.times[ti]);
            out << buf << ',';
            std::snprintf(buf, sizeof(buf), "%.17g", mean(b));
            out << buf << '\n';
        }
    }
}

} // namespace glt
