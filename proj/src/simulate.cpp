#include "glt/simulate.hpp"

#include "glt/rng.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace glt {

namespace {

constexpr int kBlockCols = 256;  // fixed so worker partitioning never moves block edges

void check_grid(const Kernel& k, std::span<const double> grid) {
    if (grid.empty()) throw std::invalid_argument("sample_paths: empty grid");
    for (double t : grid)
        if (!k.in_domain(t)) throw std::invalid_argument("sample_paths: grid leaves domain");
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        if (!(grid[i] < grid[i + 1]))
            throw std::invalid_argument("sample_paths: grid must be strictly increasing");
}

// Cholesky factor of the covariance restricted to positive-variance grid
// points; `active[i]` marks them. Jitter ladder 1e-12*trace -> 1e-6*trace.
struct Factor {
    Eigen::MatrixXd L;
    std::vector<int> active;  // indices into the grid
};

Factor covariance_factor(const Kernel& k, std::span<const double> grid) {
    Factor f;
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (k.variance(grid[i]) > 0.0) f.active.push_back(static_cast<int>(i));
    const int m = static_cast<int>(f.active.size());
    if (m == 0) {
        f.L.resize(0, 0);
        return f;
    }
    Eigen::MatrixXd C(m, m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j <= i; ++j) {
            const double v = k.covariance(grid[f.active[i]], grid[f.active[j]]);
            C(i, j) = v;
            C(j, i) = v;
        }
    }
    const double trace = C.trace();
    double jitter = 1e-12 * trace;
    const double max_jitter = 1e-6 * trace;
    Eigen::MatrixXd work = C;
    while (true) {
        Eigen::LLT<Eigen::MatrixXd> llt(work);
        if (llt.info() == Eigen::Success) {
            f.L = llt.matrixL();
            return f;
        }
        if (jitter > max_jitter) break;
        work = C;
        work.diagonal().array() += jitter;
        jitter *= 10.0;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C, Eigen::EigenvaluesOnly);
    throw std::runtime_error("sample_paths: Cholesky failed after max jitter; smallest "
                             "eigenvalue " +
                             std::to_string(es.eigenvalues().minCoeff()));
}

// Standard-normal block, one column per path, filled from per-path streams.
Eigen::MatrixXd normal_block(std::uint64_t seed, int first_path, int cols, int draws) {
    Eigen::MatrixXd Z(draws, cols);
    for (int c = 0; c < cols; ++c) {
        CounterRng rng(seed, static_cast<std::uint64_t>(first_path + c));
        for (int r = 0; r < draws; ++r) Z(r, c) = rng.normal();
    }
    return Z;
}

void run_blocks(int n, int workers, const std::function<void(int, int)>& block_fn) {
    const int n_blocks = (n + kBlockCols - 1) / kBlockCols;
    if (workers <= 1) {
        for (int b = 0; b < n_blocks; ++b)
            block_fn(b * kBlockCols, std::min(kBlockCols, n - b * kBlockCols));
        return;
    }
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            for (int b = w; b < n_blocks; b += workers)
                block_fn(b * kBlockCols, std::min(kBlockCols, n - b * kBlockCols));
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace

int default_workers() {
    if (const char* env = std::getenv("GLT_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    return 1;
}

std::vector<double> uniform_grid(double t0, double t1, int steps) {
    if (steps < 1 || !(t0 < t1)) throw std::invalid_argument("uniform_grid: bad arguments");
    std::vector<double> g(steps + 1);
    for (int i = 0; i <= steps; ++i) g[i] = t0 + (t1 - t0) * i / steps;
    return g;
}

void sample_paths_blocked(const Kernel& k, std::span<const double> grid, int n,
                          std::uint64_t seed,
                          const std::function<void(int, const Eigen::MatrixXd&)>& sink,
                          int workers) {
    if (n < 1) throw std::invalid_argument("sample_paths: n must be >= 1");
    check_grid(k, grid);
    if (workers <= 0) workers = default_workers();
    const int m = static_cast<int>(grid.size());

    if (k.kind() == KernelKind::vgamma) {
        const auto e = sample_vgamma(k.alpha(), grid, n, seed, 8, workers);
        for (int first = 0; first < n; first += kBlockCols) {
            const int cols = std::min(kBlockCols, n - first);
            sink(first, e.paths.middleRows(first, cols));
        }
        return;
    }

    if (k.kind() == KernelKind::bm && grid[0] >= 0.0) {
        // closed-form factor of the min-covariance: cumulative sums of
        // sqrt(increment) normals
        std::vector<double> sq(m);
        sq[0] = std::sqrt(grid[0]);
        for (int i = 1; i < m; ++i) sq[i] = std::sqrt(grid[i] - grid[i - 1]);
        run_blocks(n, workers, [&](int first, int cols) {
            Eigen::MatrixXd block(cols, m);
            for (int c = 0; c < cols; ++c) {
                CounterRng rng(seed, static_cast<std::uint64_t>(first + c));
                double acc = 0.0;
                for (int i = 0; i < m; ++i) {
                    acc += sq[i] * rng.normal();
                    block(c, i) = acc;
                }
            }
            sink(first, block);
        });
        return;
    }

    const Factor f = covariance_factor(k, grid);
    const int ma = static_cast<int>(f.active.size());
    run_blocks(n, workers, [&](int first, int cols) {
        Eigen::MatrixXd block = Eigen::MatrixXd::Zero(cols, m);
        if (ma > 0) {
            const Eigen::MatrixXd Z = normal_block(seed, first, cols, ma);
            const Eigen::MatrixXd P = f.L.triangularView<Eigen::Lower>() * Z;  // ma x cols
            for (int c = 0; c < cols; ++c)
                for (int i = 0; i < ma; ++i) block(c, f.active[i]) = P(i, c);
        }
        sink(first, block);
    });
}

PathEnsemble sample_paths(const Kernel& k, std::span<const double> grid, int n,
                          std::uint64_t seed, int workers) {
    PathEnsemble e;
    e.grid.assign(grid.begin(), grid.end());
    e.seed = seed;
    e.kernel = k;
    e.paths.resize(n, static_cast<int>(grid.size()));
    sample_paths_blocked(k, grid, n, seed,
                         [&](int first, const Eigen::MatrixXd& block) {
                             e.paths.middleRows(first, block.rows()) = block;
                         },
                         workers);
    return e;
}

namespace {

// Weight matrix of the discrete convolution: W(i,j) = eps(t_i - u_j) sqrt(du_j)
// over the refinement cells [u_j, u_{j+1}) strictly before t_i.
Eigen::MatrixXd vgamma_weights(const Kernel& k, std::span<const double> grid, int refine) {
    const int m = static_cast<int>(grid.size());
    std::vector<double> fine;
    fine.push_back(0.0);
    double prev = 0.0;
    for (int i = 0; i < m; ++i) {
        const double t = grid[i];
        if (t <= prev) continue;
        for (int r = 1; r <= refine; ++r) fine.push_back(prev + (t - prev) * r / refine);
        prev = t;
    }
    const int M = static_cast<int>(fine.size()) - 1;
    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(m, M);
    for (int i = 0; i < m; ++i) {
        const double t = grid[i];
        if (t <= 0.0) continue;
        for (int j = 0; j < M; ++j) {
            if (fine[j] >= t - 1e-15) break;
            const double du = fine[j + 1] - fine[j];
            W(i, j) = k.epsilon(t - fine[j]) * std::sqrt(du);
        }
    }
    return W;
}

} // namespace

Eigen::MatrixXd vgamma_discrete_covariance(double alpha, std::span<const double> grid,
                                           int refine) {
    const Kernel k = Kernel::v_gamma(alpha);
    check_grid(k, grid);
    const Eigen::MatrixXd W = vgamma_weights(k, grid, refine);
    return W * W.transpose();
}

PathEnsemble sample_vgamma(double alpha, std::span<const double> grid, int n,
                           std::uint64_t seed, int refine, int workers) {
    if (alpha <= 0.0 || alpha >= 1.0)
        throw std::invalid_argument("sample_vgamma: alpha must be in (0,1)");
    if (n < 1) throw std::invalid_argument("sample_vgamma: n must be >= 1");
    if (refine < 1) throw std::invalid_argument("sample_vgamma: refine must be >= 1");
    const Kernel k = Kernel::v_gamma(alpha);
    check_grid(k, grid);
    if (workers <= 0) workers = default_workers();
    const int m = static_cast<int>(grid.size());
    const Eigen::MatrixXd W = vgamma_weights(k, grid, refine);
    const int M = static_cast<int>(W.cols());

    PathEnsemble e;
    e.grid.assign(grid.begin(), grid.end());
    e.seed = seed;
    e.kernel = k;
    e.paths.resize(n, m);
    run_blocks(n, workers, [&](int first, int cols) {
        const Eigen::MatrixXd Z = normal_block(seed, first, cols, M);
        const Eigen::MatrixXd P = W * Z;  // m x cols
        for (int c = 0; c < cols; ++c) e.paths.row(first + c) = P.col(c).transpose();
    });
    return e;
}

void write_paths_csv(const PathEnsemble& e, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_paths_csv: cannot open " + path);
    char buf[40];
    for (int r = 0; r < e.n_paths(); ++r) {
        for (int c = 0; c < e.n_times(); ++c) {
            std::snprintf(buf, sizeof(buf), "%.17g", e.paths(r, c));
            if (c) out << ',';
            out << buf;
        }
        out << '\n';
    }
}

void write_ensemble_sidecar(const PathEnsemble& e, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_ensemble_sidecar: cannot open " + path);
    char buf[40];
    out << "{\n  \"kernel\": \"" << e.kernel.label() << "\",\n";
    out << "  \"seed\": " << e.seed << ",\n";
    out << "  \"n_paths\": " << e.n_paths() << ",\n  \"grid\": [";
    for (std::size_t i = 0; i < e.grid.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", e.grid[i]);
        out << (i ? "," : "") << buf;
    }
    out << "]\n}\n";
}

PathEnsemble read_paths_csv(const std::string& csv_path, const Kernel& k,
                            std::span<const double> grid, std::uint64_t seed) {
    std::ifstream in(csv_path, std::ios::binary);
    if (!in) throw std::runtime_error("read_paths_csv: cannot open " + csv_path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(std::move(row));
    }
    PathEnsemble e;
    e.grid.assign(grid.begin(), grid.end());
    e.seed = seed;
    e.kernel = k;
    e.paths.resize(static_cast<int>(rows.size()), static_cast<int>(grid.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != grid.size())
            throw std::runtime_error("read_paths_csv: column count mismatch");
        for (std::size_t c = 0; c < rows[r].size(); ++c)
            e.paths(static_cast<int>(r), static_cast<int>(c)) = rows[r][c];
    }
    return e;
}

} // namespace glt
