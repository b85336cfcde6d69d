#pragma once

#include "glt/kernels.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace glt {

/// Sampled realizations of G on a time grid with full provenance.
struct PathEnsemble {
    std::vector<double> grid;
    Eigen::MatrixXd paths;  // n_paths x n_times
    std::uint64_t seed = 0;
    Kernel kernel = Kernel::brownian();

    int n_paths() const { return static_cast<int>(paths.rows()); }
    int n_times() const { return static_cast<int>(paths.cols()); }
    double horizon() const { return grid.empty() ? 0.0 : grid.back(); }
};

/// t0 + i*(t1-t0)/steps for i = 0..steps.
std::vector<double> uniform_grid(double t0, double t1, int steps);

/// Centered Gaussian vectors with covariance [R_{t_i,t_j}], Cholesky with a
/// jitter ladder. Per-path counter-based streams keyed by (seed, path index);
/// identical output for any worker count. Dispatches to the convolution
/// sampler for vgamma kernels.
PathEnsemble sample_paths(const Kernel& k, std::span<const double> grid, int n,
                          std::uint64_t seed, int workers = 0);

/// Streaming variant: paths are produced in fixed-width blocks and handed to
/// `sink(first_path_index, block)` (block: block_rows x n_times).
void sample_paths_blocked(const Kernel& k, std::span<const double> grid, int n,
                          std::uint64_t seed,
                          const std::function<void(int, const Eigen::MatrixXd&)>& sink,
                          int workers = 0);

/// Discrete convolution G_{t_i} = sum_{u_j < t_i} eps(t_i - u_j) dW_j on a
/// refinement of the grid.
PathEnsemble sample_vgamma(double alpha, std::span<const double> grid, int n,
                           std::uint64_t seed, int refine = 8, int workers = 0);

/// Covariance realized by the discrete convolution construction (W W^T for
/// its weight matrix). The sampler is exact in law for THIS matrix; against
/// the continuous covariance it carries the advertised discretization bias.
Eigen::MatrixXd vgamma_discrete_covariance(double alpha, std::span<const double> grid,
                                           int refine = 8);

/// Worker count from the GLT_THREADS environment variable (default 1).
int default_workers();

void write_paths_csv(const PathEnsemble& e, const std::string& path);
void write_ensemble_sidecar(const PathEnsemble& e, const std::string& path);
PathEnsemble read_paths_csv(const std::string& csv_path, const Kernel& k,
                            std::span<const double> grid, std::uint64_t seed);

} // namespace glt
