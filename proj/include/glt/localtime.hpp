#pragma once

#include "glt/simulate.hpp"

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace glt {

enum class Weighting { lebesgue, dR };

/// Uniform level bins [lo, lo+width), ...; estimators extend the range as
/// needed to cover the sampled paths, keeping the edge lattice.
struct BinSpec {
    double lo = 0.0;
    double hi = 0.0;
    double width = 0.0;

    /// Bins with `center` at the center of one bin, half_bins on each side.
    static BinSpec centered(double center, double width, int half_bins);
};

/// Histogram local-time estimates per path at checkpoint times.
struct LocalTimeField {
    std::vector<double> edges;   // bins()+1 ascending, uniform width
    std::vector<double> times;   // checkpoint times, last = horizon
    Weighting weighting = Weighting::lebesgue;
    std::string occupancy_note;  // discretization convention
    std::vector<Eigen::MatrixXd> per_path;  // each: times.size() x bins()

    int bins() const { return static_cast<int>(edges.size()) - 1; }
    double binwidth() const { return edges.size() > 1 ? edges[1] - edges[0] : 0.0; }
    int bin_index(double level) const;  // -1 outside
    double bin_center(int b) const { return 0.5 * (edges[b] + edges[b + 1]); }
    Eigen::VectorXd ensemble_mean(std::size_t time_idx) const;
    double value(int path, std::size_t time_idx, int bin) const;
};

/// lhat(bin, t_j) = sum_{i<j} dt_i 1{G_{t_i} in bin} / binwidth, cumulative;
/// left-endpoint occupancy (G_{t_i} weights the cell [t_i, t_{i+1})).
LocalTimeField estimate_localtime(const PathEnsemble& e, const BinSpec& bins,
                                  std::span<const double> checkpoints = {});

/// Same with dR_i = R_{t_{i+1}} - R_{t_i} in place of dt_i.
LocalTimeField estimate_weighted_localtime(const PathEnsemble& e, const BinSpec& bins,
                                           std::span<const double> checkpoints = {});

/// | sum_i Phi(G_{t_i}) w_i  -  sum_bins field(bin,T) Phi(center) binwidth |
/// with w matching the field's weighting. `expected` guards against feeding
/// a field of the wrong weighting.
double occupation_residual(const PathEnsemble& e, int path_index,
                           const std::function<double(double)>& Phi,
                           const LocalTimeField& field);
double occupation_residual(const PathEnsemble& e, int path_index,
                           const std::function<double(double)>& Phi,
                           const LocalTimeField& field, Weighting expected);

struct IbpResult {
    double mean_abs_residual = 0.0;
    double mean_weighted_localtime = 0.0;
};

/// Ensemble mean of |Lhat_T(a) - lhat_s(a) R'_s|_{s=T} + lim_{s->0} lhat R'
/// + sum_i lhat_{t_i}(a) R''_{t_i} dt_i| (integration-by-parts relation).
IbpResult ibp_residual(const PathEnsemble& e, double a, double T, double binwidth = 0.0);

/// 0.04 * sqrt(R_T).
double default_binwidth(const Kernel& k, double T);

void write_field_csv(const LocalTimeField& field, const std::string& path);

} // namespace glt
