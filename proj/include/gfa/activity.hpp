#pragma once

#include <string>
#include <vector>

#include "gfa/posterior.hpp"

namespace gfa {

using BinaryMatrix = Eigen::MatrixXi;

struct ViewVarianceStats {
    Vector total_variance;  ///< Tr(Sigma_m): summed sample variances, denominator N - 1
    Vector noise_variance;  ///< fitted <sigma_m^2>
    std::vector<bool> degenerate;  ///< views with zero total variance
};

ViewVarianceStats view_variance_stats(const DataCollection& data, const Posterior& posterior);

struct ActivityMatrix {
    BinaryMatrix F;          ///< K x M
    Matrix variance_share;   ///< K x M, <alpha>^-1 as rate / shape
    Vector threshold;        ///< per view
    double epsilon = 0.0;

    Index factors() const { return F.rows(); }
    Index cardinality(Index k) const { return F.row(k).sum(); }
    Index empty_count() const;
};

inline constexpr double kDefaultEpsilon = 1e-3;

/// f_{m,k} = 1 iff <alpha_{m,k}>^-1 > epsilon (Tr(Sigma_m) - sigma_m^2) / D_m.
/// A negative right-hand side is clamped to epsilon * 1e-12.
ActivityMatrix activity_matrix(const Posterior& posterior, const ViewVarianceStats& stats,
                               double epsilon = kDefaultEpsilon);

/// Factors by decreasing loading norm in one view; ties keep index order.
std::vector<Index> rank_by_norm(const Posterior& posterior, Index view);

/// Decreasing cardinality, then decreasing total loading norm.
std::vector<Index> default_factor_order(const ActivityMatrix& activity, const Posterior& posterior);

struct IscScores {
    Vector score;  ///< per factor, in [-1, 1]
    /// Per factor, number of segment pairs skipped because a segment was constant.
    std::vector<Index> degenerate_pairs;

    /// Factors by decreasing score; ties keep index order.
    std::vector<Index> order() const;
};

/// Mean pairwise Pearson correlation of each factor's latent trajectory
/// across `segments` equal-length consecutive blocks of rows.
IscScores isc_scores(const Matrix& z_mean, Index segments);

/// One line per factor in `order`, one character per view: '1' active, '.' inactive.
std::string format_grid(const ActivityMatrix& activity, const std::vector<Index>& order);

}  // namespace gfa
