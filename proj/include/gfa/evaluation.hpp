#pragma once

#include <utility>
#include <vector>

#include "gfa/activity.hpp"

namespace gfa {

/// Exact minimum-cost perfect matching on a square cost matrix.
/// Returns, for each row, the assigned column.
std::vector<Index> solve_assignment(const Matrix& cost);

/// Optimal one-to-one pairing of estimated and true factors, up to sign.
/// The narrower side is padded with zero columns to width max(K1, K2).
struct FactorMatching {
    std::vector<Index> est_to_true;  ///< size K1; -1 when paired with padding
    std::vector<Index> true_to_est;  ///< size K2; -1 when paired with padding
    std::vector<int> signs;          ///< size K1
    double w_mse = 0.0;
    Index width = 0;  ///< max(K1, K2)
};

FactorMatching match_factors(const Matrix& w_est, const Matrix& w_true);

/// Matching of binary rows directly, for when no loadings are available.
FactorMatching match_binary(const BinaryMatrix& f_est, const BinaryMatrix& f_true);

/// Mean absolute per-entry error between matched rows, padding with zero rows.
double f_error(const BinaryMatrix& f_est, const BinaryMatrix& f_true, const FactorMatching& matching);

/// Row sums in decreasing order, zero rows dropped.
std::vector<Index> cardinality_curve(const BinaryMatrix& F);

/// For every true factor, (true cardinality, cardinality of its matched
/// estimate or 0), ordered by decreasing true cardinality.
std::vector<std::pair<Index, Index>> matched_cardinalities(const BinaryMatrix& f_est,
                                                           const BinaryMatrix& f_true,
                                                           const FactorMatching& matching);

/// Mean average precision of label retrieval, ranking items by Pearson
/// correlation of their latent rows restricted to `factor_subset` (all
/// factors when empty). Queries without any co-labeled item are skipped.
double retrieval_map(const Matrix& z_mean, const std::vector<std::vector<int>>& labels,
                     const std::vector<Index>& factor_subset = {});

}  // namespace gfa
