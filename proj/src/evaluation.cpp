#include "gfa/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "gfa/error.hpp"

namespace gfa {

std::vector<Index> solve_assignment(const Matrix& cost) {
    // Hungarian method with row/column potentials, O(n^3).
    const Index n = cost.rows();
    if (cost.cols() != n) throw UsageError("assignment cost matrix must be square");
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<Index> p(n + 1, 0), way(n + 1, 0);
    for (Index i = 1; i <= n; ++i) {
        p[0] = i;
        Index j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<bool> used(n + 1, false);
        do {
            used[j0] = true;
            const Index i0 = p[j0];
            double delta = inf;
            Index j1 = 0;
            for (Index j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (Index j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const Index j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<Index> row_to_col(static_cast<std::size_t>(n));
    for (Index j = 1; j <= n; ++j) row_to_col[p[j] - 1] = j - 1;
    return row_to_col;
}

FactorMatching match_factors(const Matrix& w_est, const Matrix& w_true) {
    if (w_est.rows() != w_true.rows())
        throw UsageError("loading matrices have different row counts (" + std::to_string(w_est.rows()) +
                         " vs " + std::to_string(w_true.rows()) + ")");
    const Index k1 = w_est.cols();
    const Index k2 = w_true.cols();
    if (k1 < 1 || k2 < 1) throw UsageError("loading matrices need at least one column");
    const Index n = std::max(k1, k2);
    const Index d = w_est.rows();
    Matrix est = Matrix::Zero(d, n);
    Matrix tru = Matrix::Zero(d, n);
    est.leftCols(k1) = w_est;
    tru.leftCols(k2) = w_true;

    Matrix cost(n, n);
    Eigen::MatrixXi sign(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) {
            const double plus = (est.col(i) - tru.col(j)).squaredNorm();
            const double minus = (est.col(i) + tru.col(j)).squaredNorm();
            sign(i, j) = plus <= minus ? 1 : -1;
            cost(i, j) = std::min(plus, minus);
        }

    const auto assignment = solve_assignment(cost);
    FactorMatching out;
    out.width = n;
    out.est_to_true.assign(static_cast<std::size_t>(k1), -1);
    out.true_to_est.assign(static_cast<std::size_t>(k2), -1);
    out.signs.assign(static_cast<std::size_t>(k1), 1);
    double total = 0.0;
    for (Index i = 0; i < n; ++i) {
        const Index j = assignment[i];
        total += cost(i, j);
        if (i < k1) {
            out.signs[i] = sign(i, j);
            if (j < k2) out.est_to_true[i] = j;
        }
        if (j < k2 && i < k1) out.true_to_est[j] = i;
    }
    out.w_mse = total / static_cast<double>(d * n);
    return out;
}

FactorMatching match_binary(const BinaryMatrix& f_est, const BinaryMatrix& f_true) {
    return match_factors(f_est.cast<double>().transpose(), f_true.cast<double>().transpose());
}

double f_error(const BinaryMatrix& f_est, const BinaryMatrix& f_true, const FactorMatching& m) {
    if (f_est.cols() != f_true.cols()) throw UsageError("activity matrices have different view counts");
    if (static_cast<Index>(m.est_to_true.size()) != f_est.rows() ||
        static_cast<Index>(m.true_to_est.size()) != f_true.rows())
        throw UsageError("matching does not fit the activity matrices");
    const Index n = std::max(f_est.rows(), f_true.rows());
    double errors = 0.0;
    for (Index i = 0; i < f_est.rows(); ++i) {
        const Index j = m.est_to_true[i];
        errors += j >= 0 ? (f_est.row(i) - f_true.row(j)).cwiseAbs().sum() : f_est.row(i).sum();
    }
    for (Index j = 0; j < f_true.rows(); ++j)
        if (m.true_to_est[j] < 0) errors += f_true.row(j).sum();
    return errors / static_cast<double>(n * f_est.cols());
}

std::vector<Index> cardinality_curve(const BinaryMatrix& F) {
    std::vector<Index> out;
    for (Index k = 0; k < F.rows(); ++k) {
        const Index c = F.row(k).sum();
        if (c > 0) out.push_back(c);
    }
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

std::vector<std::pair<Index, Index>> matched_cardinalities(const BinaryMatrix& f_est,
                                                           const BinaryMatrix& f_true,
                                                           const FactorMatching& matching) {
    std::vector<std::pair<Index, Index>> out;
    for (Index j = 0; j < f_true.rows(); ++j) {
        const Index i = matching.true_to_est.at(j);
        out.emplace_back(f_true.row(j).sum(), i >= 0 ? f_est.row(i).sum() : 0);
    }
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    return out;
}

double retrieval_map(const Matrix& z_mean, const std::vector<std::vector<int>>& labels,
                     const std::vector<Index>& factor_subset) {
    const Index n = z_mean.rows();
    if (n < 2) throw UsageError("retrieval needs at least 2 items");
    if (static_cast<Index>(labels.size()) != n) throw UsageError("one label set per item is required");

    std::vector<Index> cols = factor_subset;
    if (cols.empty()) {
        cols.resize(static_cast<std::size_t>(z_mean.cols()));
        std::iota(cols.begin(), cols.end(), Index{0});
    }
    Matrix rows(n, static_cast<Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) {
        if (cols[c] < 0 || cols[c] >= z_mean.cols()) throw UsageError("factor index out of range");
        rows.col(static_cast<Index>(c)) = z_mean.col(cols[c]);
    }
    // Row-standardize so correlation is a dot product; constant rows stay zero.
    for (Index i = 0; i < n; ++i) {
        rows.row(i).array() -= rows.row(i).mean();
        const double norm = rows.row(i).norm();
        if (norm > 0.0) rows.row(i) /= norm;
    }
    const Matrix corr = rows * rows.transpose();

    auto shares_label = [&](Index a, Index b) {
        for (int x : labels[a])
            if (std::find(labels[b].begin(), labels[b].end(), x) != labels[b].end()) return true;
        return false;
    };

    double total = 0.0;
    Index queries = 0;
    std::vector<Index> others;
    for (Index q = 0; q < n; ++q) {
        others.clear();
        Index relevant = 0;
        for (Index i = 0; i < n; ++i)
            if (i != q) {
                others.push_back(i);
                relevant += shares_label(q, i) ? 1 : 0;
            }
        if (relevant == 0) continue;
        std::stable_sort(others.begin(), others.end(),
                         [&](Index a, Index b) { return corr(q, a) > corr(q, b); });
        double precision_sum = 0.0;
        Index hits = 0;
        for (std::size_t r = 0; r < others.size(); ++r)
            if (shares_label(q, others[r])) {
                ++hits;
                precision_sum += static_cast<double>(hits) / static_cast<double>(r + 1);
            }
        total += precision_sum / static_cast<double>(relevant);
        ++queries;
    }
    if (queries == 0) throw UsageError("no query item shares a label with another item");
    return total / static_cast<double>(queries);
}

}  // namespace gfa
