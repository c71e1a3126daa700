#include "gfa/activity.hpp"

#include <algorithm>
#include <numeric>

#include "gfa/error.hpp"

namespace gfa {

namespace {

constexpr double kThresholdFloor = 1e-12;

std::vector<Index> stable_order_desc(const Vector& key) {
    std::vector<Index> order(static_cast<std::size_t>(key.size()));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return key(a) > key(b); });
    return order;
}

}  // namespace

ViewVarianceStats view_variance_stats(const DataCollection& data, const Posterior& posterior) {
    const Index views = data.view_count();
    if (posterior.view_count() != views)
        throw UsageError("posterior and data disagree on the number of views");
    ViewVarianceStats stats;
    stats.total_variance.resize(views);
    stats.noise_variance.resize(views);
    stats.degenerate.assign(static_cast<std::size_t>(views), false);
    const double denom = static_cast<double>(data.n_samples() - 1);
    for (Index m = 0; m < views; ++m) {
        const auto x = data.view(m);
        const Matrix centered = x.rowwise() - x.colwise().mean();
        stats.total_variance(m) = centered.squaredNorm() / denom;
        stats.degenerate[m] = !(stats.total_variance(m) > 0.0);
        const double shape = posterior.tau_shape(m);
        const double rate = posterior.tau_rate(m);
        stats.noise_variance(m) = shape > 1.0 ? rate / (shape - 1.0) : rate / shape;
    }
    return stats;
}

Index ActivityMatrix::empty_count() const {
    Index count = 0;
    for (Index k = 0; k < F.rows(); ++k) count += F.row(k).sum() == 0 ? 1 : 0;
    return count;
}

ActivityMatrix activity_matrix(const Posterior& posterior, const ViewVarianceStats& stats, double epsilon) {
    if (!(epsilon > 0)) throw UsageError("epsilon must be positive");
    const Index k = posterior.factors();
    const Index views = posterior.view_count();
    ActivityMatrix a;
    a.epsilon = epsilon;
    a.variance_share = posterior.alpha_rate.cwiseQuotient(posterior.alpha_shape);
    a.threshold.resize(views);
    a.F = BinaryMatrix::Zero(k, views);
    for (Index m = 0; m < views; ++m) {
        const double dm = static_cast<double>(posterior.w_mean[m].rows());
        const double signal = (stats.total_variance(m) - stats.noise_variance(m)) / dm;
        a.threshold(m) = signal > 0.0 ? epsilon * signal : epsilon * kThresholdFloor;
        for (Index f = 0; f < k; ++f) a.F(f, m) = a.variance_share(f, m) > a.threshold(m) ? 1 : 0;
    }
    return a;
}

std::vector<Index> rank_by_norm(const Posterior& posterior, Index view) {
    if (view < 0 || view >= posterior.view_count()) throw UsageError("view index out of range");
    return stable_order_desc(posterior.w_mean[view].colwise().norm().transpose());
}

std::vector<Index> default_factor_order(const ActivityMatrix& activity, const Posterior& posterior) {
    const Vector norms = posterior.loadings().colwise().norm().transpose();
    std::vector<Index> order(static_cast<std::size_t>(activity.factors()));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
        const Index ca = activity.cardinality(a);
        const Index cb = activity.cardinality(b);
        if (ca != cb) return ca > cb;
        return norms(a) > norms(b);
    });
    return order;
}

std::vector<Index> IscScores::order() const { return stable_order_desc(score); }

IscScores isc_scores(const Matrix& z_mean, Index segments) {
    const Index n = z_mean.rows();
    if (segments < 2) throw UsageError("inter-subject correlation needs at least 2 segments");
    if (n % segments != 0) throw UsageError("rows do not split into equal-length segments");
    const Index length = n / segments;
    if (length < 2) throw UsageError("segments must contain at least 2 rows");

    IscScores out;
    out.score = Vector::Zero(z_mean.cols());
    out.degenerate_pairs.assign(static_cast<std::size_t>(z_mean.cols()), 0);
    const double pairs = static_cast<double>(segments * (segments - 1) / 2);
    for (Index k = 0; k < z_mean.cols(); ++k) {
        std::vector<Vector> centered;
        std::vector<double> norms;
        for (Index s = 0; s < segments; ++s) {
            Vector seg = z_mean.col(k).segment(s * length, length);
            seg.array() -= seg.mean();
            norms.push_back(seg.norm());
            centered.push_back(std::move(seg));
        }
        double total = 0.0;
        for (Index a = 0; a < segments; ++a) {
            for (Index b = a + 1; b < segments; ++b) {
                if (norms[a] == 0.0 || norms[b] == 0.0) {
                    ++out.degenerate_pairs[k];
                    continue;
                }
                const double r = centered[a].dot(centered[b]) / (norms[a] * norms[b]);
                total += std::clamp(r, -1.0, 1.0);
            }
        }
        out.score(k) = total / pairs;
    }
    return out;
}

std::string format_grid(const ActivityMatrix& activity, const std::vector<Index>& order) {
    std::string out;
    const int width = static_cast<int>(std::to_string(std::max<Index>(activity.factors() - 1, 0)).size());
    for (Index k : order) {
        std::string label = std::to_string(k);
        out += std::string(static_cast<std::size_t>(width) - label.size(), ' ') + label + ' ';
        for (Index m = 0; m < activity.F.cols(); ++m) out += activity.F(k, m) ? '1' : '.';
        out += '\n';
    }
    return out;
}

}  // namespace gfa
