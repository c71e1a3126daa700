#include "gfa/posterior.hpp"

#include "gfa/error.hpp"

namespace gfa {

std::string to_string(PriorMode mode) {
    switch (mode) {
        case PriorMode::group_ard: return "group_ard";
        case PriorMode::shared_ard: return "shared_ard";
        case PriorMode::none: return "none";
    }
    return "unknown";
}

PriorMode prior_mode_from_string(const std::string& name) {
    if (name == "group_ard" || name == "gfa") return PriorMode::group_ard;
    if (name == "shared_ard" || name == "bfa") return PriorMode::shared_ard;
    if (name == "none" || name == "fa") return PriorMode::none;
    throw UsageError("unknown prior mode '" + name + "' (expected gfa, bfa or fa)");
}

void Hyperparameters::validate() const {
    if (!(a0 > 0 && b0 > 0 && a_tau0 > 0 && b_tau0 > 0))
        throw UsageError("Gamma hyperparameters must be strictly positive");
}

Matrix Posterior::zz() const {
    return z_mean.transpose() * z_mean + static_cast<double>(samples()) * z_cov;
}

Matrix Posterior::ww(Index m) const {
    const Matrix& w = w_mean[m];
    return w.transpose() * w + static_cast<double>(w.rows()) * w_cov[m];
}

Vector Posterior::column_second_moments(Index m) const {
    const Matrix& w = w_mean[m];
    return w.colwise().squaredNorm().transpose() +
           static_cast<double>(w.rows()) * w_cov[m].diagonal();
}

Matrix Posterior::loadings() const {
    Index rows = 0;
    for (const auto& w : w_mean) rows += w.rows();
    Matrix out(rows, factors());
    Index offset = 0;
    for (const auto& w : w_mean) {
        out.middleRows(offset, w.rows()) = w;
        offset += w.rows();
    }
    return out;
}

}  // namespace gfa
