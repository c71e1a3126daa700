#pragma once

#include <string>
#include <vector>

#include "gfa/data_model.hpp"

namespace gfa {

enum class PriorMode {
    group_ard,   ///< one ARD precision per (view, factor) pair
    shared_ard,  ///< one ARD precision per factor, shared by all views
    none,        ///< fixed ridge precision, no ARD
};

std::string to_string(PriorMode mode);
PriorMode prior_mode_from_string(const std::string& name);

struct Hyperparameters {
    double a0 = 1e-14;
    double b0 = 1e-14;
    double a_tau0 = 1e-14;
    double b_tau0 = 1e-14;
    PriorMode prior_mode = PriorMode::group_ard;

    void validate() const;
};

/// Loading precision used when prior_mode is none.
inline constexpr double kRidgePrecision = 1e-10;

/// Mean-field posterior q(Z) q(W) q(alpha) q(tau). Rows of Z share one
/// covariance, and so do the rows of W within a view.
struct Posterior {
    Matrix z_mean;               // N x K
    Matrix z_cov;                // K x K
    std::vector<Matrix> w_mean;  // per view, D_m x K
    std::vector<Matrix> w_cov;   // per view, K x K
    Matrix alpha_shape;          // K x M
    Matrix alpha_rate;           // K x M
    Vector tau_shape;            // M
    Vector tau_rate;             // M

    Index factors() const { return z_mean.cols(); }
    Index samples() const { return z_mean.rows(); }
    Index view_count() const { return static_cast<Index>(w_mean.size()); }

    /// <Z^T Z> = Z_mean^T Z_mean + N Z_cov
    Matrix zz() const;
    /// <W_m^T W_m> = W_mean_m^T W_mean_m + D_m W_cov_m
    Matrix ww(Index m) const;
    /// <||w_{m,k}||^2> for every factor k of view m.
    Vector column_second_moments(Index m) const;

    Matrix expected_alpha() const { return alpha_shape.cwiseQuotient(alpha_rate); }
    Vector expected_tau() const { return tau_shape.cwiseQuotient(tau_rate); }

    /// Loading means of all views stacked into one D x K matrix.
    Matrix loadings() const;
};

}  // namespace gfa
