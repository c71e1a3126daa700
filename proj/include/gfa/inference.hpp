#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gfa/posterior.hpp"
#include "gfa/rotation.hpp"

namespace gfa {

struct FitConfig {
    Index K = 10;
    int max_iter = 1000;
    double elbo_rel_tol = 1e-6;
    bool rotation_enabled = true;
    int rotation_period = 1;
    int rotation_start = 30;
    /// Iterations that keep alpha and tau at their starting values.
    int precision_warmup = 5;
    std::uint64_t seed = 0;
    /// Activity threshold used for the empty-factor diagnostic.
    double epsilon = 1e-3;
    Hyperparameters hyper;
    RotationConfig rotation;

    void validate() const;
};

struct FitResult {
    Posterior posterior;
    std::vector<double> elbo_trace;
    int n_iter = 0;
    bool converged = false;
    Index empty_factor_count = 0;
    int rotations_applied = 0;
    std::vector<std::string> warnings;
};

/// Individual terms of the bound; elbo() is their sum.
struct ElboTerms {
    double likelihood = 0.0;  ///< E[log p(Y | Z, W, tau)]
    double z_prior = 0.0;
    double z_entropy = 0.0;
    double w_prior = 0.0;  ///< E[log p(W | alpha)]
    double w_entropy = 0.0;
    double alpha = 0.0;  ///< E[log p(alpha)] + H[q(alpha)]
    double tau = 0.0;    ///< E[log p(tau)] + H[q(tau)]

    double total() const {
        return likelihood + z_prior + z_entropy + w_prior + w_entropy + alpha + tau;
    }
};

Posterior init_posterior(const DataCollection& data, const FitConfig& config);

void update_z(Posterior& posterior, const DataCollection& data);
void update_w(Posterior& posterior, const DataCollection& data, Index view, const Hyperparameters& hyper);
void update_alpha(Posterior& posterior, const Hyperparameters& hyper);
void update_tau(Posterior& posterior, const DataCollection& data, const Hyperparameters& hyper);

/// <||X_m - Z W_m^T||_F^2> under q.
double expected_residual(const Posterior& posterior, const DataCollection& data, Index view);

ElboTerms elbo_terms(const Posterior& posterior, const DataCollection& data, const Hyperparameters& hyper);
double elbo(const Posterior& posterior, const DataCollection& data, const Hyperparameters& hyper);

/// Called after every iteration with (iteration, bound).
using FitObserver = std::function<void(int, double)>;

FitResult fit(const DataCollection& data, const FitConfig& config, const FitObserver& observer = {});

}  // namespace gfa
