#pragma once

#include <vector>

#include "gfa/posterior.hpp"

namespace gfa {

/// Second moments entering the rotation bound
///   L(R) = -1/2 Tr(R^-1 <Z^T Z> R^-T) + C log|det R|
///          - sum_m D_m/2 sum_k log(r_k^T <W_m^T W_m> r_k + floor),
/// with C = sum_m D_m - N.
struct RotationProblem {
    Matrix zz;
    std::vector<Matrix> ww;
    std::vector<double> dims;
    Index n_samples = 0;

    double C() const;
    Index factors() const { return zz.rows(); }

    /// Moments of the current posterior. For shared_ard all views collapse
    /// into one group of width D, matching that prior's bound.
    static RotationProblem from_posterior(const Posterior& posterior, PriorMode mode);
};

struct RotationConfig {
    int max_iter = 200;
    double grad_tol = 1e-6;
    int memory = 10;
    double quad_floor = 1e-12;
    /// Relative objective improvement below which L-BFGS stops early.
    double value_rel_tol = 1e-9;

    void validate() const;
};

double rotation_objective(const Matrix& R, const RotationProblem& problem, double quad_floor = 1e-12);
Matrix rotation_gradient(const Matrix& R, const RotationProblem& problem, double quad_floor = 1e-12);

struct RotationResult {
    Matrix R;
    double objective = 0.0;
    double initial_objective = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// L-BFGS ascent on L starting from R = I. Never returns an iterate worse
/// than the identity.
RotationResult optimize_rotation(const RotationProblem& problem, const RotationConfig& config = {});

/// Z <- Z R^T and W_m <- W_m R^-1 (covariances transformed accordingly),
/// followed by a fresh alpha update. Z W^T is unchanged.
void apply_rotation(Posterior& posterior, const Matrix& R, const Hyperparameters& hyper);

}  // namespace gfa
