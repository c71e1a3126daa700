#pragma once

#include <functional>
#include <optional>

#include "gfa/data_model.hpp"

namespace gfa {

struct LbfgsOptions {
    int max_iter = 200;
    double grad_tol = 1e-6;  ///< on the max-abs gradient entry
    /// Also stop once an accepted step improves f by less than this
    /// fraction of max(|f|, 1). Zero disables the test.
    double value_rel_tol = 0.0;
    int memory = 10;
    double armijo = 1e-4;
    double shrink = 0.5;
    int max_backtracks = 60;
};

struct LbfgsResult {
    Vector x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Returns f(x) and writes its gradient, or nullopt outside the domain.
using Objective = std::function<std::optional<double>(const Vector& x, Vector& grad)>;

/// Two-loop-recursion L-BFGS minimizer with Armijo backtracking. Every
/// accepted step strictly decreases f, so the returned point is the best
/// iterate visited. `x0` must lie in the domain.
LbfgsResult minimize_lbfgs(const Objective& f, Vector x0, const LbfgsOptions& options = {});

}  // namespace gfa
