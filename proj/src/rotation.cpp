#include "gfa/rotation.hpp"

#include <cmath>
#include <optional>

#include "gfa/error.hpp"
#include "gfa/inference.hpp"
#include "gfa/lbfgs.hpp"
#include "gfa/linalg.hpp"

namespace gfa {

namespace {

constexpr double kSingularDet = 1e-300;

struct Factorized {
    Matrix inverse;
    double log_abs_det;
    int det_sign;
};

std::optional<Factorized> factorize(const Matrix& R) {
    if (!R.allFinite()) return std::nullopt;
    Eigen::PartialPivLU<Matrix> lu(R);
    const Vector diag = lu.matrixLU().diagonal();
    double log_abs_det = 0.0;
    int det_sign = static_cast<int>(lu.permutationP().determinant());
    for (Index i = 0; i < diag.size(); ++i) {
        if (diag(i) == 0.0) return std::nullopt;
        if (diag(i) < 0.0) det_sign = -det_sign;
        log_abs_det += std::log(std::abs(diag(i)));
    }
    if (!(log_abs_det > std::log(kSingularDet))) return std::nullopt;
    Matrix inverse = lu.inverse();
    if (!inverse.allFinite()) return std::nullopt;
    return Factorized{std::move(inverse), log_abs_det, det_sign};
}

/// Objective and (optionally) gradient from one LU factorization.
/// With `positive_det`, matrices with det R < 0 count as outside the domain
/// so the optimizer cannot jump across the singular set.
std::optional<double> evaluate(const Matrix& R, const RotationProblem& p, double floor, Matrix* grad,
                               bool positive_det = false) {
    const auto fact = factorize(R);
    if (!fact || (positive_det && fact->det_sign < 0)) return std::nullopt;
    const Matrix& inv = fact->inverse;
    const Matrix transformed = inv * p.zz * inv.transpose();
    double value = -0.5 * transformed.trace() + p.C() * fact->log_abs_det;
    if (grad) *grad = inv.transpose() * transformed + p.C() * inv.transpose();

    for (std::size_t m = 0; m < p.ww.size(); ++m) {
        const Matrix wr = p.ww[m] * R;
        const Vector quad = (R.array() * wr.array()).colwise().sum().transpose().array() + floor;
        if ((quad.array() <= 0.0).any()) return std::nullopt;
        value -= 0.5 * p.dims[m] * quad.array().log().sum();
        if (grad) *grad -= p.dims[m] * (wr.array().rowwise() / quad.transpose().array()).matrix();
    }
    if (!std::isfinite(value)) return std::nullopt;
    return value;
}

}  // namespace

double RotationProblem::C() const {
    double total = 0.0;
    for (double d : dims) total += d;
    return total - static_cast<double>(n_samples);
}

RotationProblem RotationProblem::from_posterior(const Posterior& posterior, PriorMode mode) {
    RotationProblem p;
    p.zz = posterior.zz();
    p.n_samples = posterior.samples();
    if (mode == PriorMode::shared_ard) {
        Matrix total = Matrix::Zero(posterior.factors(), posterior.factors());
        double width = 0.0;
        for (Index m = 0; m < posterior.view_count(); ++m) {
            total += posterior.ww(m);
            width += static_cast<double>(posterior.w_mean[m].rows());
        }
        p.ww.push_back(std::move(total));
        p.dims.push_back(width);
    } else {
        for (Index m = 0; m < posterior.view_count(); ++m) {
            p.ww.push_back(posterior.ww(m));
            p.dims.push_back(static_cast<double>(posterior.w_mean[m].rows()));
        }
    }
    return p;
}

void RotationConfig::validate() const {
    if (max_iter < 1 || !(grad_tol > 0) || memory < 1 || !(quad_floor > 0) || value_rel_tol < 0)
        throw UsageError("rotation settings must all be positive");
}

double rotation_objective(const Matrix& R, const RotationProblem& problem, double quad_floor) {
    if (R.rows() != problem.factors() || R.cols() != problem.factors())
        throw UsageError("rotation matrix has the wrong shape");
    const auto value = evaluate(R, problem, quad_floor, nullptr);
    if (!value) throw NumericalError("rotation matrix is singular");
    return *value;
}

Matrix rotation_gradient(const Matrix& R, const RotationProblem& problem, double quad_floor) {
    if (R.rows() != problem.factors() || R.cols() != problem.factors())
        throw UsageError("rotation matrix has the wrong shape");
    Matrix grad;
    if (!evaluate(R, problem, quad_floor, &grad)) throw NumericalError("rotation matrix is singular");
    return grad;
}

RotationResult optimize_rotation(const RotationProblem& problem, const RotationConfig& config) {
    config.validate();
    const Index k = problem.factors();
    RotationResult result;
    result.R = Matrix::Identity(k, k);
    result.initial_objective = rotation_objective(result.R, problem, config.quad_floor);
    result.objective = result.initial_objective;

    // Minimize -L over the flattened (column-major) entries of R.
    const Objective negated = [&](const Vector& x, Vector& grad) -> std::optional<double> {
        const Eigen::Map<const Matrix> R(x.data(), k, k);
        Matrix g;
        const auto value = evaluate(R, problem, config.quad_floor, &g, true);
        if (!value) return std::nullopt;
        grad = -Eigen::Map<const Vector>(g.data(), k * k);
        return -*value;
    };

    LbfgsOptions options;
    options.max_iter = config.max_iter;
    options.grad_tol = config.grad_tol;
    options.memory = config.memory;
    options.value_rel_tol = config.value_rel_tol;
    const Vector start = Eigen::Map<const Vector>(result.R.data(), k * k);
    const auto solution = minimize_lbfgs(negated, start, options);

    result.iterations = solution.iterations;
    result.converged = solution.converged;
    if (-solution.value > result.initial_objective) {
        result.R = Eigen::Map<const Matrix>(solution.x.data(), k, k);
        result.objective = -solution.value;
    }
    return result;
}

void apply_rotation(Posterior& q, const Matrix& R, const Hyperparameters& hyper) {
    const Index k = q.factors();
    if (R.rows() != k || R.cols() != k) throw UsageError("rotation matrix has the wrong shape");
    const auto fact = factorize(R);
    if (!fact) throw NumericalError("rotation matrix is singular");
    const Matrix& inv = fact->inverse;

    q.z_mean = q.z_mean * R.transpose();
    q.z_cov = linalg::symmetrized(R * q.z_cov * R.transpose());
    for (Index m = 0; m < q.view_count(); ++m) {
        q.w_mean[m] = q.w_mean[m] * inv;
        q.w_cov[m] = linalg::symmetrized(inv.transpose() * q.w_cov[m] * inv);
    }
    update_alpha(q, hyper);
}

}  // namespace gfa
