#include "gfa/inference.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/digamma.hpp>

#include "gfa/activity.hpp"
#include "gfa/error.hpp"
#include "gfa/linalg.hpp"
#include "gfa/rng.hpp"

namespace gfa {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

double expected_log_gamma(double shape, double rate) {
    return boost::math::digamma(shape) - std::log(rate);
}

/// E_q[log Gamma(x | a0, b0)] + H[Gamma(shape, rate)].
double gamma_prior_plus_entropy(double a0, double b0, double shape, double rate) {
    const double mean = shape / rate;
    const double e_log = expected_log_gamma(shape, rate);
    const double prior = a0 * std::log(b0) - std::lgamma(a0) + (a0 - 1.0) * e_log - b0 * mean;
    const double entropy =
        shape - std::log(rate) + std::lgamma(shape) + (1.0 - shape) * boost::math::digamma(shape);
    return prior + entropy;
}

/// Precisions used by the W update for one view.
Vector loading_precisions(const Posterior& posterior, Index view, const Hyperparameters& hyper) {
    if (hyper.prior_mode == PriorMode::none)
        return Vector::Constant(posterior.factors(), kRidgePrecision);
    return posterior.alpha_shape.col(view).cwiseQuotient(posterior.alpha_rate.col(view));
}

}  // namespace

void FitConfig::validate() const {
    if (K < 1) throw UsageError("K must be at least 1");
    if (max_iter < 1) throw UsageError("max_iter must be at least 1");
    if (!(elbo_rel_tol > 0)) throw UsageError("elbo_rel_tol must be positive");
    if (rotation_period < 1) throw UsageError("rotation_period must be at least 1");
    if (rotation_start < 1) throw UsageError("rotation_start must be at least 1");
    if (precision_warmup < 0) throw UsageError("precision_warmup must be non-negative");
    if (!(epsilon > 0)) throw UsageError("epsilon must be positive");
    hyper.validate();
    rotation.validate();
}

Posterior init_posterior(const DataCollection& data, const FitConfig& config) {
    config.validate();
    if (!data.data().allFinite()) throw NumericalError("data contains non-finite values");
    const Index n = data.n_samples();
    const Index k = config.K;
    const Index views = data.view_count();
    const auto& hyper = config.hyper;

    Posterior q;
    Rng rng = Rng(config.seed).split("init_z");
    q.z_mean = rng.normal_matrix(n, k);
    q.z_cov = Matrix::Identity(k, k);
    q.alpha_shape.resize(k, views);
    q.tau_shape.resize(views);
    for (Index m = 0; m < views; ++m) {
        const Index dm = data.partition().dim(m);
        q.w_mean.push_back(Matrix::Zero(dm, k));
        q.w_cov.push_back(Matrix::Identity(k, k));
        const double width = hyper.prior_mode == PriorMode::shared_ard
                                 ? static_cast<double>(data.partition().total_dim())
                                 : static_cast<double>(dm);
        q.alpha_shape.col(m).setConstant(hyper.a0 + 0.5 * width);
        q.tau_shape(m) = hyper.a_tau0 + 0.5 * static_cast<double>(n * dm);
    }
    // Neutral starting precisions: 1 / (mean square of the view), which is 1
    // for standardized data and keeps the whole fit equivariant to rescaling
    // a view.
    auto mean_square = [&](Index first, Index width) {
        const double v = data.data().middleCols(first, width).squaredNorm() /
                         static_cast<double>(n * width);
        return std::isfinite(v) && v > 0.0 ? v : 1.0;
    };
    const double overall = mean_square(0, data.partition().total_dim());
    q.alpha_rate = q.alpha_shape;
    q.tau_rate = q.tau_shape;
    for (Index m = 0; m < views; ++m) {
        const double v = mean_square(data.partition().offset(m), data.partition().dim(m));
        q.tau_rate(m) *= v;
        q.alpha_rate.col(m) *= hyper.prior_mode == PriorMode::shared_ard ? overall : v;
    }
    return q;
}

void update_z(Posterior& q, const DataCollection& data) {
    const Index k = q.factors();
    const Vector tau = q.expected_tau();
    Matrix precision = Matrix::Identity(k, k);
    Matrix projected = Matrix::Zero(data.n_samples(), k);
    for (Index m = 0; m < q.view_count(); ++m) {
        precision += tau(m) * q.ww(m);
        projected.noalias() += tau(m) * (data.view(m) * q.w_mean[m]);
    }
    q.z_cov = linalg::spd_inverse(precision, "update_z");
    q.z_mean.noalias() = projected * q.z_cov;
}

void update_w(Posterior& q, const DataCollection& data, Index view, const Hyperparameters& hyper) {
    if (view < 0 || view >= q.view_count()) throw UsageError("view index out of range");
    const double tau = q.tau_shape(view) / q.tau_rate(view);
    Matrix precision = tau * q.zz();
    precision.diagonal() += loading_precisions(q, view, hyper);
    q.w_cov[view] = linalg::spd_inverse(precision, "update_w");
    q.w_mean[view].noalias() = tau * (data.view(view).transpose() * q.z_mean) * q.w_cov[view];
}

void update_alpha(Posterior& q, const Hyperparameters& hyper) {
    const Index views = q.view_count();
    switch (hyper.prior_mode) {
        case PriorMode::group_ard:
            for (Index m = 0; m < views; ++m) {
                const double dm = static_cast<double>(q.w_mean[m].rows());
                q.alpha_shape.col(m).setConstant(hyper.a0 + 0.5 * dm);
                q.alpha_rate.col(m) =
                    (hyper.b0 + 0.5 * q.column_second_moments(m).array()).matrix();
            }
            break;
        case PriorMode::shared_ard: {
            Vector moments = Vector::Zero(q.factors());
            double width = 0.0;
            for (Index m = 0; m < views; ++m) {
                moments += q.column_second_moments(m);
                width += static_cast<double>(q.w_mean[m].rows());
            }
            q.alpha_shape.setConstant(hyper.a0 + 0.5 * width);
            for (Index m = 0; m < views; ++m)
                q.alpha_rate.col(m) = (hyper.b0 + 0.5 * moments.array()).matrix();
            break;
        }
        case PriorMode::none:
            break;
    }
}

double expected_residual(const Posterior& q, const DataCollection& data, Index view) {
    const auto x = data.view(view);
    const double data_norm = x.squaredNorm();
    const double cross = (q.w_mean[view].transpose() * x.transpose() * q.z_mean).trace();
    const double second = (q.zz() * q.ww(view)).trace();
    const double residual = data_norm - 2.0 * cross + second;
    if (!std::isfinite(residual) || residual < -1e-10 * (data_norm + second + 1.0))
        throw NumericalError("negative expected residual in view " + std::to_string(view));
    return std::max(residual, 0.0);
}

void update_tau(Posterior& q, const DataCollection& data, const Hyperparameters& hyper) {
    const double n = static_cast<double>(data.n_samples());
    for (Index m = 0; m < q.view_count(); ++m) {
        const double dm = static_cast<double>(q.w_mean[m].rows());
        q.tau_shape(m) = hyper.a_tau0 + 0.5 * n * dm;
        q.tau_rate(m) = hyper.b_tau0 + 0.5 * expected_residual(q, data, m);
    }
}

ElboTerms elbo_terms(const Posterior& q, const DataCollection& data, const Hyperparameters& hyper) {
    ElboTerms t;
    const double n = static_cast<double>(data.n_samples());
    const double k = static_cast<double>(q.factors());
    const Index views = q.view_count();

    for (Index m = 0; m < views; ++m) {
        const double dm = static_cast<double>(q.w_mean[m].rows());
        const double e_tau = q.tau_shape(m) / q.tau_rate(m);
        t.likelihood += 0.5 * n * dm * (expected_log_gamma(q.tau_shape(m), q.tau_rate(m)) - kLog2Pi) -
                        0.5 * e_tau * expected_residual(q, data, m);
        t.tau += gamma_prior_plus_entropy(hyper.a_tau0, hyper.b_tau0, q.tau_shape(m), q.tau_rate(m));
    }

    t.z_prior = -0.5 * n * k * kLog2Pi - 0.5 * q.zz().trace();
    t.z_entropy = n * (0.5 * k * (1.0 + kLog2Pi) + 0.5 * linalg::spd_logdet(q.z_cov, "elbo: Z covariance"));

    for (Index m = 0; m < views; ++m) {
        const double dm = static_cast<double>(q.w_mean[m].rows());
        t.w_entropy +=
            dm * (0.5 * k * (1.0 + kLog2Pi) + 0.5 * linalg::spd_logdet(q.w_cov[m], "elbo: W covariance"));
    }

    switch (hyper.prior_mode) {
        case PriorMode::group_ard:
            for (Index m = 0; m < views; ++m) {
                const double dm = static_cast<double>(q.w_mean[m].rows());
                const Vector moments = q.column_second_moments(m);
                for (Index f = 0; f < q.factors(); ++f) {
                    const double shape = q.alpha_shape(f, m);
                    const double rate = q.alpha_rate(f, m);
                    t.w_prior += 0.5 * dm * (expected_log_gamma(shape, rate) - kLog2Pi) -
                                 0.5 * (shape / rate) * moments(f);
                    t.alpha += gamma_prior_plus_entropy(hyper.a0, hyper.b0, shape, rate);
                }
            }
            break;
        case PriorMode::shared_ard: {
            Vector moments = Vector::Zero(q.factors());
            double width = 0.0;
            for (Index m = 0; m < views; ++m) {
                moments += q.column_second_moments(m);
                width += static_cast<double>(q.w_mean[m].rows());
            }
            for (Index f = 0; f < q.factors(); ++f) {
                const double shape = q.alpha_shape(f, 0);
                const double rate = q.alpha_rate(f, 0);
                t.w_prior += 0.5 * width * (expected_log_gamma(shape, rate) - kLog2Pi) -
                             0.5 * (shape / rate) * moments(f);
                t.alpha += gamma_prior_plus_entropy(hyper.a0, hyper.b0, shape, rate);
            }
            break;
        }
        case PriorMode::none:
            for (Index m = 0; m < views; ++m) {
                const double dm = static_cast<double>(q.w_mean[m].rows());
                t.w_prior += 0.5 * dm * k * (std::log(kRidgePrecision) - kLog2Pi) -
                             0.5 * kRidgePrecision * q.column_second_moments(m).sum();
            }
            break;
    }
    return t;
}

double elbo(const Posterior& q, const DataCollection& data, const Hyperparameters& hyper) {
    const double value = elbo_terms(q, data, hyper).total();
    if (!std::isfinite(value)) throw NumericalError("variational bound is not finite");
    return value;
}

FitResult fit(const DataCollection& data, const FitConfig& config, const FitObserver& observer) {
    config.validate();
    FitResult result;
    const auto& hyper = config.hyper;

    const double max_mean = data.data().colwise().mean().cwiseAbs().maxCoeff();
    if (max_mean > 1e-6)
        result.warnings.push_back("data does not look centered (max |column mean| = " +
                                  format_double(max_mean) + ")");
    if (config.K > data.n_samples() || config.K > data.partition().total_dim())
        result.warnings.push_back("K exceeds the sample count or the total dimension");

    Posterior q = init_posterior(data, config);
    const bool rotate = config.rotation_enabled && hyper.prior_mode != PriorMode::none;

    for (int iter = 1; iter <= config.max_iter; ++iter) {
        // The first sweep starts from the random Z draw; updating Z against the
        // zero-mean initial loadings would erase it.
        if (iter > 1) update_z(q, data);
        for (Index m = 0; m < q.view_count(); ++m) update_w(q, data, m, hyper);
        // Letting ARD act on loadings fitted to a random Z prunes weak factors
        // before they can form.
        const bool warming = iter <= config.precision_warmup;
        if (!warming) {
            update_alpha(q, hyper);
            update_tau(q, data, hyper);
        }

        double bound = elbo(q, data, hyper);
        if (rotate && iter >= config.rotation_start &&
            (iter - config.rotation_start) % config.rotation_period == 0) {
            const auto problem = RotationProblem::from_posterior(q, hyper.prior_mode);
            const auto rotation = optimize_rotation(problem, config.rotation);
            if (rotation.objective > rotation.initial_objective) {
                // The bound's optimum R maps Z -> Z R^-T and W -> W R.
                Eigen::PartialPivLU<Matrix> lu(rotation.R);
                Posterior candidate = q;
                apply_rotation(candidate, lu.inverse(), hyper);
                const double rotated = elbo(candidate, data, hyper);
                if (rotated >= bound) {
                    q = std::move(candidate);
                    bound = rotated;
                    ++result.rotations_applied;
                }
            }
        }

        result.elbo_trace.push_back(bound);
        result.n_iter = iter;
        if (observer) observer(iter, bound);
        if (!warming && iter > config.precision_warmup + 1) {
            const double previous = result.elbo_trace[result.elbo_trace.size() - 2];
            if (std::abs(bound - previous) < config.elbo_rel_tol * std::abs(previous)) {
                result.converged = true;
                break;
            }
        }
    }

    const auto activity = activity_matrix(q, view_variance_stats(data, q), config.epsilon);
    result.empty_factor_count = activity.empty_count();
    result.posterior = std::move(q);
    return result;
}

}  // namespace gfa
