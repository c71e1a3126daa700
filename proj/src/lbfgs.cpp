#include "gfa/lbfgs.hpp"

#include <cmath>
#include <deque>

#include "gfa/error.hpp"

namespace gfa {

LbfgsResult minimize_lbfgs(const Objective& f, Vector x0, const LbfgsOptions& options) {
    LbfgsResult result;
    Vector grad(x0.size());
    auto value = f(x0, grad);
    if (!value) throw UsageError("L-BFGS starting point is outside the objective's domain");
    result.x = std::move(x0);
    result.value = *value;

    std::deque<Vector> s_hist;
    std::deque<Vector> y_hist;
    std::deque<double> rho_hist;
    Vector trial_grad(result.x.size());

    for (int iter = 0; iter < options.max_iter; ++iter) {
        if (grad.lpNorm<Eigen::Infinity>() <= options.grad_tol) {
            result.converged = true;
            break;
        }

        // Two-loop recursion for d = -H grad.
        Vector d = -grad;
        std::vector<double> alphas(s_hist.size());
        for (std::size_t i = s_hist.size(); i-- > 0;) {
            alphas[i] = rho_hist[i] * s_hist[i].dot(d);
            d -= alphas[i] * y_hist[i];
        }
        if (!s_hist.empty()) {
            d *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
        } else {
            d /= std::max(1.0, grad.norm());
        }
        for (std::size_t i = 0; i < s_hist.size(); ++i) {
            const double beta = rho_hist[i] * y_hist[i].dot(d);
            d += (alphas[i] - beta) * s_hist[i];
        }

        double slope = grad.dot(d);
        if (!(slope < 0.0)) {
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
            d = -grad / std::max(1.0, grad.norm());
            slope = grad.dot(d);
        }

        double step = 1.0;
        bool accepted = false;
        Vector trial;
        double trial_value = 0.0;
        for (int b = 0; b < options.max_backtracks; ++b, step *= options.shrink) {
            trial = result.x + step * d;
            const auto v = f(trial, trial_grad);
            if (v && std::isfinite(*v) && *v <= result.value + options.armijo * step * slope &&
                *v < result.value) {
                trial_value = *v;
                accepted = true;
                break;
            }
        }
        ++result.iterations;
        if (!accepted) break;

        Vector s = trial - result.x;
        Vector y = trial_grad - grad;
        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            s_hist.push_back(std::move(s));
            y_hist.push_back(std::move(y));
            rho_hist.push_back(1.0 / sy);
            if (static_cast<int>(s_hist.size()) > options.memory) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }
        const double improvement = result.value - trial_value;
        result.x = std::move(trial);
        result.value = trial_value;
        grad = trial_grad;
        if (improvement <= options.value_rel_tol * std::max(std::abs(trial_value), 1.0)) break;
    }
    if (!result.converged && grad.lpNorm<Eigen::Infinity>() <= options.grad_tol) result.converged = true;
    return result;
}

}  // namespace gfa
