#include <doctest.h>

#include <cmath>

#include "gfa/error.hpp"
#include "gfa/inference.hpp"
#include "gfa/lbfgs.hpp"
#include "gfa/rotation.hpp"
#include "gfa/synthetic.hpp"
#include "oracles.hpp"

using namespace gfa;

namespace {

double max_rel_error(const Matrix& a, const Matrix& b) {
    return ((a - b).array().abs() / b.array().abs().max(1.0)).maxCoeff();
}

RotationProblem identity_problem(Index k, Index n, std::vector<double> dims) {
    RotationProblem p;
    p.zz = Matrix::Identity(k, k);
    p.n_samples = n;
    p.dims = std::move(dims);
    for (std::size_t m = 0; m < p.dims.size(); ++m) p.ww.push_back(Matrix::Identity(k, k));
    return p;
}

}  // namespace

TEST_CASE("C for the preset sizes") {
    auto p = identity_problem(2, 100, {5, 10, 7, 8, 6, 9, 5, 7, 10, 5});
    CHECK(p.C() == -28.0);
}

TEST_CASE("objective at the identity") {
    Rng rng(1);
    auto p = oracle::random_rotation_problem(rng, 3);
    double expect = -0.5 * p.zz.trace();
    for (std::size_t m = 0; m < p.ww.size(); ++m)
        for (Index k = 0; k < 3; ++k) expect -= p.dims[m] / 2 * std::log(p.ww[m](k, k) + 1e-12);
    CHECK(rotation_objective(Matrix::Identity(3, 3), p) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("scalar objective and derivative") {
    Rng rng(2);
    auto p = oracle::random_rotation_problem(rng, 1);
    const double zz = p.zz(0, 0), c = p.C();
    for (double r : {0.3, -0.7, 1.0, 2.5}) {
        double l = -zz / (2 * r * r) + c * std::log(std::abs(r));
        double g = zz / (r * r * r) + c / r;
        for (std::size_t m = 0; m < p.ww.size(); ++m) {
            const double w = p.ww[m](0, 0);
            l -= p.dims[m] / 2 * std::log(w * r * r + 1e-12);
            g -= p.dims[m] * w * r / (w * r * r + 1e-12);
        }
        Matrix R = Matrix::Constant(1, 1, r);
        CHECK(rotation_objective(R, p) == doctest::Approx(l).epsilon(1e-13));
        CHECK(rotation_gradient(R, p)(0, 0) == doctest::Approx(g).epsilon(1e-12));
    }
}

TEST_CASE("gradient matches finite differences") {
    Rng rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        const Index k = 1 + trial % 5;
        auto p = oracle::random_rotation_problem(rng, k);
        Matrix R = oracle::random_near_identity(rng, k);
        auto f = [&](const Matrix& x) { return rotation_objective(x, p); };
        const Matrix fd = oracle::finite_difference(f, R, 1e-5);
        INFO("trial " << trial);
        CHECK(max_rel_error(rotation_gradient(R, p), fd) < 1e-5);
    }
}

TEST_CASE("singular rotation is rejected") {
    Rng rng(4);
    auto p = oracle::random_rotation_problem(rng, 2);
    Matrix R = Matrix::Ones(2, 2);
    CHECK_THROWS_AS(rotation_objective(R, p), NumericalError);
    CHECK_THROWS_AS(rotation_gradient(R, p), NumericalError);
    CHECK_THROWS_AS(rotation_objective(Matrix::Identity(3, 3), p), UsageError);
}

TEST_CASE("K=1 optimum agrees with a grid search") {
    Rng rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        auto p = oracle::random_rotation_problem(rng, 1);
        double best = -INFINITY, arg = 0;
        for (double r = 1e-3; r < 20; r += 1e-4) {
            const double v = rotation_objective(Matrix::Constant(1, 1, r), p);
            if (v > best) best = v, arg = r;
        }
        auto res = optimize_rotation(p);
        CHECK(res.objective >= best - 1e-8 * std::abs(best));
        CHECK(std::abs(res.R(0, 0)) == doctest::Approx(arg).epsilon(1e-3));
        CHECK(std::abs(rotation_gradient(res.R, p)(0, 0)) <= 1e-6);
    }
}

TEST_CASE("identity moments give a scaled identity") {
    // among diagonal R the bound is maximized at c I with 1/c^2 = D - C = N
    auto p = identity_problem(3, 25, {4, 6});
    auto res = optimize_rotation(p);
    CHECK(res.objective >= rotation_objective(Matrix::Identity(3, 3), p));
    const double c = 1.0 / 5.0;
    CHECK((res.R - c * Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("optimizer against Nelder-Mead") {
    Rng rng(6);
    int agree = 0;
    for (int trial = 0; trial < 10; ++trial) {
        auto p = oracle::random_rotation_problem(rng, 4);
        auto res = optimize_rotation(p);
        CHECK(res.objective >= rotation_objective(Matrix::Identity(4, 4), p));
        auto f = [&](const Vector& v) -> double {
            try {
                return rotation_objective(Matrix(v.reshaped(4, 4)), p);
            } catch (const NumericalError&) {
                return -INFINITY;
            }
        };
        double ref = -INFINITY;
        Vector start = Matrix::Identity(4, 4).reshaped();
        for (int restart = 0; restart < 6; ++restart) {
            ref = std::max(ref, oracle::nelder_mead_max(f, start, 0.2, 40000));
            start = Matrix(oracle::random_near_identity(rng, 4)).reshaped();
        }
        if (std::abs(res.objective - ref) <= 1e-4 * std::abs(ref)) ++agree;
    }
    CHECK(agree >= 8);
}

TEST_CASE("preset moments early in a fit improve") {
    auto truth = generate_truth(0, {}, 0, FactorDistribution::sec4_preset, 2);
    auto data = center(sample_collection(truth, 100, 2), false).first;
    FitConfig cfg;
    cfg.K = 40;
    cfg.max_iter = 5;
    cfg.rotation_enabled = false;
    auto q = fit(data, cfg).posterior;
    auto p = RotationProblem::from_posterior(q, PriorMode::group_ard);
    auto res = optimize_rotation(p);
    CHECK(res.objective > res.initial_objective);
    CHECK(res.initial_objective == rotation_objective(Matrix::Identity(40, 40), p));
}

TEST_CASE("rotation reaches an equal or higher bound on the preset") {
    int better = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto truth = generate_truth(0, {}, 0, FactorDistribution::sec4_preset, seed);
        auto data = center(sample_collection(truth, 100, seed), false).first;
        FitConfig cfg;
        cfg.K = 40;
        cfg.seed = seed;
        // the two runs stop at different points of a slow drift; at this
        // tolerance that drift is below 3e-6 of the bound
        cfg.elbo_rel_tol = 1e-7;
        const double with = fit(data, cfg).elbo_trace.back();
        cfg.rotation_enabled = false;
        const double without = fit(data, cfg).elbo_trace.back();
        if (with >= without - 1e-5 * std::abs(without)) ++better;
    }
    CHECK(better >= 8);
}

TEST_CASE("shared prior merges all views") {
    Rng rng(7);
    ViewPartition part({3, 4});
    DataCollection data(part, rng.normal_matrix(10, 7));
    auto q = oracle::random_posterior(data, 2, rng);
    auto p = RotationProblem::from_posterior(q, PriorMode::shared_ard);
    REQUIRE(p.ww.size() == 1);
    CHECK(p.dims[0] == 7.0);
    CHECK((p.ww[0] - q.ww(0) - q.ww(1)).norm() < 1e-12);
    auto g = RotationProblem::from_posterior(q, PriorMode::group_ard);
    CHECK(g.ww.size() == 2);
    CHECK(g.C() == -3.0);
}

TEST_CASE("apply_rotation invariances") {
    Rng rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        const Index k = 1 + trial % 4;
        ViewPartition part({3, 2});
        Matrix x = rng.normal_matrix(9, 5);
        DataCollection data(part, x);
        auto q = oracle::random_posterior(data, k, rng);
        const Hyperparameters h;
        update_alpha(q, h);

        auto same = q;
        apply_rotation(same, Matrix::Identity(k, k), h);
        CHECK((same.z_mean - q.z_mean).norm() == 0.0);
        CHECK((same.w_cov[1] - q.w_cov[1]).norm() < 1e-14);

        auto r = q;
        apply_rotation(r, oracle::random_near_identity(rng, k), h);
        for (Index m = 0; m < 2; ++m) {
            const Matrix before = q.z_mean * q.w_mean[m].transpose();
            const Matrix after = r.z_mean * r.w_mean[m].transpose();
            CHECK((after - before).norm() <= 1e-10 * before.norm());
            const double t0 = (q.zz() * q.ww(m)).trace(), t1 = (r.zz() * r.ww(m)).trace();
            CHECK(std::abs(t1 - t0) <= 1e-8 * std::abs(t0));
            CHECK(r.w_cov[m].llt().info() == Eigen::Success);
        }
        CHECK(r.z_cov.llt().info() == Eigen::Success);
        const double l0 = elbo_terms(q, data, h).likelihood, l1 = elbo_terms(r, data, h).likelihood;
        CHECK(std::abs(l1 - l0) <= 1e-8 * std::abs(l0));
    }
}

TEST_CASE("objective gain equals bound gain") {
    auto truth = generate_truth(4, {5}, 4, FactorDistribution::uniform_subsets, 3);
    auto data = center(sample_collection(truth, 50, 3), false).first;
    FitConfig cfg;
    cfg.K = 6;
    cfg.max_iter = 8;
    cfg.rotation_enabled = false;
    auto q = fit(data, cfg).posterior;
    update_alpha(q, cfg.hyper);
    auto p = RotationProblem::from_posterior(q, PriorMode::group_ard);
    auto res = optimize_rotation(p);
    const double before = elbo(q, data, cfg.hyper);
    apply_rotation(q, res.R.inverse(), cfg.hyper);
    const double gain = elbo(q, data, cfg.hyper) - before;
    CHECK(res.objective - res.initial_objective > 0);
    CHECK(gain == doctest::Approx(res.objective - res.initial_objective).epsilon(1e-6));
}

TEST_CASE("lbfgs on Rosenbrock") {
    Objective f = [](const Vector& x, Vector& g) -> std::optional<double> {
        g.resize(2);
        g(0) = -2 * (1 - x(0)) - 400 * x(0) * (x(1) - x(0) * x(0));
        g(1) = 200 * (x(1) - x(0) * x(0));
        return (1 - x(0)) * (1 - x(0)) + 100 * std::pow(x(1) - x(0) * x(0), 2);
    };
    LbfgsOptions opts;
    opts.max_iter = 500;
    opts.grad_tol = 1e-8;
    auto res = minimize_lbfgs(f, Vector::Constant(2, -1.2), opts);
    CHECK(res.converged);
    CHECK(res.x(0) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(res.x(1) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("lbfgs stays inside the domain") {
    // f = x - log x, minimum at 1; undefined for x <= 0
    Objective f = [](const Vector& x, Vector& g) -> std::optional<double> {
        if (x(0) <= 0) return std::nullopt;
        g = Vector::Constant(1, 1 - 1 / x(0));
        return x(0) - std::log(x(0));
    };
    auto res = minimize_lbfgs(f, Vector::Constant(1, 40.0));
    CHECK(res.x(0) == doctest::Approx(1.0).epsilon(1e-5));
}
