#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>

#include "gfa/error.hpp"
#include "gfa/evaluation.hpp"
#include "gfa/synthetic.hpp"

using namespace gfa;

TEST_CASE("distribution names") {
    CHECK(distribution_from_string("power-law") == FactorDistribution::power_law);
    CHECK(distribution_from_string("uniform_subsets") == FactorDistribution::uniform_subsets);
    CHECK(to_string(FactorDistribution::sec4_preset) == "sec4-preset");
    CHECK_THROWS_AS(distribution_from_string("zipf"), UsageError);
}

TEST_CASE("uniform cardinality covers every size once") {
    auto t = generate_truth(40, {10}, 40, FactorDistribution::uniform_cardinality, 1);
    std::vector<Index> expect;
    for (Index c = 40; c >= 1; --c) expect.push_back(c);
    CHECK(cardinality_curve(t.F) == expect);
    CHECK(t.partition.total_dim() == 400);
    CHECK_THROWS_AS(generate_truth(40, {10}, 39, FactorDistribution::uniform_cardinality, 1), UsageError);
}

TEST_CASE("preset design") {
    const auto& p = sec4_preset();
    CHECK(p.dims == std::vector<Index>{5, 10, 7, 8, 6, 9, 5, 7, 10, 5});
    CHECK(p.patterns.size() == 24);
    auto t = generate_truth(0, {}, 0, FactorDistribution::sec4_preset, 2);
    CHECK(t.partition.view_count() == 10);
    CHECK(t.partition.total_dim() == 72);
    CHECK(t.factors() == 24);
    auto curve = cardinality_curve(t.F);
    CHECK(curve.front() == 10);
    CHECK(std::count(curve.begin(), curve.end(), 1) >= 10);
    auto same = generate_truth(10, {5, 10, 7, 8, 6, 9, 5, 7, 10, 5}, 24, FactorDistribution::sec4_preset, 2);
    CHECK(same.W == t.W);
    CHECK_THROWS_AS(generate_truth(9, {}, 0, FactorDistribution::sec4_preset, 2), UsageError);
    CHECK_THROWS_AS(generate_truth(0, {}, 25, FactorDistribution::sec4_preset, 2), UsageError);
}

TEST_CASE("truth is deterministic and respects F") {
    for (auto dist : {FactorDistribution::power_law, FactorDistribution::uniform_subsets,
                      FactorDistribution::uniform_cardinality}) {
        auto a = generate_truth(6, {3, 4, 2, 5, 1, 3}, 6, dist, 7);
        auto b = generate_truth(6, {3, 4, 2, 5, 1, 3}, 6, dist, 7);
        CHECK(a.F == b.F);
        CHECK(a.W == b.W);
        for (Index k = 0; k < a.factors(); ++k) {
            CHECK(a.F.row(k).sum() >= 1);
            for (Index m = 0; m < 6; ++m) {
                auto block = a.W.block(a.partition.offset(m), k, a.partition.dim(m), 1);
                if (a.F(k, m) == 0) CHECK(block.isZero(0.0));
                else CHECK(block.cwiseAbs().minCoeff() > 0.0);
            }
        }
        CHECK(a.noise_variance.isOnes());
    }
}

TEST_CASE("sampling is deterministic") {
    auto t = generate_truth(3, {4}, 5, FactorDistribution::uniform_subsets, 1);
    auto a = sample_collection(t, 30, 9), b = sample_collection(t, 30, 9), c = sample_collection(t, 30, 10);
    CHECK((a.data().array() == b.data().array()).all());
    CHECK_FALSE((a.data().array() == c.data().array()).all());
    CHECK_THROWS_AS(sample_collection(t, 1, 9), UsageError);
}

TEST_CASE("zero loadings give pure noise") {
    auto t = generate_truth(3, {4, 6, 2}, 3, FactorDistribution::uniform_subsets, 3);
    t.W.setZero();
    t.noise_variance << 1.0, 4.0, 0.25;
    const Index n = 500;
    auto d = sample_collection(t, n, 4);
    for (Index m = 0; m < 3; ++m) {
        const double s2 = t.noise_variance(m);
        const double dm = static_cast<double>(t.partition.dim(m));
        const double var = d.view(m).squaredNorm() / (static_cast<double>(n) * dm);
        CHECK(std::abs(var - s2) <= 3 * s2 * std::sqrt(2.0 / (static_cast<double>(n) * dm - 1)));
    }
}

TEST_CASE("sample covariance converges for the preset") {
    auto t = generate_truth(0, {}, 0, FactorDistribution::sec4_preset, 5);
    auto d = sample_collection(t, 100000, 6);
    const Matrix cov = d.data().transpose() * d.data() / 100000.0;
    Matrix expect = t.W * t.W.transpose();
    expect.diagonal().array() += 1.0;
    // entry (i, j) has sampling sd sqrt((S_ii S_jj + S_ij^2) / N); with broad
    // factors S_ii reaches ~20, so the raw deviation is judged per entry
    const Matrix sd = ((expect.diagonal() * expect.diagonal().transpose()).array() + expect.array().square())
                          .sqrt() / std::sqrt(100000.0);
    CHECK(((cov - expect).array().abs() / sd.array()).maxCoeff() < 5.0);
    CHECK((cov - expect).cwiseAbs().maxCoeff() < 0.05 * expect.diagonal().maxCoeff());
}

TEST_CASE("power-law cardinalities follow 1/c") {
    const Index M = 10, K = 10000;
    auto t = generate_truth(M, {1}, K, FactorDistribution::power_law, 8);
    std::vector<double> counts(M + 1, 0.0);
    for (Index k = 0; k < K; ++k) counts[static_cast<std::size_t>(t.F.row(k).sum())] += 1;
    double norm = 0.0;
    for (Index c = 1; c <= M; ++c) norm += 1.0 / static_cast<double>(c);
    double chi2 = 0.0;
    for (Index c = 1; c <= M; ++c) {
        const double expected = static_cast<double>(K) / (static_cast<double>(c) * norm);
        chi2 += std::pow(counts[static_cast<std::size_t>(c)] - expected, 2) / expected;
    }
    boost::math::chi_squared dist(static_cast<double>(M - 1));
    CHECK(boost::math::cdf(boost::math::complement(dist, chi2)) > 0.01);
}

TEST_CASE("uniform subsets have binomial cardinalities") {
    const Index M = 8, K = 4000;
    auto t = generate_truth(M, {1}, K, FactorDistribution::uniform_subsets, 9);
    double mean = 0.0;
    for (Index k = 0; k < K; ++k) mean += static_cast<double>(t.F.row(k).sum());
    mean /= static_cast<double>(K);
    // nonempty subsets: E[c] = M 2^(M-1) / (2^M - 1)
    const double expect = 8.0 * 128.0 / 255.0;
    CHECK(std::abs(mean - expect) < 0.1);
}
