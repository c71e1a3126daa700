#include "gfa/synthetic.hpp"

#include <cmath>
#include <numeric>
#include <string_view>

#include <json.hpp>

#include "gfa/error.hpp"
#include "gfa/rng.hpp"

namespace gfa {

namespace detail {
extern const std::string_view kSec4PresetJson;
}

namespace {

std::vector<Index> random_subset(Rng& rng, Index M, Index size) {
    std::vector<Index> pool(static_cast<std::size_t>(M));
    std::iota(pool.begin(), pool.end(), Index{0});
    for (Index i = 0; i < size; ++i) {
        const auto j = i + static_cast<Index>(rng.below(static_cast<std::uint64_t>(M - i)));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(static_cast<std::size_t>(size));
    return pool;
}

Index draw_power_law_cardinality(Rng& rng, Index M, double exponent) {
    Vector cdf(M);
    double total = 0.0;
    for (Index c = 1; c <= M; ++c) {
        total += std::pow(static_cast<double>(c), -exponent);
        cdf(c - 1) = total;
    }
    const double u = rng.uniform() * total;
    for (Index c = 0; c < M; ++c)
        if (u <= cdf(c)) return c + 1;
    return M;
}

}  // namespace

std::string to_string(FactorDistribution dist) {
    switch (dist) {
        case FactorDistribution::uniform_cardinality: return "uniform-cardinality";
        case FactorDistribution::power_law: return "power-law";
        case FactorDistribution::uniform_subsets: return "uniform-subsets";
        case FactorDistribution::sec4_preset: return "sec4-preset";
    }
    return "unknown";
}

FactorDistribution distribution_from_string(const std::string& name) {
    std::string key = name;
    for (char& c : key)
        if (c == '_') c = '-';
    if (key == "uniform-cardinality") return FactorDistribution::uniform_cardinality;
    if (key == "power-law") return FactorDistribution::power_law;
    if (key == "uniform-subsets") return FactorDistribution::uniform_subsets;
    if (key == "sec4-preset") return FactorDistribution::sec4_preset;
    throw UsageError("unknown factor distribution '" + name + "'");
}

const PresetDesign& sec4_preset() {
    static const PresetDesign design = [] {
        const auto j = nlohmann::json::parse(detail::kSec4PresetJson);
        PresetDesign d;
        d.dims = j.at("dims").get<std::vector<Index>>();
        d.patterns = j.at("patterns").get<std::vector<std::vector<Index>>>();
        return d;
    }();
    return design;
}

GroundTruth generate_truth(Index M, std::vector<Index> dims, Index K, FactorDistribution dist,
                           std::uint64_t seed, double power_law_exponent) {
    std::vector<std::vector<Index>> patterns;
    Rng rng = Rng(seed).split("truth");

    if (dist == FactorDistribution::sec4_preset) {
        const auto& preset = sec4_preset();
        const auto preset_m = static_cast<Index>(preset.dims.size());
        const auto preset_k = static_cast<Index>(preset.patterns.size());
        if ((M != 0 && M != preset_m) || (K != 0 && K != preset_k) ||
            (!dims.empty() && dims != preset.dims))
            throw UsageError("sec4-preset fixes M=" + std::to_string(preset_m) +
                             ", K=" + std::to_string(preset_k) + " and its own view widths");
        M = preset_m;
        K = preset_k;
        dims = preset.dims;
        patterns = preset.patterns;
    } else {
        if (M < 1) throw UsageError("M must be at least 1");
        if (K < 1) throw UsageError("K must be at least 1");
        if (dims.size() == 1) dims.assign(static_cast<std::size_t>(M), dims.front());
        if (static_cast<Index>(dims.size()) != M)
            throw UsageError("expected " + std::to_string(M) + " view widths, got " +
                             std::to_string(dims.size()));
        switch (dist) {
            case FactorDistribution::uniform_cardinality:
                if (K != M) throw UsageError("uniform-cardinality needs K = M");
                for (Index c = 1; c <= M; ++c) patterns.push_back(random_subset(rng, M, c));
                break;
            case FactorDistribution::power_law:
                if (!(power_law_exponent >= 0)) throw UsageError("power-law exponent must be non-negative");
                for (Index k = 0; k < K; ++k)
                    patterns.push_back(
                        random_subset(rng, M, draw_power_law_cardinality(rng, M, power_law_exponent)));
                break;
            case FactorDistribution::uniform_subsets:
                for (Index k = 0; k < K; ++k) {
                    std::vector<Index> subset;
                    while (subset.empty()) {
                        for (Index m = 0; m < M; ++m)
                            if (rng.next_u64() >> 63) subset.push_back(m);
                    }
                    patterns.push_back(std::move(subset));
                }
                break;
            case FactorDistribution::sec4_preset: break;
        }
    }

    GroundTruth truth;
    truth.partition = ViewPartition(dims);
    truth.F = BinaryMatrix::Zero(K, M);
    for (Index k = 0; k < K; ++k) {
        if (patterns[k].empty()) throw UsageError("every factor must be active in at least one view");
        for (Index m : patterns[k]) {
            if (m < 0 || m >= M) throw UsageError("pattern references a view out of range");
            truth.F(k, m) = 1;
        }
    }
    truth.W = Matrix::Zero(truth.partition.total_dim(), K);
    for (Index k = 0; k < K; ++k)
        for (Index m = 0; m < M; ++m)
            if (truth.F(k, m))
                for (Index d = 0; d < truth.partition.dim(m); ++d)
                    truth.W(truth.partition.offset(m) + d, k) = rng.normal();
    truth.noise_variance = Vector::Ones(M);
    return truth;
}

DataCollection sample_collection(const GroundTruth& truth, Index N, std::uint64_t seed) {
    if (N < 2) throw UsageError("sample size must be at least 2");
    Rng rng = Rng(seed).split("sample");
    Rng z_rng = rng.split("z");
    Rng e_rng = rng.split("noise");
    const Matrix z = z_rng.normal_matrix(N, truth.factors());
    Matrix y = z * truth.W.transpose();
    const auto& p = truth.partition;
    for (Index n = 0; n < N; ++n)
        for (Index m = 0; m < p.view_count(); ++m) {
            const double sd = std::sqrt(truth.noise_variance(m));
            for (Index d = 0; d < p.dim(m); ++d) y(n, p.offset(m) + d) += sd * e_rng.normal();
        }
    return DataCollection(p, std::move(y));
}

}  // namespace gfa
