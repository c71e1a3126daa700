#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gfa/activity.hpp"
#include "gfa/data_model.hpp"

namespace gfa {

enum class FactorDistribution {
    uniform_cardinality,  ///< factor k active in a random subset of size k, K = M
    power_law,            ///< cardinality c with P(c) proportional to c^-exponent
    uniform_subsets,      ///< uniform over the 2^M - 1 nonempty view subsets
    sec4_preset,          ///< fixed ten-view, 24-factor design read from data/
};

std::string to_string(FactorDistribution dist);
FactorDistribution distribution_from_string(const std::string& name);

struct GroundTruth {
    ViewPartition partition;
    BinaryMatrix F;        ///< K x M
    Matrix W;              ///< D x K, exactly zero outside active blocks
    Vector noise_variance; ///< per view

    Index factors() const { return F.rows(); }
};

struct PresetDesign {
    std::vector<Index> dims;
    std::vector<std::vector<Index>> patterns;
};

/// The checked-in ten-view design.
const PresetDesign& sec4_preset();

/// `dims` may hold a single width shared by all M views. For sec4_preset
/// M, dims and K may be left as 0 / empty; if given they must match.
GroundTruth generate_truth(Index M, std::vector<Index> dims, Index K, FactorDistribution dist,
                           std::uint64_t seed, double power_law_exponent = 1.0);

/// Y = Z W^T + E with Z standard normal and E_{n,d} ~ N(0, sigma_m^2).
DataCollection sample_collection(const GroundTruth& truth, Index N, std::uint64_t seed);

}  // namespace gfa
