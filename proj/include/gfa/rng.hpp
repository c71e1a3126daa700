#pragma once

#include <cstdint>
#include <string_view>

#include <Eigen/Dense>

namespace gfa {

/// Counter-based generator: draw i of stream `key` is mix(key, i), so any
/// stream can be split into independent children by hashing a label into
/// the key. The output sequence depends only on (seed, labels), never on
/// the standard library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : key_(mix(seed ^ 0x6a09e667f3bcc909ULL)) {}

    /// Child stream identified by a label; independent of the parent's
    /// position.
    Rng split(std::string_view label) const;
    Rng split(std::uint64_t index) const;

    std::uint64_t next_u64() { return mix(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

    /// Uniform on the open interval (0, 1).
    double uniform();

    /// Uniform integer on [0, n).
    std::uint64_t below(std::uint64_t n);

    double normal();

    Eigen::MatrixXd normal_matrix(Eigen::Index rows, Eigen::Index cols);

private:
    Rng(std::uint64_t key, int) : key_(key) {}

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace gfa
