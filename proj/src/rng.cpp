#include "gfa/rng.hpp"

#include <cmath>
#include <numbers>

namespace gfa {

Rng Rng::split(std::string_view label) const {
    // FNV-1a over the label, folded into the parent key.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : label) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return Rng(mix(key_ ^ mix(h)), 0);
}

Rng Rng::split(std::uint64_t index) const {
    return Rng(mix(key_ ^ mix(index + 0x3c6ef372fe94f82bULL)), 0);
}

double Rng::uniform() {
    // 53 random bits, shifted by half an ulp so 0 is never returned.
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

std::uint64_t Rng::below(std::uint64_t n) {
    // Rejection sampling to avoid modulo bias.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
        x = next_u64();
    } while (x >= limit);
    return x % n;
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

Eigen::MatrixXd Rng::normal_matrix(Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd out(rows, cols);
    // Row-major fill order so the draw sequence matches "row n of Z".
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) out(i, j) = normal();
    return out;
}

}  // namespace gfa
