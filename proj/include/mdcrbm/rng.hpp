#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace mdcrbm {

// Derives an independent engine from a root seed and a purpose label, so the
// CLI's single --seed fans out into decoupled streams (training noise, chain
// initialisation, shuffling, ...) without the streams aliasing each other.
std::mt19937_64 substream(std::uint64_t root_seed, std::string_view label);

// Convenience draw helpers; all consume from the passed engine only.
inline double draw_unit(std::mt19937_64& eng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(eng);
}

inline double draw_gauss(std::mt19937_64& eng) {
    return std::normal_distribution<double>(0.0, 1.0)(eng);
}

}  // namespace mdcrbm
