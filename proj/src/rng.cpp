#include "mdcrbm/rng.hpp"

namespace mdcrbm {

namespace {

// splitmix64; standard finaliser used to decorrelate nearby seeds.
std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

std::mt19937_64 substream(std::uint64_t root_seed, std::string_view label) {
    std::uint64_t s = mix(root_seed ^ mix(fnv1a(label)));
    std::seed_seq seq{static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s >> 32),
                      static_cast<std::uint32_t>(root_seed), static_cast<std::uint32_t>(root_seed >> 32)};
    return std::mt19937_64(seq);
}

}  // namespace mdcrbm
