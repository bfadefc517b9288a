#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <vector>

namespace mdcrbm {

// ln(1 + e^a), stable for large |a|.
inline double softplus(double a) {
    if (a > 34.0) return a;           // e^-a below double epsilon
    if (a < -34.0) return std::exp(a);
    return std::log1p(std::exp(a));
}

// 1 / (1 + e^-a), stable for large |a|.
inline double sigmoid(double a) {
    if (a >= 0.0) {
        double e = std::exp(-a);
        return 1.0 / (1.0 + e);
    }
    double e = std::exp(a);
    return e / (1.0 + e);
}

// ln sum_i e^{v_i}; max-shifted.
inline double logsumexp(const std::vector<double>& v) {
    double m = *std::max_element(v.begin(), v.end());
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

// -- little-endian scalar (de)serialisation ------------------------------
// Model files are defined little-endian regardless of host order.

inline void store_u32le(unsigned char* p, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) p[i] = static_cast<unsigned char>(v >> (8 * i));
}

inline void store_u64le(unsigned char* p, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) p[i] = static_cast<unsigned char>(v >> (8 * i));
}

inline void store_f64le(unsigned char* p, double d) {
    std::uint64_t v;
    std::memcpy(&v, &d, 8);
    store_u64le(p, v);
}

inline std::uint32_t load_u32le(const unsigned char* p) {
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}

inline std::uint64_t load_u64le(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}

inline double load_f64le(const unsigned char* p) {
    std::uint64_t v = load_u64le(p);
    double d;
    std::memcpy(&d, &v, 8);
    return d;
}

}  // namespace mdcrbm
