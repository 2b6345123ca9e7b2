#ifndef GEPPG_RNG_HPP
#define GEPPG_RNG_HPP

#include "geppg/common.hpp"

#include <cstdint>
#include <random>

namespace geppg {

using Rng = std::mt19937_64;

/// Independent random streams of one run. Adding a consumer to one stream
/// never shifts the draws seen by another.
enum class Stream : std::uint64_t {
    env = 1,
    net_init = 2,
    noise = 3,
    gep = 4,
    buffer = 5,
    eval = 6,
    analysis = 7,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    return splitmix64(splitmix64(a) ^ (b + 0x632be59bd9b4e019ULL));
}

/// Per-run seed derived from (master seed, seed value).
inline std::uint64_t run_seed(std::uint64_t master_seed, std::uint64_t seed) {
    return mix_seed(master_seed, seed);
}

inline Rng make_stream(std::uint64_t seed, Stream stream, std::uint64_t sub = 0) {
    return Rng(mix_seed(mix_seed(seed, static_cast<std::uint64_t>(stream)), sub));
}

template <typename Scalar = double>
Vector<Scalar> uniform_vector(Index n, Scalar lo, Scalar hi, Rng& rng) {
    std::uniform_real_distribution<Scalar> dist(lo, hi);
    Vector<Scalar> v(n);
    for (Index i = 0; i < n; ++i) v[i] = dist(rng);
    return v;
}

template <typename Scalar = double>
Vector<Scalar> gaussian_vector(Index n, Scalar sigma, Rng& rng) {
    std::normal_distribution<Scalar> dist(Scalar(0), Scalar(1));
    Vector<Scalar> v(n);
    for (Index i = 0; i < n; ++i) v[i] = sigma * dist(rng);
    return v;
}

} // namespace geppg

#endif
