#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace voxsel {

// ---------------------------------------------------------------------------
// Errors. The CLI maps these onto exit codes: IoError/ArgumentError -> 2,
// ConfigError/IntegrityError -> 3, TrainingFailure and anything else -> 1.
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : Error {
    using Error::Error;
};

struct ParseError : Error {
    using Error::Error;
};

// Dataset violates a structural invariant (inconsistent labels, missing values).
struct IntegrityError : Error {
    using Error::Error;
};

struct ArgumentError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

// Training aborted (non-finite state). Message carries epoch/algorithm diagnostics.
struct TrainingFailure : Error {
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Deterministic randomness. mt19937_64 is bit-specified by the standard, but
// the <random> distributions are not, so all mappings from raw engine output
// to values live here.
// ---------------------------------------------------------------------------

using Rng = std::mt19937_64;

// splitmix64 finalizer; used to derive independent seed streams.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t seed_combine(std::uint64_t a, std::uint64_t b) {
    return mix64(a ^ mix64(b + 0x517cc1b727220a95ULL));
}

// Seed stream for one (stage, repetition, role) cell of an experiment.
// Stable layout; recorded values in manifests depend on it.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stage,
                                 std::uint64_t rep, std::uint64_t role) {
    return seed_combine(seed_combine(seed_combine(master, stage), rep), role);
}

// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_range(Rng& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

// Unbiased integer in [0, n) via rejection.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
    if (n == 0) throw ArgumentError("uniform_index: n must be positive");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % n;
}

// Fisher-Yates; stable across platforms, unlike std::shuffle.
template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(uniform_index(rng, i));
        std::swap(v[i - 1], v[j]);
    }
}

// First k of a seeded shuffle of 0..n-1 (sampling without replacement).
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, Rng& rng);

// FNV-1a over bytes; manifest digests.
std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace voxsel
