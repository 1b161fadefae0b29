#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace spoofguard {

/// Seeded pseudo-random stream backed by std::mt19937_64.
///
/// The engine's output sequence is fixed by the C++ standard, but the
/// std:: distributions are not, so the conversions to uniform and normal
/// variates are done here to keep results identical across toolchains.
///
/// Independent streams are derived from a master seed plus a label
/// (sensor id, tree index, ...). Drawing from one stream never perturbs
/// another, so adding a sensor to a scenario leaves the others unchanged.
class Rng {
public:
    explicit Rng(std::uint64_t seed);
    Rng(std::uint64_t seed, std::string_view stream);
    Rng(std::uint64_t seed, std::string_view stream, std::uint64_t index);

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n);

    /// Standard normal via Box-Muller (one cached spare).
    double normal();
    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    double exponential(double mean);

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// 64-bit FNV-1a; stable hash used for stream labels and config fingerprints.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL);

}  // namespace spoofguard
