#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>

namespace solo {

/// Reproducible random stream keyed by (seed, stream id).
///
/// Every consumer (sampler, each optimizer, network init) owns its own
/// stream so it can be replayed in isolation. `derive` forks an independent
/// child stream, used for per-sample generation that may run in parallel.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id);

    /// Stream id taken from a stable hash of `name`.
    static RngStream named(std::uint64_t seed, std::string_view name);

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_id() const noexcept { return stream_; }

    RngStream derive(std::uint64_t child) const;

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal();
    /// Uniform integer in [0, n).
    std::size_t index(std::size_t n);
    bool bernoulli(double p) { return uniform() < p; }

    std::uint64_t next_u64() { return engine_(); }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

std::uint64_t stable_hash(std::string_view text) noexcept;

} // namespace solo
