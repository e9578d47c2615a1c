#pragma once

#include <cstdint>

namespace cslr {

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Derives an independent 64-bit key from a parent seed and a stream id.
// Used for per-observation, per-replication and per-bootstrap-draw streams so
// that results never depend on scheduling order.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

// Counter-based generator: draw i of a stream is a pure function of
// (key, i). Cheap to construct, so one is created per observation.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}
    CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
        : key_(derive_seed(seed, stream)) {}

    std::uint64_t next_u64() noexcept;

    // Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept;

    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace cslr
