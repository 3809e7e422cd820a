#pragma once

#include <cstdint>

namespace dift {

/// Counter-based generator: every draw is a pure function of (seed, stream, counter),
/// so a run can be replayed from any step without carrying hidden engine state.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept;

    std::uint64_t next_u64() noexcept;
    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() noexcept;

    std::uint64_t counter() const noexcept { return counter_; }
    void set_counter(std::uint64_t c) noexcept { counter_ = c; }

    static std::uint64_t u64_at(std::uint64_t seed, std::uint64_t stream,
                                std::uint64_t counter) noexcept;
    static double uniform_at(std::uint64_t seed, std::uint64_t stream,
                             std::uint64_t counter) noexcept;

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace dift
