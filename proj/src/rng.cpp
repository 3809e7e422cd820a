#include "dift/rng.hpp"

namespace dift {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t make_key(std::uint64_t seed, std::uint64_t stream) noexcept {
    return mix64(seed ^ mix64(stream + kGolden));
}

double to_unit(std::uint64_t x) noexcept {
    return static_cast<double>(x >> 11) * 0x1.0p-53;
}

} // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
    : key_(make_key(seed, stream)) {}

std::uint64_t CounterRng::next_u64() noexcept {
    return mix64(key_ + (++counter_) * kGolden);
}

double CounterRng::uniform() noexcept { return to_unit(next_u64()); }

std::uint64_t CounterRng::u64_at(std::uint64_t seed, std::uint64_t stream,
                                 std::uint64_t counter) noexcept {
    return mix64(make_key(seed, stream) + (counter + 1) * kGolden);
}

double CounterRng::uniform_at(std::uint64_t seed, std::uint64_t stream,
                              std::uint64_t counter) noexcept {
    return to_unit(u64_at(seed, stream, counter));
}

} // namespace dift
