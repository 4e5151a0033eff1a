#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace mktphase {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
/// Output is a pure function of (key, counter).
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    explicit Philox4x32(Key key) : key_(key) {}

    Counter operator()(Counter ctr) const noexcept;

private:
    Key key_;
};

/// Derives a 64-bit sub-seed from a master seed and a stream name, so each
/// module draws from its own reproducible sequence.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view name) noexcept;

/// Indexed random streams. Draw (stream, index) is independent of every other
/// draw and of the order in which draws are requested.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed);

    /// Uniform on the open interval (0, 1).
    double uniform(std::uint64_t stream, std::uint64_t index) const noexcept;

    /// Standard normal via Box-Muller on one Philox block.
    double normal(std::uint64_t stream, std::uint64_t index) const noexcept;

    /// Uniform integer in [0, bound).
    std::uint64_t below(std::uint64_t bound, std::uint64_t stream, std::uint64_t index) const noexcept;

private:
    Philox4x32::Counter block(std::uint64_t stream, std::uint64_t index) const noexcept;

    Philox4x32 gen_;
};

}  // namespace mktphase
