#include "mktphase/random.hpp"

#include <cmath>
#include <numbers>

namespace mktphase {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// 53-bit uniform strictly inside (0, 1).
inline double to_open_unit(std::uint32_t a, std::uint32_t b) {
    const std::uint64_t bits = (static_cast<std::uint64_t>(a >> 5) << 26) | (b >> 6);
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

}  // namespace

Philox4x32::Counter Philox4x32::operator()(Counter ctr) const noexcept {
    Key key = key_;
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, ctr[0], hi0, lo0);
        mulhilo(kMul1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view name) noexcept {
    std::uint64_t h = 0xCBF29CE484222325ull;  // FNV-1a
    for (unsigned char c : name) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return splitmix64(splitmix64(seed) ^ h);
}

CounterRng::CounterRng(std::uint64_t seed)
    : gen_({static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)}) {}

Philox4x32::Counter CounterRng::block(std::uint64_t stream, std::uint64_t index) const noexcept {
    return gen_({static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                 static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)});
}

double CounterRng::uniform(std::uint64_t stream, std::uint64_t index) const noexcept {
    const auto w = block(stream, index);
    return to_open_unit(w[0], w[1]);
}

double CounterRng::normal(std::uint64_t stream, std::uint64_t index) const noexcept {
    const auto w = block(stream, index);
    const double u1 = to_open_unit(w[0], w[1]);
    const double u2 = to_open_unit(w[2], w[3]);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t CounterRng::below(std::uint64_t bound, std::uint64_t stream,
                                std::uint64_t index) const noexcept {
    if (bound == 0) return 0;
    const auto k = static_cast<std::uint64_t>(uniform(stream, index) * static_cast<double>(bound));
    return k < bound ? k : bound - 1;
}

}  // namespace mktphase
