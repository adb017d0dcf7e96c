// rng.hpp — counter-based Gaussian stream.
//
// Philox-4x32-10 keyed by the master seed; the counter block carries
// (counter, stream_id), so a draw is a pure function of
// (seed, stream_id, counter). Distinct stream ids give independent sequences,
// and replaying the same triple reproduces the same values bit for bit,
// regardless of evaluation order or how work is split across threads.
//
// Each counter tick yields one 128-bit block, converted to two standard
// normals by Box–Muller. Requests for an odd number of normals discard the
// spare half-block rather than caching it, keeping the stream state a plain
// (seed, stream, counter) triple.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

namespace chcook {

namespace detail {

inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) {
    constexpr std::uint32_t mul0 = 0xD2511F53u;
    constexpr std::uint32_t mul1 = 0xCD9E8D57u;
    constexpr std::uint32_t weyl0 = 0x9E3779B9u;
    constexpr std::uint32_t weyl1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += weyl0;
            key[1] += weyl1;
        }
        const std::uint64_t p0 = static_cast<std::uint64_t>(mul0) * ctr[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(mul1) * ctr[2];
        ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
               static_cast<std::uint32_t>(p1),
               static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
               static_cast<std::uint32_t>(p0)};
    }
    return ctr;
}

// (0,1] and [0,1) from the top 53 bits.
inline double to_open_closed(std::uint64_t u) {
    return (static_cast<double>(u >> 11) + 1.0) * 0x1.0p-53;
}
inline double to_half_open(std::uint64_t u) {
    return static_cast<double>(u >> 11) * 0x1.0p-53;
}

}  // namespace detail

struct NoiseStream {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    std::uint64_t counter = 0;

    /// Two standard normals from the current counter block; advances by one.
    std::array<double, 2> normal_pair() {
        const std::array<std::uint32_t, 4> ctr = {
            static_cast<std::uint32_t>(counter), static_cast<std::uint32_t>(counter >> 32),
            static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
        const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed),
                                                  static_cast<std::uint32_t>(seed >> 32)};
        const auto out = detail::philox4x32(ctr, key);
        ++counter;
        const std::uint64_t a =
            static_cast<std::uint64_t>(out[0]) | (static_cast<std::uint64_t>(out[1]) << 32);
        const std::uint64_t b =
            static_cast<std::uint64_t>(out[2]) | (static_cast<std::uint64_t>(out[3]) << 32);
        const double u1 = detail::to_open_closed(a);
        const double u2 = detail::to_half_open(b);
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double phi = 2.0 * std::numbers::pi * u2;
        return {r * std::cos(phi), r * std::sin(phi)};
    }

    double normal() { return normal_pair()[0]; }

    void normals(std::span<double> out) {
        std::size_t i = 0;
        while (i + 1 < out.size()) {
            const auto z = normal_pair();
            out[i] = z[0];
            out[i + 1] = z[1];
            i += 2;
        }
        if (i < out.size()) out[i] = normal_pair()[0];
    }

    std::vector<double> normals(std::size_t count) {
        std::vector<double> out(count);
        normals(std::span<double>(out));
        return out;
    }
};

/// Stream-id carving: a small purpose tag in the high bits keeps the id
/// spaces of concurrent consumers disjoint.
enum class StreamPurpose : std::uint64_t {
    trajectory = 1,
    ensemble = 2,
    reference = 3,
    pair_primary = 4,
    pair_secondary = 5,
    control = 6,
    initial = 7,
};

inline NoiseStream make_stream(std::uint64_t seed, StreamPurpose purpose, std::uint64_t index) {
    return NoiseStream{seed, (static_cast<std::uint64_t>(purpose) << 48) | index, 0};
}

}  // namespace chcook
