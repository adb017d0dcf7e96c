#pragma once

#include <catch2/catch_amalgamated.hpp>

#include "chcook/rng.hpp"
#include "chcook/spectral.hpp"

namespace testutil {

/// Deterministic band-limited field with O(1) coefficients.
inline chcook::SpectralField random_field(std::uint64_t tag, int modes, double mean = 0.0) {
    chcook::NoiseStream stream{0x9d2c5680u, tag, 0};
    chcook::SpectralField h(modes);
    h[0] = mean;
    for (int i = 1; i <= modes; ++i) h[i] = stream.normal() / static_cast<double>(i);
    return h;
}

inline double max_coeff_diff(const chcook::SpectralField& a, const chcook::SpectralField& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.coeffs.size(); ++i)
        m = std::max(m, std::abs(a.coeffs[i] - b.coeffs[i]));
    return m;
}

}  // namespace testutil
