// gaussian.hpp — conservative noise and the exactly samplable Gaussian laws.
//
// The driving noise has covariance -A: the increment over dt carries
// independent N(0, a_i dt) on each nonconstant mode and exactly zero on the
// mean. The one-step stochastic convolution of the linear flow e^{-tA²/2} has
// the closed-form per-mode variance (1 - e^{-a_i² dt})/a_i, which tends to
// 1/a_i as dt → ∞; the corresponding stationary law with mean c is sampled
// directly by sample_mu_c.

#pragma once

#include <cmath>
#include <stdexcept>

#include "chcook/rng.hpp"
#include "chcook/spectral.hpp"

namespace chcook {

/// Per-mode variance of the conservative noise increment over dt.
inline double noise_variance(int i, double dt) { return eigenvalue(i) * dt; }

/// Per-mode variance of the one-step stochastic convolution.
inline double convolution_variance(int i, double dt) {
    if (i == 0) return 0.0;
    const double a = eigenvalue(i);
    return -std::expm1(-a * a * dt) / a;
}

/// Increment of the conservative noise over dt on modes 1..M; the mean mode
/// is identically zero.
inline SpectralField noise_increment(NoiseStream& stream, double dt, int modes) {
    if (dt <= 0.0) throw std::invalid_argument("noise_increment: dt must be > 0");
    SpectralField h(modes);
    std::vector<double> z = stream.normals(static_cast<std::size_t>(modes));
    for (int i = 1; i <= modes; ++i)
        h[i] = std::sqrt(noise_variance(i, dt)) * z[static_cast<std::size_t>(i - 1)];
    return h;
}

/// Exact sample of ∫_0^dt e^{-(dt-s)A²/2} B dW_s: mode i ~ N(0, (1-e^{-a_i²dt})/a_i).
inline SpectralField convolution_increment(NoiseStream& stream, double dt, int modes) {
    if (dt <= 0.0) throw std::invalid_argument("convolution_increment: dt must be > 0");
    SpectralField h(modes);
    std::vector<double> z = stream.normals(static_cast<std::size_t>(modes));
    for (int i = 1; i <= modes; ++i)
        h[i] = std::sqrt(convolution_variance(i, dt)) * z[static_cast<std::size_t>(i - 1)];
    return h;
}

/// Sample of the Gaussian law N(c e_0, (-A)^{-1}) truncated to M modes:
/// mean coefficient exactly c, mode i ~ N(0, 1/a_i).
inline SpectralField sample_mu_c(NoiseStream& stream, double c, int modes) {
    if (!(std::abs(c) < 1.0)) throw std::invalid_argument("sample_mu_c: need |c| < 1");
    if (modes < 1) throw std::invalid_argument("sample_mu_c: need modes >= 1");
    SpectralField h(modes);
    h[0] = c;
    std::vector<double> z = stream.normals(static_cast<std::size_t>(modes));
    for (int i = 1; i <= modes; ++i)
        h[i] = z[static_cast<std::size_t>(i - 1)] / std::sqrt(eigenvalue(i));
    return h;
}

/// One exact-in-distribution step of the linear flow:
/// e^{-dt A²/2} x plus an independent convolution increment.
inline SpectralField linear_solution_step(const SpectralField& x, NoiseStream& stream, double dt) {
    SpectralField h = heat_semigroup(x, dt);
    const SpectralField xi = convolution_increment(stream, dt, x.modes());
    for (int i = 1; i <= x.modes(); ++i) h[i] += xi[i];
    return h;
}

}  // namespace chcook
