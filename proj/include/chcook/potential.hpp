// potential.hpp — logarithmic drift, its polynomial truncations, and the
// associated potentials.
//
//   f(x)  = ln((1-x)/(1+x)) + λx                        on (-1,1)
//   F(x)  = (1+x)ln(1+x) + (1-x)ln(1-x) - (λ/2)x²       with F' = -f
//   f_n(x) = -2 Σ_{k=0}^n x^{2k+1}/(2k+1) + λx          on all of ℝ
//   F_n(x) =  2 Σ_{k=0}^n x^{2k+2}/((2k+2)(2k+1)) - (λ/2)x²
//
// f_n → f pointwise on (-1,1) with tail gap bounded by
// 2|x|^{2n+3} / ((2n+3)(1-x²)). f_lip is a globally Lipschitz surrogate equal
// to f on [-1+δ/2, 1-δ/2], continued linearly with the boundary slope.
//
// Potentials U integrate F (or F_n) over the domain by midpoint quadrature;
// in the singular mode, any sample outside [-1,1] yields a +∞ sentinel rather
// than an error, so that e^{-U} composes to a zero weight.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "chcook/spectral.hpp"

namespace chcook {

/// Argument outside the admissible interval of a singular map.
class SingularInput : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

struct PotentialSpec {
    double lambda = 0.0;     // linear coefficient
    int n = 0;               // polynomial truncation index
    double eps_clip = 1e-12; // singularity guard for clipped evaluation
    double delta = 0.1;      // half-gap of the Lipschitz window
    bool clip = false;       // clip |x| to 1-eps_clip instead of throwing

    void validate() const {
        if (n < 0) throw std::invalid_argument("PotentialSpec: n must be >= 0");
        if (!(eps_clip > 0.0 && eps_clip <= 1e-3))
            throw std::invalid_argument("PotentialSpec: eps_clip must lie in (0, 1e-3]");
        if (!(delta > 0.0 && delta < 1.0))
            throw std::invalid_argument("PotentialSpec: delta must lie in (0,1)");
    }
};

namespace detail {
inline double clip_or_throw(double x, const PotentialSpec& spec, const char* who) {
    if (std::abs(x) < 1.0) return x;
    if (!spec.clip) throw SingularInput(std::string(who) + ": |x| >= 1");
    return std::clamp(x, -1.0 + spec.eps_clip, 1.0 - spec.eps_clip);
}

inline double xlnx(double t) { return t > 0.0 ? t * std::log(t) : 0.0; }
}  // namespace detail

/// f(x) = ln((1-x)/(1+x)) + λx. Odd; singular at ±1.
inline double f_log(double x, const PotentialSpec& spec) {
    const double xc = detail::clip_or_throw(x, spec, "f_log");
    return std::log1p(-xc) - std::log1p(xc) + spec.lambda * xc;
}

/// F(x) = (1+x)ln(1+x) + (1-x)ln(1-x) - (λ/2)x² on [-1,1], endpoint values
/// by continuity (0·ln 0 = 0). Even; F' = -f on the interior.
inline double big_f(double x, const PotentialSpec& spec) {
    double xc = x;
    if (std::abs(xc) > 1.0) {
        if (!spec.clip) throw SingularInput("big_f: |x| > 1");
        xc = std::clamp(xc, -1.0, 1.0);
    }
    return detail::xlnx(1.0 + xc) + detail::xlnx(1.0 - xc) - 0.5 * spec.lambda * xc * xc;
}

/// Degree-(2n+1) truncation of f; defined on all of ℝ.
inline double f_n(double x, const PotentialSpec& spec) {
    const double x2 = x * x;
    double term = x;
    double acc = x;
    for (int k = 1; k <= spec.n; ++k) {
        term *= x2;
        acc += term / static_cast<double>(2 * k + 1);
    }
    return -2.0 * acc + spec.lambda * x;
}

/// Antiderivative of -f_n with F_n(0) = 0.
inline double big_f_n(double x, const PotentialSpec& spec) {
    const double x2 = x * x;
    double term = x2;
    double acc = 0.5 * x2;
    for (int k = 1; k <= spec.n; ++k) {
        term *= x2;
        acc += term / static_cast<double>((2 * k + 2) * (2 * k + 1));
    }
    return 2.0 * acc - 0.5 * spec.lambda * x2;
}

/// Window edge of the Lipschitz surrogate: 1 - δ/2.
inline double lipschitz_window(const PotentialSpec& spec) { return 1.0 - 0.5 * spec.delta; }

/// Globally Lipschitz function equal to f on [-(1-δ/2), 1-δ/2], extended
/// linearly with the edge slope f'(±(1-δ/2)) = λ - 2/(1-(1-δ/2)²).
inline double f_lip(double x, const PotentialSpec& spec) {
    const double xw = lipschitz_window(spec);
    if (std::abs(x) <= xw) return f_log(x, spec);
    const double sign = x > 0.0 ? 1.0 : -1.0;
    const double edge = sign * xw;
    const double f_edge = std::log1p(-edge) - std::log1p(edge) + spec.lambda * edge;
    const double slope = spec.lambda - 2.0 / (1.0 - xw * xw);
    return f_edge + slope * (x - edge);
}

/// Lipschitz constant of f_lip: the largest |f'| over the window, which is
/// attained at the edge or at the origin.
inline double f_lip_constant(const PotentialSpec& spec) {
    const double xw = lipschitz_window(spec);
    const double at_edge = spec.lambda - 2.0 / (1.0 - xw * xw);
    const double at_zero = spec.lambda - 2.0;
    return std::max(std::abs(at_edge), std::abs(at_zero));
}

enum class PotentialKind { log_singular, polynomial };

/// U(x) = ∫ F(x(θ)) dθ (singular mode, +∞ sentinel outside the unit band),
/// or U_n(x) = ∫ F_n(x(θ)) dθ, by midpoint quadrature over the samples.
inline double potential_u(const GridField& g, const PotentialSpec& spec, PotentialKind kind) {
    const int p = g.points();
    if (p == 0) throw std::invalid_argument("potential_u: empty grid");
    if (kind == PotentialKind::log_singular) {
        for (int j = 0; j < p; ++j)
            if (std::abs(g[j]) > 1.0) return std::numeric_limits<double>::infinity();
        double acc = 0.0;
        for (int j = 0; j < p; ++j)
            acc += detail::xlnx(1.0 + g[j]) + detail::xlnx(1.0 - g[j]) -
                   0.5 * spec.lambda * g[j] * g[j];
        return acc / static_cast<double>(p);
    }
    double acc = 0.0;
    for (int j = 0; j < p; ++j) acc += big_f_n(g[j], spec);
    return acc / static_cast<double>(p);
}

inline double potential_u(const SpectralField& h, int points, const PotentialSpec& spec,
                          PotentialKind kind) {
    return potential_u(synthesize(h, points), spec, kind);
}

/// Double-logarithmic nonlinearity ψ(u) = (θ/2) ln((1+u)/(1-u)) - θ_c u.
/// Satisfies ψ(u) = -(θ/2) f(u) when λ = 2θ_c/θ.
inline double map_psi(double u, double theta_temp, double theta_c) {
    if (theta_temp <= 0.0) throw std::invalid_argument("map_psi: theta must be > 0");
    if (std::abs(u) >= 1.0) throw SingularInput("map_psi: |u| >= 1");
    return 0.5 * theta_temp * (std::log1p(u) - std::log1p(-u)) - theta_c * u;
}

/// Analytic envelope of |f_n(x) - f(x)| on (-1,1):
/// 2|x|^{2n+3} / ((2n+3)(1-x²)).
inline double series_tail_bound(double x, int n) {
    if (std::abs(x) >= 1.0) throw SingularInput("series_tail_bound: |x| >= 1");
    const double ax = std::abs(x);
    return 2.0 * std::pow(ax, 2 * n + 3) /
           (static_cast<double>(2 * n + 3) * (1.0 - x * x));
}

}  // namespace chcook
