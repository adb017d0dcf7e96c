// spectral.hpp — Neumann cosine spectral representation on (0,1).
//
// Basis: e_0 = 1, e_i(θ) = √2 cos(iπθ), the eigenfunctions of the Laplacian
// with Neumann boundary conditions. The associated eigenvalue magnitudes are
// a_i = (iπ)², so that A e_i = -a_i e_i. A field is stored by its real
// coefficients c_0..c_M; the spatial mean is exactly c_0.
//
// Graded seminorms:  |h|_γ² = Σ_{i≥1} a_i^γ c_i²,  ‖h‖_γ² = |h|_γ² + c_0².
// Fractional powers (-A)^γ act mode-wise as a_i^γ and leave the mean
// untouched (the mean passes through unchanged by convention).
//
// Grid transforms use the midpoint grid θ_j = (j+½)/P, on which the discrete
// basis is exactly orthonormal under the quadrature inner product
// (1/P) Σ_j u_j v_j, so analyze∘synthesize is the identity for band-limited
// fields with M ≤ P-1.

#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace chcook {

/// a_i = (iπ)², the magnitude of the i-th Neumann eigenvalue of the Laplacian.
inline double eigenvalue(int i) {
    if (i < 0)
        throw std::invalid_argument("eigenvalue: mode index must be >= 0");
    const double w = static_cast<double>(i) * std::numbers::pi;
    return w * w;
}

/// Field on (0,1) stored by coefficients in the Neumann cosine basis.
struct SpectralField {
    std::vector<double> coeffs;  // c_0..c_M

    SpectralField() = default;
    explicit SpectralField(int modes) : coeffs(static_cast<std::size_t>(modes) + 1, 0.0) {
        if (modes < 0) throw std::invalid_argument("SpectralField: modes must be >= 0");
    }

    int modes() const { return static_cast<int>(coeffs.size()) - 1; }
    double mean() const { return coeffs.empty() ? 0.0 : coeffs[0]; }

    double& operator[](int i) { return coeffs[static_cast<std::size_t>(i)]; }
    double operator[](int i) const { return coeffs[static_cast<std::size_t>(i)]; }

    /// c·e_0 plus optional single excited mode.
    static SpectralField constant(double c, int modes) {
        SpectralField h(modes);
        h.coeffs[0] = c;
        return h;
    }
    static SpectralField mode(int i, int modes, double amplitude = 1.0) {
        SpectralField h(modes);
        if (i > modes) throw std::invalid_argument("SpectralField::mode: i > modes");
        h.coeffs[static_cast<std::size_t>(i)] = amplitude;
        return h;
    }

    bool finite() const {
        for (double v : coeffs)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

inline SpectralField operator+(const SpectralField& a, const SpectralField& b) {
    if (a.coeffs.size() != b.coeffs.size())
        throw std::invalid_argument("field sizes differ");
    SpectralField r = a;
    for (std::size_t i = 0; i < r.coeffs.size(); ++i) r.coeffs[i] += b.coeffs[i];
    return r;
}

inline SpectralField operator-(const SpectralField& a, const SpectralField& b) {
    if (a.coeffs.size() != b.coeffs.size())
        throw std::invalid_argument("field sizes differ");
    SpectralField r = a;
    for (std::size_t i = 0; i < r.coeffs.size(); ++i) r.coeffs[i] -= b.coeffs[i];
    return r;
}

inline SpectralField operator*(double s, const SpectralField& a) {
    SpectralField r = a;
    for (double& v : r.coeffs) v *= s;
    return r;
}

/// Point samples at the midpoints θ_j = (j+½)/P.
struct GridField {
    std::vector<double> values;

    GridField() = default;
    explicit GridField(int points) : values(static_cast<std::size_t>(points), 0.0) {}

    int points() const { return static_cast<int>(values.size()); }
    double& operator[](int j) { return values[static_cast<std::size_t>(j)]; }
    double operator[](int j) const { return values[static_cast<std::size_t>(j)]; }
};

/// Midpoint of cell j on a P-point grid.
inline double grid_theta(int j, int points) {
    return (static_cast<double>(j) + 0.5) / static_cast<double>(points);
}

/// Orthonormal synthesis/analysis pair between coefficients c_0..c_M and the
/// midpoint grid. The basis table is precomputed; reuse one instance across a
/// time-stepping loop.
class CosineTransform {
  public:
    CosineTransform(int modes, int points) : modes_(modes), points_(points) {
        if (modes < 0 || points < 1)
            throw std::invalid_argument("CosineTransform: bad sizes");
        if (points < modes + 1)
            throw std::invalid_argument("CosineTransform: need P >= M+1");
        basis_.resize(static_cast<std::size_t>(points) * (modes + 1));
        const double sqrt2 = std::numbers::sqrt2;
        for (int j = 0; j < points; ++j) {
            const double theta = grid_theta(j, points);
            double* row = &basis_[static_cast<std::size_t>(j) * (modes + 1)];
            row[0] = 1.0;
            for (int i = 1; i <= modes; ++i)
                row[i] = sqrt2 * std::cos(static_cast<double>(i) * std::numbers::pi * theta);
        }
    }

    int modes() const { return modes_; }
    int points() const { return points_; }

    void synthesize(const SpectralField& h, GridField& out) const {
        if (h.modes() != modes_)
            throw std::invalid_argument("synthesize: field truncation mismatch");
        out.values.assign(static_cast<std::size_t>(points_), 0.0);
        for (int j = 0; j < points_; ++j) {
            const double* row = &basis_[static_cast<std::size_t>(j) * (modes_ + 1)];
            double acc = 0.0;
            for (int i = 0; i <= modes_; ++i) acc += row[i] * h.coeffs[static_cast<std::size_t>(i)];
            out.values[static_cast<std::size_t>(j)] = acc;
        }
    }

    GridField synthesize(const SpectralField& h) const {
        GridField g(points_);
        synthesize(h, g);
        return g;
    }

    void analyze(const GridField& g, SpectralField& out) const {
        if (g.points() != points_)
            throw std::invalid_argument("analyze: grid size mismatch");
        out.coeffs.assign(static_cast<std::size_t>(modes_) + 1, 0.0);
        const double inv_p = 1.0 / static_cast<double>(points_);
        for (int j = 0; j < points_; ++j) {
            const double* row = &basis_[static_cast<std::size_t>(j) * (modes_ + 1)];
            const double v = g.values[static_cast<std::size_t>(j)] * inv_p;
            for (int i = 0; i <= modes_; ++i) out.coeffs[static_cast<std::size_t>(i)] += row[i] * v;
        }
    }

    SpectralField analyze(const GridField& g) const {
        SpectralField h(modes_);
        analyze(g, h);
        return h;
    }

  private:
    int modes_;
    int points_;
    std::vector<double> basis_;  // row j holds e_0(θ_j)..e_M(θ_j)
};

/// One-shot synthesis h(θ_j) on a P-point midpoint grid. Exact for
/// band-limited fields; requires P >= M+1.
inline GridField synthesize(const SpectralField& h, int points) {
    return CosineTransform(h.modes(), points).synthesize(h);
}

/// One-shot analysis to truncation M; inverse of synthesize for M <= P-1.
inline SpectralField analyze(const GridField& g, int modes) {
    return CosineTransform(modes, g.points()).analyze(g);
}

/// Synthesis at arbitrary locations (not restricted to the midpoint grid).
inline double synthesize_at(const SpectralField& h, double theta) {
    double acc = h.coeffs.empty() ? 0.0 : h.coeffs[0];
    const double sqrt2 = std::numbers::sqrt2;
    for (int i = 1; i <= h.modes(); ++i)
        acc += h.coeffs[static_cast<std::size_t>(i)] * sqrt2 *
               std::cos(static_cast<double>(i) * std::numbers::pi * theta);
    return acc;
}

/// Quadrature inner product (1/P) Σ u_j v_j over the midpoint grid.
inline double grid_inner(const GridField& u, const GridField& v) {
    if (u.points() != v.points())
        throw std::invalid_argument("grid_inner: size mismatch");
    double acc = 0.0;
    for (int j = 0; j < u.points(); ++j)
        acc += u.values[static_cast<std::size_t>(j)] * v.values[static_cast<std::size_t>(j)];
    return acc / static_cast<double>(u.points());
}

/// A h: mode i scaled by -a_i; the constant mode is annihilated.
inline SpectralField apply_A(const SpectralField& h) {
    SpectralField r = h;
    r.coeffs[0] = 0.0;
    for (int i = 1; i <= h.modes(); ++i)
        r.coeffs[static_cast<std::size_t>(i)] *= -eigenvalue(i);
    return r;
}

/// (-A)^γ h: mode i scaled by a_i^γ, mean unchanged.
inline SpectralField apply_A_power(const SpectralField& h, double gamma) {
    SpectralField r = h;
    for (int i = 1; i <= h.modes(); ++i)
        r.coeffs[static_cast<std::size_t>(i)] *= std::pow(eigenvalue(i), gamma);
    return r;
}

/// |h|_γ = (Σ_{i≥1} a_i^γ c_i²)^{1/2}; zero exactly for constant fields.
inline double seminorm(const SpectralField& h, double gamma) {
    double acc = 0.0;
    for (int i = 1; i <= h.modes(); ++i) {
        const double c = h.coeffs[static_cast<std::size_t>(i)];
        acc += std::pow(eigenvalue(i), gamma) * c * c;
    }
    return std::sqrt(acc);
}

/// ‖h‖_γ = (|h|_γ² + mean²)^{1/2}.
inline double graded_norm(const SpectralField& h, double gamma) {
    const double s = seminorm(h, gamma);
    const double m = h.mean();
    return std::sqrt(s * s + m * m);
}

/// Seminorm scalar product (h,g)_γ = Σ_{i≥1} a_i^γ h_i g_i.
inline double inner_product(const SpectralField& h, const SpectralField& g, double gamma) {
    if (h.coeffs.size() != g.coeffs.size())
        throw std::invalid_argument("inner_product: size mismatch");
    double acc = 0.0;
    for (int i = 1; i <= h.modes(); ++i)
        acc += std::pow(eigenvalue(i), gamma) * h.coeffs[static_cast<std::size_t>(i)] *
               g.coeffs[static_cast<std::size_t>(i)];
    return acc;
}

/// Triangular regularizer weight: w_i = (N-i+1)/N for i <= N, else 0.
/// Note w_0 = (N+1)/N, slightly above one; the literal 1/N prefactor is kept.
inline double regularizer_weight(int i, int order) {
    if (order < 1) throw std::invalid_argument("regularizer_weight: order must be >= 1");
    if (i < 0) throw std::invalid_argument("regularizer_weight: mode must be >= 0");
    if (i > order) return 0.0;
    return static_cast<double>(order - i + 1) / static_cast<double>(order);
}

/// Q_N h — diagonal triangular cutoff; self-adjoint in every V_γ and
/// commuting with A.
inline SpectralField regularize(const SpectralField& h, int order) {
    SpectralField r = h;
    for (int i = 0; i <= h.modes(); ++i)
        r.coeffs[static_cast<std::size_t>(i)] *= regularizer_weight(i, order);
    return r;
}

/// e^{-tA²/2} h: mode i damped by exp(-a_i² t/2); contraction on the
/// mean-zero part, identity at t = 0.
inline SpectralField heat_semigroup(const SpectralField& h, double t) {
    if (t < 0.0) throw std::invalid_argument("heat_semigroup: t must be >= 0");
    SpectralField r = h;
    for (int i = 1; i <= h.modes(); ++i) {
        const double a = eigenvalue(i);
        r.coeffs[static_cast<std::size_t>(i)] *= std::exp(-a * a * t * 0.5);
    }
    return r;
}

/// s_M(t) = Σ_{i=1}^M a_i exp(-a_i² t/2), the mode sum behind the
/// C t^{-1/2} bound for A e^{-tA²/2} on continuous functions.
inline double smoothing_sum(double t, int modes) {
    if (t <= 0.0) throw std::invalid_argument("smoothing_sum: t must be > 0");
    double acc = 0.0;
    for (int i = 1; i <= modes; ++i) {
        const double a = eigenvalue(i);
        acc += a * std::exp(-a * a * t * 0.5);
    }
    return acc;
}

}  // namespace chcook
