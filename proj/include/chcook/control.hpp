// control.hpp — steering construction between two admissible profiles.
//
// For smooth band-limited x, y with equal means and sup norms below 1-δ, the
// straight-line path u(t) = (t/T) y + (1-t/T) x solves
//
//   du/dt = -½ A (A u + f(u)) + B g₀,
//   g₀(θ,t) = ∫_0^θ [ (1/T)(y-x) + ½ A (A u + f(u)) ](ϑ,t) dϑ,
//
// so forcing the dynamics with B g₀ drives the deterministic flow from x to y
// in time T. The integrand has zero spatial mean, hence g₀ vanishes at both
// endpoints and lies in the domain of B. Everything is assembled spectrally:
// the primitive of e_i is √2 sin(iπθ)/(iπ), and B g₀ recovers exactly the
// truncated integrand, so the defining identity can be checked against a
// finer evaluation as a pure truncation residual.

#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "chcook/dynamics.hpp"
#include "chcook/potential.hpp"
#include "chcook/spectral.hpp"

namespace chcook {

class ControlOutOfRange : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

class ControlField {
  public:
    /// points fixes the evaluation grid; the assembled integrand keeps
    /// points/2 - 1 modes (dealiasing rule).
    ControlField(const SpectralField& x, const SpectralField& y, double horizon, int points,
                 const PotentialSpec& pot)
        : horizon_(horizon), pot_(pot), out_modes_(points / 2 - 1),
          path_transform_(std::max(x.modes(), y.modes()), points),
          out_transform_(out_modes_, points) {
        if (horizon <= 0.0) throw std::invalid_argument("ControlField: horizon must be > 0");
        if (std::abs(x.mean() - y.mean()) > 1e-12)
            throw std::invalid_argument("ControlField: endpoint means differ");
        if (out_modes_ < std::max(x.modes(), y.modes()))
            throw std::invalid_argument("ControlField: grid too coarse for the endpoints");
        x_ = pad(x, path_transform_.modes());
        y_ = pad(y, path_transform_.modes());
        const double window = 1.0 - pot.delta;
        check_sup(x_, window, "x");
        check_sup(y_, window, "y");
    }

    double horizon() const { return horizon_; }
    int modes() const { return out_modes_; }
    int points() const { return out_transform_.points(); }

    /// u(t) on the path truncation.
    SpectralField path_state(double t) const {
        const double s = t / horizon_;
        SpectralField u(path_transform_.modes());
        for (int i = 0; i <= u.modes(); ++i) u[i] = s * y_[i] + (1.0 - s) * x_[i];
        return u;
    }

    /// Coefficients of B g₀(·,t) = (1/T)(y-x) + ½ A (A u + f(u)), truncated
    /// to the output band. The mean component is zero identically.
    SpectralField integrand_coeffs(double t) const {
        const SpectralField u = path_state(t);
        GridField ug = path_transform_.synthesize(u);
        GridField fg(ug.points());
        for (int j = 0; j < ug.points(); ++j) fg[j] = f_log(ug[j], pot_);
        SpectralField fhat = out_transform_.analyze(fg);
        SpectralField g(out_modes_);
        for (int i = 1; i <= out_modes_; ++i) {
            const double a = eigenvalue(i);
            const double ui = i <= u.modes() ? u[i] : 0.0;
            const double xi = i <= x_.modes() ? (y_[i] - x_[i]) / horizon_ : 0.0;
            g[i] = xi + 0.5 * a * a * ui - 0.5 * a * fhat[i];
        }
        return g;
    }

    /// g₀(θ,t) itself, from the mode-wise primitive.
    double g0_at(double theta, double t) const {
        const SpectralField g = integrand_coeffs(t);
        double acc = 0.0;
        const double sqrt2 = std::numbers::sqrt2;
        for (int i = 1; i <= g.modes(); ++i) {
            const double w = static_cast<double>(i) * std::numbers::pi;
            acc += g[i] * sqrt2 * std::sin(w * theta) / w;
        }
        return acc;
    }

    GridField g0_grid(double t, int points) const {
        GridField out(points);
        const SpectralField g = integrand_coeffs(t);
        const double sqrt2 = std::numbers::sqrt2;
        for (int j = 0; j < points; ++j) {
            const double theta = grid_theta(j, points);
            double acc = 0.0;
            for (int i = 1; i <= g.modes(); ++i) {
                const double w = static_cast<double>(i) * std::numbers::pi;
                acc += g[i] * sqrt2 * std::sin(w * theta) / w;
            }
            out[j] = acc;
        }
        return out;
    }

  private:
    static SpectralField pad(const SpectralField& h, int modes) {
        SpectralField r(modes);
        for (int i = 0; i <= h.modes(); ++i) r[i] = h[i];
        return r;
    }

    static void check_sup(const SpectralField& h, double window, const char* name) {
        const int probe = 32 * (h.modes() + 1);
        for (int j = 0; j < probe; ++j) {
            if (std::abs(synthesize_at(h, grid_theta(j, probe))) > window)
                throw ControlOutOfRange(std::string("ControlField: sup|") + name +
                                        "| exceeds 1-delta");
        }
    }

    double horizon_;
    PotentialSpec pot_;
    int out_modes_;
    SpectralField x_, y_;
    CosineTransform path_transform_;
    CosineTransform out_transform_;
};

struct ControlResidual {
    int points = 0;
    double max_abs = 0.0;
    double l2 = 0.0;
};

/// ‖du/dt + ½A(Au + f(u)) - B g₀‖ of the coarse construction measured on the
/// reference grid, at a handful of path times. Decays at the spectral rate of
/// f(u)'s cosine coefficients as the coarse grid is refined.
inline ControlResidual control_residual(const ControlField& coarse, const ControlField& reference,
                                        int time_probes = 5) {
    ControlResidual r;
    r.points = coarse.points();
    const int pref = reference.points();
    for (int q = 0; q < time_probes; ++q) {
        const double t = reference.horizon() * static_cast<double>(q) /
                         static_cast<double>(std::max(1, time_probes - 1));
        const SpectralField g_ref = reference.integrand_coeffs(t);
        const SpectralField g_coarse = coarse.integrand_coeffs(t);
        double sum_sq = 0.0;
        for (int j = 0; j < pref; ++j) {
            const double theta = grid_theta(j, pref);
            const double d = synthesize_at(g_ref, theta) - synthesize_at(g_coarse, theta);
            r.max_abs = std::max(r.max_abs, std::abs(d));
            sum_sq += d * d;
        }
        r.l2 = std::max(r.l2, std::sqrt(sum_sq / pref));
    }
    return r;
}

struct SteeringOutcome {
    double noise_scale = 0.0;
    double hit_fraction = 0.0;   // runs staying within the δ/2 tube around u
    double mean_final_gap = 0.0; // mean |X(T) - y|_{-1}
};

/// Simulates the controlled dynamics (drift f_δ, forcing B g₀, scaled noise)
/// and reports how often the path stays in the uniform δ/2 tube around u.
inline SteeringOutcome steer_once_ensemble(const ControlField& control, const SpectralField& x,
                                           const SpectralField& y, SolverConfig cfg,
                                           double noise_scale, std::size_t runs,
                                           NoiseStream base) {
    cfg.drift = DriftKind::lipschitz_log;
    cfg.noise_scale = noise_scale;
    cfg.horizon = control.horizon();
    cfg.burn_in = 0.0;
    cfg.validate();
    if (cfg.modes != control.modes())
        throw std::invalid_argument("steer: config truncation must match the control band");
    Stepper stepper(cfg);
    CosineTransform probe(cfg.modes, cfg.points);
    const double tube = 0.5 * cfg.pot.delta;
    const auto steps = static_cast<std::size_t>(std::llround(cfg.horizon / cfg.dt));

    SteeringOutcome out;
    out.noise_scale = noise_scale;
    std::size_t hits = 0;
    double gap_acc = 0.0;
    SpectralField x0(cfg.modes);
    for (int i = 0; i <= std::min(x.modes(), cfg.modes); ++i) x0[i] = x[i];
    SpectralField y_pad(cfg.modes);
    for (int i = 0; i <= std::min(y.modes(), cfg.modes); ++i) y_pad[i] = y[i];

    for (std::size_t r = 0; r < runs; ++r) {
        NoiseStream stream{base.seed, base.stream + r, 0};
        SpectralField state = x0;
        bool inside = true;
        for (std::size_t k = 0; k < steps; ++k) {
            const double t = static_cast<double>(k) * cfg.dt;
            const SpectralField forcing = control.integrand_coeffs(t);
            const SpectralField xi = stepper.draw_noise(stream);
            state = stepper.apply(state, xi, &forcing);
            if (!state.finite()) throw NumericalBlowup(k, TrajectoryDiagnostics{});
            if (inside) {
                const SpectralField u = control.path_state(t + cfg.dt);
                const GridField sg = probe.synthesize(state);
                for (int j = 0; j < cfg.points; ++j) {
                    const double uu = synthesize_at(u, grid_theta(j, cfg.points));
                    if (std::abs(sg[j] - uu) > tube) {
                        inside = false;
                        break;
                    }
                }
            }
        }
        if (inside) ++hits;
        gap_acc += seminorm(state - y_pad, -1.0);
    }
    out.hit_fraction = static_cast<double>(hits) / static_cast<double>(runs);
    out.mean_final_gap = gap_acc / static_cast<double>(runs);
    return out;
}

}  // namespace chcook
