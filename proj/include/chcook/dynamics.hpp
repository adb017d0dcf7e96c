// dynamics.hpp — mild-form exponential Euler integration of
//
//   dX + ½(A²X + A f_n(X)) dt = B dW,      mean(X) conserved.
//
// Per mode the update is exact on the linear part and uses the closed-form
// integrating factor on the drift:
//
//   c_i⁺ = e^{-a_i²dt/2} c_i + κ_i f̂_i + φ_i b_i + σ_i ζ_i,
//   κ_i = (1-e^{-a_i²dt/2})/a_i,   φ_i = 2κ_i/a_i,   σ_i² = (1-e^{-a_i²dt})/a_i,
//
// where f̂ is the analyzed pointwise drift, b an optional additive forcing,
// and ζ iid standard normals. The mean mode is never touched: the drift is
// annihilated by A there and the noise carries no constant component, so the
// average is conserved exactly, not merely to discretization order.
//
// The drift is explicit; a step-size guard flags configurations where
// dt · sup|f_n'| · a_M exceeds the configured margin. The state may leave
// [-1,1] transiently — the polynomial system lives on all of ℝ and the
// excursion size is a tracked diagnostic, not an error.

#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "chcook/gaussian.hpp"
#include "chcook/potential.hpp"
#include "chcook/rng.hpp"
#include "chcook/spectral.hpp"

namespace chcook {

enum class DriftKind { polynomial, lipschitz_log, none };

struct SolverConfig {
    int modes = 16;   // M
    int points = 64;  // P, dealiasing rule P >= 2(M+1)
    double dt = 1e-4;
    double horizon = 1.0;
    double burn_in = 0.0;
    PotentialSpec pot{};
    double mean_c = 0.0;
    DriftKind drift = DriftKind::polynomial;
    double noise_scale = 1.0;
    std::uint64_t master_seed = 1;
    double stability_margin = 1.0;
    double stability_xmax = 1.0;

    void validate() const {
        if (modes < 1) throw std::invalid_argument("SolverConfig: modes must be >= 1");
        if (points < 2 * (modes + 1))
            throw std::invalid_argument("SolverConfig: P >= 2*(M+1) violated");
        if (!(dt > 0.0)) throw std::invalid_argument("SolverConfig: dt must be > 0");
        if (horizon < 0.0) throw std::invalid_argument("SolverConfig: horizon must be >= 0");
        if (burn_in < 0.0) throw std::invalid_argument("SolverConfig: burn_in must be >= 0");
        if (noise_scale < 0.0) throw std::invalid_argument("SolverConfig: noise_scale must be >= 0");
        pot.validate();
    }

    /// sup_{|x| <= xmax} |f_n'(x)|; the derivative is monotone in x², so the
    /// extremes sit at 0 and ±xmax.
    double drift_derivative_sup() const {
        double s = 0.0, p = 1.0;
        for (int k = 0; k <= pot.n; ++k) {
            s += p;
            p *= stability_xmax * stability_xmax;
        }
        return std::max(std::abs(pot.lambda - 2.0 * s), std::abs(pot.lambda - 2.0));
    }

    std::vector<std::string> warnings() const {
        std::vector<std::string> w;
        if (drift == DriftKind::polynomial) {
            const double guard = dt * drift_derivative_sup() * eigenvalue(modes);
            if (guard > stability_margin)
                w.push_back("step-size guard: dt*sup|f_n'|*a_M = " + std::to_string(guard) +
                            " exceeds margin " + std::to_string(stability_margin));
        }
        return w;
    }
};

struct TrajectoryDiagnostics {
    std::vector<double> times;
    double mean_drift = 0.0;  // max |mean(X) - c|
    double overshoot = 0.0;   // max (|X|-1)_+ over evaluated grids
    double drift_l1 = 0.0;    // running ∫∫ |f_n(X)| dθ dt
    std::vector<double> energy_residuals;
    std::vector<std::string> warnings;
    std::size_t steps = 0;
};

class NumericalBlowup : public std::runtime_error {
  public:
    NumericalBlowup(std::size_t step, TrajectoryDiagnostics diag)
        : std::runtime_error("non-finite state at step " + std::to_string(step)),
          step_index(step),
          diagnostics(std::move(diag)) {}
    std::size_t step_index;
    TrajectoryDiagnostics diagnostics;
};

/// Recorded path: states at a fixed cadence and, optionally, the per-step
/// stochastic-convolution increments actually consumed.
struct Trajectory {
    double dt = 0.0;
    double mean_c = 0.0;
    std::vector<double> times;
    std::vector<SpectralField> states;
    std::vector<SpectralField> noises;  // noises[k] drives states k -> k+1 (cadence 1 only)
};

/// Precomputed per-mode tables for one (M, P, dt, potential) combination.
/// Holds scratch buffers; use one instance per thread.
class Stepper {
  public:
    explicit Stepper(const SolverConfig& cfg)
        : cfg_(cfg), transform_(cfg.modes, cfg.points), grid_(cfg.points), fgrid_(cfg.points),
          fhat_(cfg.modes) {
        cfg_.validate();
        const int m = cfg_.modes;
        decay_.assign(m + 1, 1.0);
        drift_gain_.assign(m + 1, 0.0);
        forcing_gain_.assign(m + 1, cfg_.dt);
        noise_std_.assign(m + 1, 0.0);
        for (int i = 1; i <= m; ++i) {
            const double a = eigenvalue(i);
            const double e = -std::expm1(-a * a * cfg_.dt * 0.5);  // 1 - e^{-a² dt/2}
            decay_[i] = 1.0 - e;
            drift_gain_[i] = e / a;
            forcing_gain_[i] = 2.0 * e / (a * a);
            noise_std_[i] = cfg_.noise_scale * std::sqrt(convolution_variance(i, cfg_.dt));
        }
    }

    const SolverConfig& config() const { return cfg_; }
    const CosineTransform& transform() const { return transform_; }

    /// Scaled convolution increment for one step (all zeros when the noise is off).
    SpectralField draw_noise(NoiseStream& stream) {
        SpectralField xi(cfg_.modes);
        if (cfg_.noise_scale == 0.0) return xi;
        std::vector<double> z = stream.normals(static_cast<std::size_t>(cfg_.modes));
        for (int i = 1; i <= cfg_.modes; ++i)
            xi[i] = noise_std_[i] * z[static_cast<std::size_t>(i - 1)];
        return xi;
    }

    /// One update with a caller-supplied noise field (shared-noise coupling)
    /// and optional additive forcing coefficients.
    SpectralField apply(const SpectralField& x, const SpectralField& noise,
                        const SpectralField* forcing = nullptr) {
        SpectralField y(cfg_.modes);
        y[0] = x[0];
        const bool has_drift = cfg_.drift != DriftKind::none;
        if (has_drift) {
            transform_.synthesize(x, grid_);
            double l1 = 0.0, over = 0.0;
            for (int j = 0; j < cfg_.points; ++j) {
                const double v = grid_[j];
                const double fv = cfg_.drift == DriftKind::polynomial ? f_n(v, cfg_.pot)
                                                                      : f_lip(v, cfg_.pot);
                fgrid_[j] = fv;
                l1 += std::abs(fv);
                const double exc = std::abs(v) - 1.0;
                if (exc > over) over = exc;
            }
            last_drift_l1_ = l1 / static_cast<double>(cfg_.points);
            last_overshoot_ = over;
            transform_.analyze(fgrid_, fhat_);
        } else {
            last_drift_l1_ = 0.0;
            last_overshoot_ = 0.0;
        }
        for (int i = 1; i <= cfg_.modes; ++i) {
            double v = decay_[i] * x[i] + noise[i];
            if (has_drift) v += drift_gain_[i] * fhat_[i];
            if (forcing) v += forcing_gain_[i] * (*forcing)[i];
            y[i] = v;
        }
        return y;
    }

    SpectralField step(const SpectralField& x, NoiseStream& stream) {
        const SpectralField xi = draw_noise(stream);
        return apply(x, xi);
    }

    /// Drift L¹ mass ∫|f_n(X)| dθ and overshoot of the state last passed to apply().
    double last_drift_l1() const { return last_drift_l1_; }
    double last_overshoot() const { return last_overshoot_; }

  private:
    SolverConfig cfg_;
    CosineTransform transform_;
    std::vector<double> decay_, drift_gain_, forcing_gain_, noise_std_;
    GridField grid_, fgrid_;
    SpectralField fhat_;
    double last_drift_l1_ = 0.0;
    double last_overshoot_ = 0.0;
};

/// One-shot step with a fresh table set; prefer a Stepper in loops.
inline SpectralField step(const SpectralField& x, const SolverConfig& cfg, NoiseStream& stream) {
    Stepper s(cfg);
    return s.step(x, stream);
}

struct RecordOptions {
    int every = 0;           // snapshot cadence in steps; 0 = final state only
    bool with_noise = false; // keep per-step increments (forces cadence 1)
};

struct SimulationResult {
    SpectralField final_state;
    TrajectoryDiagnostics diagnostics;
    Trajectory trajectory;
};

/// Integrate burn-in plus horizon from x. Records snapshots at the requested
/// cadence over the horizon window (time restarts at zero after burn-in).
inline SimulationResult simulate(const SpectralField& x, const SolverConfig& cfg,
                                 NoiseStream& stream, RecordOptions record = {}) {
    cfg.validate();
    if (x.modes() != cfg.modes)
        throw std::invalid_argument("simulate: initial truncation differs from config");
    Stepper stepper(cfg);
    SimulationResult out;
    out.diagnostics.warnings = cfg.warnings();
    out.trajectory.dt = cfg.dt;
    out.trajectory.mean_c = cfg.mean_c;
    const int every = record.with_noise ? 1 : record.every;

    SpectralField state = x;
    const auto burn_steps = static_cast<std::size_t>(std::llround(cfg.burn_in / cfg.dt));
    const auto main_steps = static_cast<std::size_t>(std::llround(cfg.horizon / cfg.dt));

    auto advance = [&](std::size_t k, bool recording) {
        const SpectralField xi = stepper.draw_noise(stream);
        SpectralField next = stepper.apply(state, xi);
        if (!next.finite()) throw NumericalBlowup(k, out.diagnostics);
        out.diagnostics.drift_l1 += cfg.dt * stepper.last_drift_l1();
        if (stepper.last_overshoot() > out.diagnostics.overshoot)
            out.diagnostics.overshoot = stepper.last_overshoot();
        const double md = std::abs(next.mean() - cfg.mean_c);
        if (md > out.diagnostics.mean_drift) out.diagnostics.mean_drift = md;
        if (recording && record.with_noise) out.trajectory.noises.push_back(xi);
        state = std::move(next);
        ++out.diagnostics.steps;
    };

    for (std::size_t k = 0; k < burn_steps; ++k) advance(k, false);

    if (every > 0) {
        out.trajectory.times.push_back(0.0);
        out.trajectory.states.push_back(state);
    }
    for (std::size_t k = 0; k < main_steps; ++k) {
        advance(burn_steps + k, true);
        if (every > 0 && ((k + 1) % static_cast<std::size_t>(every) == 0 || k + 1 == main_steps)) {
            out.trajectory.times.push_back(static_cast<double>(k + 1) * cfg.dt);
            out.trajectory.states.push_back(state);
        }
        out.diagnostics.times.push_back(static_cast<double>(k + 1) * cfg.dt);
    }
    out.final_state = std::move(state);
    return out;
}

struct PairResult {
    SpectralField final_first;
    SpectralField final_second;
    std::vector<double> times;
    std::vector<double> distances;  // |X(t,x) - X(t,y)|_{-1}, including t = 0
};

/// Two trajectories from x and y under shared or independent noise; the
/// second stream is derived from the first when independence is requested.
inline PairResult simulate_pair(const SpectralField& x, const SpectralField& y,
                                const SolverConfig& cfg, NoiseStream& stream,
                                bool shared_noise) {
    cfg.validate();
    if (std::abs(x.mean() - y.mean()) > 1e-12)
        throw std::invalid_argument("simulate_pair: initial means differ");
    Stepper stepper_x(cfg);
    Stepper stepper_y(cfg);
    NoiseStream second{stream.seed, stream.stream ^ (std::uint64_t{1} << 63), 0};

    PairResult out;
    SpectralField a = x, b = y;
    const auto steps = static_cast<std::size_t>(std::llround(cfg.horizon / cfg.dt));
    out.times.push_back(0.0);
    out.distances.push_back(seminorm(a - b, -1.0));
    for (std::size_t k = 0; k < steps; ++k) {
        const SpectralField xi = stepper_x.draw_noise(stream);
        const SpectralField eta = shared_noise ? xi : stepper_y.draw_noise(second);
        SpectralField an = stepper_x.apply(a, xi);
        SpectralField bn = stepper_y.apply(b, eta);
        if (!an.finite() || !bn.finite()) throw NumericalBlowup(k, TrajectoryDiagnostics{});
        a = std::move(an);
        b = std::move(bn);
        out.times.push_back(static_cast<double>(k + 1) * cfg.dt);
        out.distances.push_back(seminorm(a - b, -1.0));
    }
    out.final_first = std::move(a);
    out.final_second = std::move(b);
    return out;
}

/// Itô correction rate of the regularized energy: Tr_N = Σ_{i=1}^N w_i².
inline double regularized_trace(int order) {
    double acc = 0.0;
    for (int i = 1; i <= order; ++i) {
        const double w = regularizer_weight(i, order);
        acc += w * w;
    }
    return acc;
}

struct EnergyBreakdown {
    double delta_q = 0.0;       // |Q_N X(T)|²_{-1} - |Q_N X(0)|²_{-1}
    double grad_term = 0.0;     // ∫ |Q_N X|²_1 dt (trapezoid)
    double drift_term = 0.0;    // ∫ Σ w_i² f̂_i X_i dt (left point)
    double martingale = 0.0;    // 2 Σ (Q_N X_k, Q_N ξ_k)_{-1}
    double correction = 0.0;    // window length · Tr_N
    double residual() const {
        return delta_q + grad_term - drift_term - martingale - correction;
    }
};

/// Discrete balance of d|Q_N X|²_{-1} along a fully recorded trajectory.
/// Differentiating through Q_N puts the squared weights w_i² on the gradient,
/// drift, martingale and trace terms alike; the trace per unit time is Tr_N.
/// Returns one breakdown per window of window_steps steps (0 = single window).
inline std::vector<EnergyBreakdown> energy_check(const Trajectory& traj, const SolverConfig& cfg,
                                                 int reg_order, std::size_t window_steps = 0) {
    if (traj.states.size() < 2 || traj.noises.size() + 1 != traj.states.size())
        throw std::invalid_argument("energy_check: need cadence-1 states with noise increments");
    if (reg_order < 1) throw std::invalid_argument("energy_check: reg_order must be >= 1");
    const int m = cfg.modes;
    const int nw = std::min(reg_order, m);
    CosineTransform transform(cfg.modes, cfg.points);
    GridField grid(cfg.points), fgrid(cfg.points);
    SpectralField fhat(cfg.modes);

    std::vector<double> w2(static_cast<std::size_t>(nw) + 1, 0.0);
    for (int i = 1; i <= nw; ++i) {
        const double w = regularizer_weight(i, reg_order);
        w2[static_cast<std::size_t>(i)] = w * w;
    }
    const double trace = regularized_trace(reg_order);

    auto q_norm_sq = [&](const SpectralField& h, double gamma) {
        double acc = 0.0;
        for (int i = 1; i <= nw; ++i)
            acc += w2[static_cast<std::size_t>(i)] * std::pow(eigenvalue(i), gamma) * h[i] * h[i];
        return acc;
    };

    const std::size_t steps = traj.noises.size();
    const std::size_t win = window_steps == 0 ? steps : window_steps;
    std::vector<EnergyBreakdown> out;
    EnergyBreakdown acc;
    std::size_t start = 0;
    for (std::size_t k = 0; k < steps; ++k) {
        const SpectralField& xk = traj.states[k];
        const SpectralField& xk1 = traj.states[k + 1];
        acc.grad_term += 0.5 * cfg.dt * (q_norm_sq(xk, 1.0) + q_norm_sq(xk1, 1.0));
        if (cfg.drift == DriftKind::polynomial) {
            transform.synthesize(xk, grid);
            for (int j = 0; j < cfg.points; ++j) fgrid[j] = f_n(grid[j], cfg.pot);
            transform.analyze(fgrid, fhat);
            double d = 0.0;
            for (int i = 1; i <= nw; ++i) d += w2[static_cast<std::size_t>(i)] * fhat[i] * xk[i];
            acc.drift_term += cfg.dt * d;
        }
        double mart = 0.0;
        for (int i = 1; i <= nw; ++i)
            mart += w2[static_cast<std::size_t>(i)] / eigenvalue(i) * xk[i] * traj.noises[k][i];
        acc.martingale += 2.0 * mart;
        if (k + 1 - start == win || k + 1 == steps) {
            acc.delta_q = q_norm_sq(xk1, -1.0) - q_norm_sq(traj.states[start], -1.0);
            // the quadratic-variation rate scales with the noise variance
            acc.correction = static_cast<double>(k + 1 - start) * cfg.dt * trace *
                             cfg.noise_scale * cfg.noise_scale;
            out.push_back(acc);
            acc = EnergyBreakdown{};
            start = k + 1;
        }
    }
    return out;
}

/// ∫∫ |f_n(X(t,θ))| dθ dt over a recorded trajectory, by midpoint quadrature
/// in space and left-point rule in time.
inline double drift_l1_mass(const Trajectory& traj, const SolverConfig& cfg) {
    if (traj.states.empty()) return 0.0;
    if (cfg.drift == DriftKind::none) return 0.0;
    CosineTransform transform(cfg.modes, cfg.points);
    GridField grid(cfg.points);
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < traj.states.size(); ++k) {
        transform.synthesize(traj.states[k], grid);
        double l1 = 0.0;
        for (int j = 0; j < cfg.points; ++j)
            l1 += std::abs(cfg.drift == DriftKind::polynomial ? f_n(grid[j], cfg.pot)
                                                              : f_lip(grid[j], cfg.pot));
        acc += (traj.times[k + 1] - traj.times[k]) * l1 / static_cast<double>(cfg.points);
    }
    return acc;
}

}  // namespace chcook
