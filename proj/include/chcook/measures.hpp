// measures.hpp — Gibbs measures over the Gaussian reference and their
// self-normalized importance-sampling estimators.
//
// The target laws are absolutely continuous with respect to the exactly
// samplable Gaussian μ_c:
//
//   ν_n  ∝ exp(-U_n(x)) μ_c(dx),
//   ν    ∝ exp(-U(x)) 1_{x ∈ K} μ_c(dx),   K = {‖x‖_∞ <= 1},
//
// so an ensemble drawn from μ_c with log-weights -U_n (or -U with a -∞
// sentinel outside K) estimates any bounded observable. Membership in K is
// decided on the evaluation grid. The normalization constant is the plain
// Monte Carlo mean of the weights, computed in log-sum-exp form.

#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "chcook/gaussian.hpp"
#include "chcook/parallel.hpp"
#include "chcook/potential.hpp"
#include "chcook/rng.hpp"
#include "chcook/spectral.hpp"

namespace chcook {

class DegenerateEnsemble : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class MeasureKind { mu_c, nu_n, nu_limit };

struct MeasureSample {
    std::vector<SpectralField> fields;
    std::vector<double> log_weights;  // -∞ marks members outside K
    MeasureKind kind = MeasureKind::mu_c;
    int points = 0;
    double mean_c = 0.0;
    PotentialSpec pot{};

    std::size_t size() const { return fields.size(); }

    /// Effective sample size (Σw)²/Σw² of the normalized weights.
    double ess() const {
        double max_lw = -std::numeric_limits<double>::infinity();
        for (double lw : log_weights)
            if (lw > max_lw) max_lw = lw;
        if (!std::isfinite(max_lw)) return 0.0;
        double s1 = 0.0, s2 = 0.0;
        for (double lw : log_weights) {
            if (!std::isfinite(lw)) continue;
            const double w = std::exp(lw - max_lw);
            s1 += w;
            s2 += w * w;
        }
        return s2 > 0.0 ? s1 * s1 / s2 : 0.0;
    }
};

/// Below this ESS fraction the self-normalized estimator is considered
/// weight-degenerate; drivers surface a warning.
inline constexpr double kEssWarnFraction = 0.02;

/// Log-weight of one field under the requested target.
inline double measure_log_weight(const GridField& g, const PotentialSpec& pot, MeasureKind kind) {
    switch (kind) {
        case MeasureKind::mu_c:
            return 0.0;
        case MeasureKind::nu_n:
            return -potential_u(g, pot, PotentialKind::polynomial);
        case MeasureKind::nu_limit: {
            const double u = potential_u(g, pot, PotentialKind::log_singular);
            return std::isfinite(u) ? -u : -std::numeric_limits<double>::infinity();
        }
    }
    return 0.0;
}

/// Weighted ensemble for μ_c, ν_n or the singular limit, drawn from μ_c.
/// Member i consumes its own substream, so the ensemble is reproducible and
/// order-independent for any worker count.
inline MeasureSample importance_sample(const NoiseStream& base, double c, int modes, int points,
                                       const PotentialSpec& pot, MeasureKind kind,
                                       std::size_t count, unsigned threads = 1) {
    if (count < 1) throw std::invalid_argument("importance_sample: count must be >= 1");
    pot.validate();
    MeasureSample out;
    out.fields.resize(count);
    out.log_weights.resize(count);
    out.kind = kind;
    out.points = points;
    out.mean_c = c;
    out.pot = pot;
    parallel_for_index(count, threads, [&](std::size_t i) {
        NoiseStream stream{base.seed, base.stream + i, 0};
        CosineTransform transform(modes, points);
        out.fields[i] = sample_mu_c(stream, c, modes);
        out.log_weights[i] = measure_log_weight(transform.synthesize(out.fields[i]), pot, kind);
    });
    return out;
}

/// Observable ψ evaluated from both representations of a member.
struct Observable {
    std::string id;
    std::function<double(const SpectralField&, const GridField&)> eval;
    double sup_norm = std::numeric_limits<double>::infinity();
    double lip_neg1 = std::numeric_limits<double>::infinity();  // Lipschitz norm in |·|_{-1}
};

/// Named test functions shared by the samplers, the dynamics cross-checks and
/// the semigroup experiments. Bounded ones carry their sup norm; the mode-1
/// functionals also carry a Lipschitz constant in the |·|_{-1} metric
/// (|c_1 - c_1'| <= sqrt(a_1) |x - x'|_{-1}).
inline Observable observable_by_id(const std::string& id) {
    const double sqrt_a1 = std::numbers::pi;
    if (id == "one")
        return {id, [](const SpectralField&, const GridField&) { return 1.0; }, 1.0, 0.0};
    if (id == "mean")
        return {id, [](const SpectralField& h, const GridField&) { return h.mean(); }};
    if (id == "mode1")
        return {id, [](const SpectralField& h, const GridField&) { return h[1]; }};
    if (id == "neg1_sq")
        return {id, [](const SpectralField& h, const GridField&) {
                    const double s = seminorm(h, -1.0);
                    return s * s;
                }};
    if (id == "l2_sq")
        return {id, [](const SpectralField&, const GridField& g) { return grid_inner(g, g); }};
    if (id == "exceedance")
        return {id,
                [](const SpectralField&, const GridField& g) {
                    int hits = 0;
                    for (int j = 0; j < g.points(); ++j)
                        if (std::abs(g[j]) > 1.0) ++hits;
                    return static_cast<double>(hits) / static_cast<double>(g.points());
                },
                1.0};
    if (id == "tanh_neg1_sq")
        return {id, [](const SpectralField& h, const GridField&) {
                    const double s = seminorm(h, -1.0);
                    return std::tanh(s * s);
                },
                1.0};
    if (id == "tanh_l2_sq")
        return {id, [](const SpectralField&, const GridField& g) {
                    return std::tanh(grid_inner(g, g));
                },
                1.0};
    if (id == "tanh2_mode1")
        return {id, [](const SpectralField& h, const GridField&) { return std::tanh(2.0 * h[1]); },
                1.0, 2.0 * sqrt_a1};
    if (id == "cos3_mode1")
        return {id, [](const SpectralField& h, const GridField&) { return std::cos(3.0 * h[1]); },
                1.0, 3.0 * sqrt_a1};
    throw std::invalid_argument("unknown observable '" + id + "'");
}

struct Estimate {
    double value = 0.0;
    double se = 0.0;
};

/// Self-normalized estimate Σ w_i ψ(x_i) / Σ w_i with a delta-method
/// standard error. Throws DegenerateEnsemble when every weight vanishes.
inline Estimate expectation(const MeasureSample& sample, const Observable& psi) {
    if (sample.size() == 0) throw std::invalid_argument("expectation: empty ensemble");
    double max_lw = -std::numeric_limits<double>::infinity();
    for (double lw : sample.log_weights)
        if (lw > max_lw) max_lw = lw;
    if (!std::isfinite(max_lw)) throw DegenerateEnsemble("expectation: all weights are zero");

    CosineTransform transform(sample.fields.front().modes(), sample.points);
    GridField grid(sample.points);
    std::vector<double> w(sample.size(), 0.0), psi_vals(sample.size(), 0.0);
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double lw = sample.log_weights[i];
        if (std::isfinite(lw)) {
            w[i] = std::exp(lw - max_lw);
            transform.synthesize(sample.fields[i], grid);
            psi_vals[i] = psi.eval(sample.fields[i], grid);
        }
    }
    // numerator and denominator accumulate in the same order, so a constant
    // observable normalizes to exactly one
    double num = 0.0, wsum = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        num += w[i] * psi_vals[i];
        wsum += w[i];
    }
    Estimate est;
    est.value = num / wsum;
    double var = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double d = psi_vals[i] - est.value;
        const double wn = w[i] / wsum;
        var += wn * wn * d * d;
    }
    est.se = std::sqrt(var);
    return est;
}

/// log Z = log((1/count) Σ e^{log w_i}), stable in log-sum-exp form; members
/// outside K contribute zero mass.
inline double estimate_log_z(const MeasureSample& sample) {
    if (sample.size() < 2) throw std::invalid_argument("estimate_log_z: need count >= 2");
    double max_lw = -std::numeric_limits<double>::infinity();
    for (double lw : sample.log_weights)
        if (lw > max_lw) max_lw = lw;
    if (!std::isfinite(max_lw)) return -std::numeric_limits<double>::infinity();
    double acc = 0.0;
    for (double lw : sample.log_weights)
        if (std::isfinite(lw)) acc += std::exp(lw - max_lw);
    return max_lw + std::log(acc / static_cast<double>(sample.size()));
}

/// ψ evaluated on every member of an ensemble of fields.
inline std::vector<double> observable_values(const std::vector<SpectralField>& fields, int points,
                                             const Observable& psi) {
    if (fields.empty()) return {};
    CosineTransform transform(fields.front().modes(), points);
    GridField grid(points);
    std::vector<double> out(fields.size());
    for (std::size_t i = 0; i < fields.size(); ++i) {
        transform.synthesize(fields[i], grid);
        out[i] = psi.eval(fields[i], grid);
    }
    return out;
}

/// Self-normalized estimate from precomputed log-weights and ψ values.
inline Estimate weighted_expectation(const std::vector<double>& log_weights,
                                     const std::vector<double>& psi_vals) {
    if (log_weights.size() != psi_vals.size() || log_weights.empty())
        throw std::invalid_argument("weighted_expectation: size mismatch");
    double max_lw = -std::numeric_limits<double>::infinity();
    for (double lw : log_weights)
        if (lw > max_lw) max_lw = lw;
    if (!std::isfinite(max_lw)) throw DegenerateEnsemble("weighted_expectation: zero weights");
    std::vector<double> w(log_weights.size(), 0.0);
    for (std::size_t i = 0; i < log_weights.size(); ++i)
        if (std::isfinite(log_weights[i])) w[i] = std::exp(log_weights[i] - max_lw);
    double num = 0.0, wsum = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        num += w[i] * psi_vals[i];
        wsum += w[i];
    }
    Estimate est;
    est.value = num / wsum;
    double var = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double wn = w[i] / wsum;
        var += wn * wn * (psi_vals[i] - est.value) * (psi_vals[i] - est.value);
    }
    est.se = std::sqrt(var);
    return est;
}

struct PairedGap {
    double gap = 0.0;  // estimate under weights a minus estimate under weights b
    double se = 0.0;   // linearized SE of the difference over the shared members
};

/// Difference of two self-normalized estimates computed on the *same*
/// ensemble, with the covariance of the shared members taken into account
/// through the per-member influence contributions.
inline PairedGap paired_gap(const std::vector<double>& logw_a, const std::vector<double>& logw_b,
                            const std::vector<double>& psi_vals) {
    const Estimate ea = weighted_expectation(logw_a, psi_vals);
    const Estimate eb = weighted_expectation(logw_b, psi_vals);
    auto normalized = [](const std::vector<double>& logw) {
        double max_lw = -std::numeric_limits<double>::infinity();
        for (double lw : logw)
            if (lw > max_lw) max_lw = lw;
        std::vector<double> w(logw.size(), 0.0);
        double wsum = 0.0;
        for (std::size_t i = 0; i < logw.size(); ++i) {
            if (std::isfinite(logw[i])) {
                w[i] = std::exp(logw[i] - max_lw);
                wsum += w[i];
            }
        }
        for (double& x : w) x /= wsum;
        return w;
    };
    const std::vector<double> wa = normalized(logw_a);
    const std::vector<double> wb = normalized(logw_b);
    PairedGap out;
    out.gap = ea.value - eb.value;
    double var = 0.0;
    for (std::size_t i = 0; i < psi_vals.size(); ++i) {
        const double d = wa[i] * (psi_vals[i] - ea.value) - wb[i] * (psi_vals[i] - eb.value);
        var += d * d;
    }
    out.se = std::sqrt(var);
    return out;
}

struct ConvergenceRow {
    std::string level;  // truncation index or "limit"
    std::string psi;
    double estimate = 0.0;
    double se = 0.0;
    double ess = 0.0;
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
    double max_gap = 0.0;  // max over ψ of |ν_{n_max}[ψ] - ν_limit[ψ]|
};

/// Estimates of ν_n[ψ] along n_list plus the singular-limit row, all from one
/// shared μ_c ensemble so successive levels are positively coupled.
inline ConvergenceTable weak_convergence_report(const NoiseStream& base, double c, int modes,
                                                int points, double lambda,
                                                const std::vector<int>& n_list,
                                                const std::vector<std::string>& psi_ids,
                                                std::size_t count, unsigned threads = 1) {
    if (n_list.empty()) throw std::invalid_argument("weak_convergence_report: empty n_list");
    for (std::size_t i = 1; i < n_list.size(); ++i)
        if (n_list[i] <= n_list[i - 1])
            throw std::invalid_argument("weak_convergence_report: n_list must increase");

    PotentialSpec pot;
    pot.lambda = lambda;
    MeasureSample sample = importance_sample(base, c, modes, points, pot, MeasureKind::mu_c,
                                             count, threads);
    // Grids are shared across levels; only the log-weights change with n.
    std::vector<GridField> grids(count);
    parallel_for_index(count, threads, [&](std::size_t i) {
        CosineTransform transform(modes, points);
        grids[i] = transform.synthesize(sample.fields[i]);
    });

    ConvergenceTable out;
    std::vector<Observable> obs;
    for (const auto& id : psi_ids) obs.push_back(observable_by_id(id));

    auto emit = [&](const std::string& label) {
        for (const auto& o : obs) {
            const Estimate e = expectation(sample, o);
            out.rows.push_back({label, o.id, e.value, e.se, sample.ess()});
        }
    };

    for (int n : n_list) {
        sample.kind = MeasureKind::nu_n;
        sample.pot.n = n;
        parallel_for_index(count, threads, [&](std::size_t i) {
            sample.log_weights[i] = measure_log_weight(grids[i], sample.pot, MeasureKind::nu_n);
        });
        emit(std::to_string(n));
    }
    sample.kind = MeasureKind::nu_limit;
    parallel_for_index(count, threads, [&](std::size_t i) {
        sample.log_weights[i] = measure_log_weight(grids[i], sample.pot, MeasureKind::nu_limit);
    });
    emit("limit");

    const std::size_t levels = n_list.size() + 1;
    for (std::size_t j = 0; j < psi_ids.size(); ++j) {
        const double last_n = out.rows[(levels - 2) * psi_ids.size() + j].estimate;
        const double limit = out.rows[(levels - 1) * psi_ids.size() + j].estimate;
        out.max_gap = std::max(out.max_gap, std::abs(last_n - limit));
    }
    return out;
}

}  // namespace chcook
