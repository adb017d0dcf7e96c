// experiments.hpp — drivers that turn the qualitative statements about the
// approximating dynamics into measurable quantities: penalization densities
// and contact pairings, Monte Carlo semigroup limits, the quantitative
// strong Feller envelope, and observable-gap mixing rates.
//
// All ensembles follow the stream contract: member i of a sweep owns the
// stream (purpose, i), so results are independent of worker count, and runs
// that are compared across a parameter (truncation index, pair member) reuse
// the same streams to couple the estimates.

#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "chcook/dynamics.hpp"
#include "chcook/measures.hpp"
#include "chcook/parallel.hpp"
#include "chcook/rng.hpp"

namespace chcook {

struct SampleStats {
    double mean = 0.0;
    double se = 0.0;
};

inline SampleStats sample_stats(const std::vector<double>& v) {
    SampleStats s;
    if (v.empty()) return s;
    s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    if (v.size() > 1) {
        double acc = 0.0;
        for (double x : v) acc += (x - s.mean) * (x - s.mean);
        s.se = std::sqrt(acc / static_cast<double>(v.size() - 1) /
                         static_cast<double>(v.size()));
    }
    return s;
}

struct LineFit {
    double slope = 0.0;
    double slope_se = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    std::size_t points = 0;
};

inline LineFit fit_line(const std::vector<double>& t, const std::vector<double>& y) {
    LineFit f;
    f.points = t.size();
    if (t.size() < 2 || t.size() != y.size()) return f;
    const double n = static_cast<double>(t.size());
    const double tm = std::accumulate(t.begin(), t.end(), 0.0) / n;
    const double ym = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double stt = 0.0, sty = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        stt += (t[i] - tm) * (t[i] - tm);
        sty += (t[i] - tm) * (y[i] - ym);
        syy += (y[i] - ym) * (y[i] - ym);
    }
    f.slope = sty / stt;
    f.intercept = ym - f.slope * tm;
    double rss = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double r = y[i] - (f.intercept + f.slope * t[i]);
        rss += r * r;
    }
    f.r2 = syy > 0.0 ? 1.0 - rss / syy : 1.0;
    if (t.size() > 2) f.slope_se = std::sqrt(rss / (n - 2.0) / stt);
    return f;
}

// ---------------------------------------------------------------------------
// Penalization densities and contact pairings
// ---------------------------------------------------------------------------

/// Space-time accumulation of the penalization split
///   ξ_+ = -f_n(X) 1_{X>0} dt dθ,   ξ_- = f_n(X) 1_{X<=0} dt dθ,
/// together with the contact pairings of the corrected measures
///   η_±ⁿ = ξ_± - (∓f) 1_{0<±X<=1} dt dθ.
/// The pairing factors stand in for the limiting process, which lives in the
/// unit band, so they are evaluated at the band-clipped state: the weight
/// (1 ∓ X) vanishes wherever the clipped state touches the wall. The pairings
/// then tend to zero as the truncation grows.
struct ReflectionEstimate {
    int n = 0;
    int theta_cells = 0;
    int time_bins = 0;
    std::vector<double> density_plus;   // theta_cells × time_bins, row-major in θ
    std::vector<double> density_minus;
    double total_mass_plus = 0.0;
    double total_mass_minus = 0.0;
    double band_mass = 0.0;  // ∫∫ |f_n(clip(X))|, the in-band drift mass
    double contact_pairing_plus = 0.0;
    double contact_pairing_minus = 0.0;
};

struct ReflectionConfig {
    SolverConfig base;
    std::vector<int> n_list;
    int replicates = 8;
    int theta_cells = 0;  // 0 = one cell per grid point
    int time_bins = 16;
    unsigned threads = 1;
};

struct ReflectionResult {
    std::vector<int> n_list;
    // estimates[level][replicate]
    std::vector<std::vector<ReflectionEstimate>> estimates;
    std::vector<SampleStats> pairing_plus_abs;  // per level, |pairing| across replicates
    std::vector<SampleStats> mass_total;        // per level, raw ξ_+ + ξ_- mass
    std::vector<SampleStats> band_mass;         // per level, in-band drift mass
    // replicate-paired drop |pairing(n_l)| - |pairing(n_{l+1})|, one per gap
    std::vector<SampleStats> pairing_drop;
};

inline ReflectionEstimate reflection_accumulate(const SolverConfig& cfg, NoiseStream stream,
                                                int theta_cells, int time_bins) {
    Stepper stepper(cfg);
    PotentialSpec clipped = cfg.pot;
    clipped.clip = true;  // grid values may graze ±1; the (1∓X) factor kills the log there
    ReflectionEstimate est;
    est.n = cfg.pot.n;
    est.theta_cells = theta_cells;
    est.time_bins = time_bins;
    est.density_plus.assign(static_cast<std::size_t>(theta_cells) * time_bins, 0.0);
    est.density_minus.assign(static_cast<std::size_t>(theta_cells) * time_bins, 0.0);

    SpectralField state = SpectralField::constant(cfg.mean_c, cfg.modes);
    const auto burn = static_cast<std::size_t>(std::llround(cfg.burn_in / cfg.dt));
    const auto steps = static_cast<std::size_t>(std::llround(cfg.horizon / cfg.dt));
    const double cell_weight = cfg.dt / static_cast<double>(cfg.points);
    CosineTransform transform(cfg.modes, cfg.points);
    GridField grid(cfg.points);

    for (std::size_t k = 0; k < burn; ++k) {
        state = stepper.step(state, stream);
        if (!state.finite()) throw NumericalBlowup(k, TrajectoryDiagnostics{});
    }
    for (std::size_t k = 0; k < steps; ++k) {
        transform.synthesize(state, grid);
        const int tbin = std::min<int>(time_bins - 1,
                                       static_cast<int>(k * static_cast<std::size_t>(time_bins) / steps));
        for (int j = 0; j < cfg.points; ++j) {
            const double v = grid[j];
            const double vb = std::clamp(v, -1.0, 1.0);
            const double fv = f_n(v, cfg.pot);
            est.band_mass += std::abs(f_n(vb, cfg.pot)) * cell_weight;
            const int cell = std::min(theta_cells - 1, j * theta_cells / cfg.points);
            const std::size_t idx =
                static_cast<std::size_t>(cell) * time_bins + static_cast<std::size_t>(tbin);
            if (v > 0.0) {
                const double d = -fv * cell_weight;
                est.density_plus[idx] += d;
                est.total_mass_plus += d;
                if (v <= 1.0)
                    est.contact_pairing_plus +=
                        (1.0 - v) * (-fv + f_log(v, clipped)) * cell_weight;
            } else {
                const double d = fv * cell_weight;
                est.density_minus[idx] += d;
                est.total_mass_minus += d;
                if (v >= -1.0)
                    est.contact_pairing_minus +=
                        (1.0 + v) * (fv - f_log(v, clipped)) * cell_weight;
            }
        }
        state = stepper.step(state, stream);
        if (!state.finite()) throw NumericalBlowup(burn + k, TrajectoryDiagnostics{});
    }
    return est;
}

/// Replicated stationary accumulation along the truncation list. Replicate r
/// reuses the same noise stream at every level, so the level comparisons are
/// coupled.
inline ReflectionResult run_reflection(const ReflectionConfig& cfg) {
    if (cfg.n_list.empty()) throw std::invalid_argument("run_reflection: empty n_list");
    ReflectionResult out;
    out.n_list = cfg.n_list;
    const int cells = cfg.theta_cells > 0 ? cfg.theta_cells : cfg.base.points;
    out.estimates.resize(cfg.n_list.size());
    for (std::size_t level = 0; level < cfg.n_list.size(); ++level) {
        SolverConfig run = cfg.base;
        run.pot.n = cfg.n_list[level];
        auto& reps = out.estimates[level];
        reps.resize(static_cast<std::size_t>(cfg.replicates));
        parallel_for_index(static_cast<std::size_t>(cfg.replicates), cfg.threads,
                           [&](std::size_t r) {
                               reps[r] = reflection_accumulate(
                                   run, make_stream(run.master_seed, StreamPurpose::trajectory, r),
                                   cells, cfg.time_bins);
                           });
        std::vector<double> pair_abs, mass, band;
        for (const auto& e : reps) {
            pair_abs.push_back(std::abs(e.contact_pairing_plus));
            mass.push_back(e.total_mass_plus + e.total_mass_minus);
            band.push_back(e.band_mass);
        }
        out.pairing_plus_abs.push_back(sample_stats(pair_abs));
        out.mass_total.push_back(sample_stats(mass));
        out.band_mass.push_back(sample_stats(band));
    }
    for (std::size_t level = 0; level + 1 < cfg.n_list.size(); ++level) {
        std::vector<double> drops;
        for (int r = 0; r < cfg.replicates; ++r) {
            const auto ur = static_cast<std::size_t>(r);
            drops.push_back(std::abs(out.estimates[level][ur].contact_pairing_plus) -
                            std::abs(out.estimates[level + 1][ur].contact_pairing_plus));
        }
        out.pairing_drop.push_back(sample_stats(drops));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Semigroup limit along the truncation index
// ---------------------------------------------------------------------------

struct SemigroupConfig {
    SolverConfig base;
    SpectralField x0;
    double t_eval = 0.1;
    std::vector<int> n_list;
    std::vector<std::string> observables;
    std::size_t ensemble = 1024;
    unsigned threads = 1;
};

struct SemigroupCell {
    int n = 0;
    std::string psi;
    double estimate = 0.0;
    double se = 0.0;
};

struct SemigroupResult {
    std::vector<SemigroupCell> cells;
    // gap between consecutive truncations, per observable, with combined SE
    std::vector<std::vector<SampleStats>> gaps;  // gaps[psi][level]
};

inline SemigroupResult run_semigroup(const SemigroupConfig& cfg) {
    if (cfg.n_list.empty()) throw std::invalid_argument("run_semigroup: empty n_list");
    std::vector<Observable> obs;
    for (const auto& id : cfg.observables) obs.push_back(observable_by_id(id));

    SemigroupResult out;
    std::vector<std::vector<std::vector<double>>> values(cfg.n_list.size());
    for (std::size_t level = 0; level < cfg.n_list.size(); ++level) {
        SolverConfig run = cfg.base;
        run.pot.n = cfg.n_list[level];
        run.horizon = cfg.t_eval;
        run.burn_in = 0.0;
        auto& per_obs = values[level];
        per_obs.assign(obs.size(), std::vector<double>(cfg.ensemble, 0.0));
        parallel_for_index(cfg.ensemble, cfg.threads, [&](std::size_t i) {
            // Same stream for member i at every truncation level.
            NoiseStream stream = make_stream(run.master_seed, StreamPurpose::ensemble, i);
            const SimulationResult sim = simulate(cfg.x0, run, stream);
            CosineTransform transform(run.modes, run.points);
            const GridField grid = transform.synthesize(sim.final_state);
            for (std::size_t o = 0; o < obs.size(); ++o)
                per_obs[o][i] = obs[o].eval(sim.final_state, grid);
        });
        for (std::size_t o = 0; o < obs.size(); ++o) {
            const SampleStats s = sample_stats(per_obs[o]);
            out.cells.push_back({cfg.n_list[level], obs[o].id, s.mean, s.se});
        }
    }
    out.gaps.assign(obs.size(), {});
    for (std::size_t o = 0; o < obs.size(); ++o) {
        for (std::size_t level = 0; level + 1 < cfg.n_list.size(); ++level) {
            // Paired gap: the members share streams across levels.
            std::vector<double> diff(cfg.ensemble);
            for (std::size_t i = 0; i < cfg.ensemble; ++i)
                diff[i] = values[level + 1][o][i] - values[level][o][i];
            SampleStats s = sample_stats(diff);
            s.mean = std::abs(s.mean);
            out.gaps[o].push_back(s);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Quantitative strong Feller envelope
// ---------------------------------------------------------------------------

struct StrongFellerConfig {
    SolverConfig base;  // pot.lambda must be positive
    std::vector<double> t_list;
    int pairs = 5;
    std::size_t ensemble = 512;
    std::vector<std::string> observables;
    double pair_amplitude = 0.25;
    int pair_band = 4;
    unsigned threads = 1;
};

struct StrongFellerRow {
    int pair = 0;
    double t = 0.0;
    std::string psi;
    std::string coupling;  // "independent" or "shared"
    double lhs = 0.0;
    double se = 0.0;
    double bound = 0.0;
    bool pass = false;
};

struct StrongFellerResult {
    std::vector<StrongFellerRow> rows;
    std::vector<double> pair_distances;  // |x-y|_{-1} per pair
};

/// Random band-limited start in the admissible band with mean exactly c.
inline SpectralField random_admissible_state(NoiseStream& stream, double c, int modes, int band,
                                             double amplitude) {
    SpectralField h(modes);
    h[0] = c;
    for (int i = 1; i <= std::min(band, modes); ++i)
        h[i] = amplitude * stream.normal() / static_cast<double>(i);
    // Rescale the fluctuation so the profile stays well inside (-1,1).
    double sup = 0.0;
    const int probe = 16 * (modes + 1);
    for (int j = 0; j < probe; ++j)
        sup = std::max(sup, std::abs(synthesize_at(h, grid_theta(j, probe)) - c));
    const double cap = 0.8 * (1.0 - std::abs(c));
    if (sup > cap) {
        const double shrink = cap / sup;
        for (int i = 1; i <= modes; ++i) h[i] *= shrink;
    }
    return h;
}

/// The envelope constant 2 e^{λ²t/4} / (λ √t) · |x-y|_{-1} for a unit-sup
/// observable; degenerate at λ = 0, so the driver requires λ > 0.
inline double strong_feller_bound(double lambda, double t, double distance_neg1) {
    if (!(lambda > 0.0))
        throw std::invalid_argument("strong_feller_bound: requires lambda > 0");
    if (!(t > 0.0)) throw std::invalid_argument("strong_feller_bound: requires t > 0");
    return 2.0 * std::exp(lambda * lambda * t / 4.0) / (lambda * std::sqrt(t)) * distance_neg1;
}

inline StrongFellerResult run_strong_feller(const StrongFellerConfig& cfg) {
    if (!(cfg.base.pot.lambda > 0.0))
        throw std::invalid_argument("run_strong_feller: pot.lambda must be > 0");
    std::vector<Observable> obs;
    for (const auto& id : cfg.observables) {
        Observable o = observable_by_id(id);
        if (!std::isfinite(o.sup_norm))
            throw std::invalid_argument("run_strong_feller: observable '" + id +
                                        "' has no sup bound");
        obs.push_back(o);
    }
    StrongFellerResult out;
    for (int p = 0; p < cfg.pairs; ++p) {
        NoiseStream gen_x =
            make_stream(cfg.base.master_seed, StreamPurpose::pair_primary, static_cast<std::uint64_t>(p));
        NoiseStream gen_y = make_stream(cfg.base.master_seed, StreamPurpose::pair_secondary,
                                        static_cast<std::uint64_t>(p));
        const SpectralField x = random_admissible_state(gen_x, cfg.base.mean_c, cfg.base.modes,
                                                        cfg.pair_band, cfg.pair_amplitude);
        const SpectralField y = random_admissible_state(gen_y, cfg.base.mean_c, cfg.base.modes,
                                                        cfg.pair_band, cfg.pair_amplitude);
        const double dist = seminorm(x - y, -1.0);
        out.pair_distances.push_back(dist);

        for (double t : cfg.t_list) {
            SolverConfig run = cfg.base;
            run.horizon = t;
            run.burn_in = 0.0;
            std::vector<std::vector<double>> vx(obs.size(), std::vector<double>(cfg.ensemble));
            std::vector<std::vector<double>> vy(obs.size(), std::vector<double>(cfg.ensemble));
            std::vector<std::vector<double>> vshared(obs.size(), std::vector<double>(cfg.ensemble));
            parallel_for_index(cfg.ensemble, cfg.threads, [&](std::size_t i) {
                const std::uint64_t tag = (static_cast<std::uint64_t>(p) << 24) | i;
                CosineTransform transform(run.modes, run.points);
                NoiseStream sx = make_stream(run.master_seed, StreamPurpose::ensemble, tag);
                NoiseStream sy = make_stream(run.master_seed, StreamPurpose::reference, tag);
                const SimulationResult rx = simulate(x, run, sx);
                const SimulationResult ry = simulate(y, run, sy);
                NoiseStream shared = make_stream(run.master_seed, StreamPurpose::trajectory, tag);
                const PairResult pr = simulate_pair(x, y, run, shared, true);
                const GridField gx = transform.synthesize(rx.final_state);
                const GridField gy = transform.synthesize(ry.final_state);
                const GridField g1 = transform.synthesize(pr.final_first);
                const GridField g2 = transform.synthesize(pr.final_second);
                for (std::size_t o = 0; o < obs.size(); ++o) {
                    vx[o][i] = obs[o].eval(rx.final_state, gx);
                    vy[o][i] = obs[o].eval(ry.final_state, gy);
                    vshared[o][i] =
                        obs[o].eval(pr.final_first, g1) - obs[o].eval(pr.final_second, g2);
                }
            });
            for (std::size_t o = 0; o < obs.size(); ++o) {
                const SampleStats sx = sample_stats(vx[o]);
                const SampleStats sy = sample_stats(vy[o]);
                StrongFellerRow row;
                row.pair = p;
                row.t = t;
                row.psi = obs[o].id;
                row.coupling = "independent";
                row.lhs = std::abs(sx.mean - sy.mean);
                row.se = std::sqrt(sx.se * sx.se + sy.se * sy.se);
                row.bound = obs[o].sup_norm *
                            strong_feller_bound(cfg.base.pot.lambda, t, dist);
                row.pass = row.lhs <= row.bound + 3.0 * row.se;
                out.rows.push_back(row);

                if (std::isfinite(obs[o].lip_neg1)) {
                    const SampleStats sd = sample_stats(vshared[o]);
                    StrongFellerRow lip;
                    lip.pair = p;
                    lip.t = t;
                    lip.psi = obs[o].id;
                    lip.coupling = "shared";
                    lip.lhs = std::abs(sd.mean);
                    lip.se = sd.se;
                    lip.bound = obs[o].lip_neg1 * std::exp(cfg.base.pot.lambda * t) * dist;
                    lip.pass = lip.lhs <= lip.bound + 3.0 * lip.se;
                    out.rows.push_back(lip);
                }
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Observable-gap mixing estimate
// ---------------------------------------------------------------------------

struct MixingConfig {
    SolverConfig base;
    SpectralField x0;
    std::vector<double> lags;
    std::size_t ensemble = 2048;
    std::size_t reference_count = 20000;
    std::size_t pair_count = 256;
    std::vector<std::string> observables;  // first entry drives the fit
    unsigned threads = 1;
};

struct MixingGapRow {
    double lag = 0.0;
    std::string psi;
    double estimate = 0.0;  // E[ψ(X(t,x))] estimate
    double se = 0.0;
    double reference = 0.0;  // stationary value from importance sampling
    double reference_se = 0.0;
    double gap = 0.0;
    double gap_se = 0.0;
};

struct MixingReport {
    std::vector<MixingGapRow> rows;
    std::vector<double> pair_lags;
    std::vector<double> pair_distances;  // mean shared-noise |X₁-X₂|_{-1} per lag
    double fitted_beta = 0.0;
    double beta_se = 0.0;
    double fit_r2 = 0.0;
    std::size_t fit_points = 0;
    std::string fit_psi;
};

inline MixingReport run_mixing(const MixingConfig& cfg) {
    if (cfg.lags.empty()) throw std::invalid_argument("run_mixing: empty lags");
    for (std::size_t i = 1; i < cfg.lags.size(); ++i)
        if (cfg.lags[i] <= cfg.lags[i - 1])
            throw std::invalid_argument("run_mixing: lags must increase");
    std::vector<Observable> obs;
    for (const auto& id : cfg.observables) obs.push_back(observable_by_id(id));

    // Stationary reference by importance sampling over the Gaussian law.
    const MeasureSample ref_sample = importance_sample(
        make_stream(cfg.base.master_seed, StreamPurpose::reference, 0), cfg.base.mean_c,
        cfg.base.modes, cfg.base.points, cfg.base.pot, MeasureKind::nu_n, cfg.reference_count,
        cfg.threads);
    std::vector<Estimate> ref(obs.size());
    for (std::size_t o = 0; o < obs.size(); ++o) ref[o] = expectation(ref_sample, obs[o]);

    // Ensemble from the fixed start; observables evaluated at every lag.
    const std::size_t nlag = cfg.lags.size();
    std::vector<std::vector<std::vector<double>>> vals(
        obs.size(), std::vector<std::vector<double>>(nlag, std::vector<double>(cfg.ensemble)));
    parallel_for_index(cfg.ensemble, cfg.threads, [&](std::size_t i) {
        SolverConfig run = cfg.base;
        run.burn_in = 0.0;
        Stepper stepper(run);
        CosineTransform transform(run.modes, run.points);
        NoiseStream stream = make_stream(run.master_seed, StreamPurpose::ensemble, i);
        SpectralField state = cfg.x0;
        std::size_t done = 0;
        for (std::size_t l = 0; l < nlag; ++l) {
            const auto target = static_cast<std::size_t>(std::llround(cfg.lags[l] / run.dt));
            for (; done < target; ++done) {
                state = stepper.step(state, stream);
                if (!state.finite()) throw NumericalBlowup(done, TrajectoryDiagnostics{});
            }
            const GridField grid = transform.synthesize(state);
            for (std::size_t o = 0; o < obs.size(); ++o) vals[o][l][i] = obs[o].eval(state, grid);
        }
    });

    MixingReport out;
    for (std::size_t l = 0; l < nlag; ++l) {
        for (std::size_t o = 0; o < obs.size(); ++o) {
            const SampleStats s = sample_stats(vals[o][l]);
            MixingGapRow row;
            row.lag = cfg.lags[l];
            row.psi = obs[o].id;
            row.estimate = s.mean;
            row.se = s.se;
            row.reference = ref[o].value;
            row.reference_se = ref[o].se;
            row.gap = std::abs(s.mean - ref[o].value);
            row.gap_se = std::sqrt(s.se * s.se + ref[o].se * ref[o].se);
            out.rows.push_back(row);
        }
    }

    // Shared-noise pair distances from x0 and its reflection through the mean.
    SpectralField y0 = cfg.x0;
    for (int i = 1; i <= y0.modes(); ++i) y0[i] = -y0[i];
    std::vector<std::vector<double>> pdist(nlag, std::vector<double>(cfg.pair_count));
    parallel_for_index(cfg.pair_count, cfg.threads, [&](std::size_t i) {
        SolverConfig run = cfg.base;
        run.burn_in = 0.0;
        run.horizon = cfg.lags.back();
        NoiseStream stream = make_stream(run.master_seed, StreamPurpose::pair_primary, i);
        const PairResult pr = simulate_pair(cfg.x0, y0, run, stream, true);
        for (std::size_t l = 0; l < nlag; ++l) {
            const auto idx = static_cast<std::size_t>(std::llround(cfg.lags[l] / run.dt));
            pdist[l][i] = pr.distances[std::min(idx, pr.distances.size() - 1)];
        }
    });
    for (std::size_t l = 0; l < nlag; ++l) {
        out.pair_lags.push_back(cfg.lags[l]);
        out.pair_distances.push_back(sample_stats(pdist[l]).mean);
    }

    // Log-linear fit of the primary observable's gap over the lags that sit
    // above the Monte Carlo floor (gap > 3 gap_se).
    out.fit_psi = obs.front().id;
    std::vector<double> ft, fy;
    for (std::size_t l = 0; l < nlag; ++l) {
        const MixingGapRow& row = out.rows[l * obs.size()];
        if (row.gap > 3.0 * row.gap_se && row.gap > 0.0) {
            ft.push_back(row.lag);
            fy.push_back(std::log(row.gap));
        }
    }
    const LineFit fit = fit_line(ft, fy);
    out.fitted_beta = -fit.slope;
    out.beta_se = fit.slope_se;
    out.fit_r2 = fit.r2;
    out.fit_points = fit.points;
    return out;
}

// ---------------------------------------------------------------------------
// Energy-balance residuals
// ---------------------------------------------------------------------------

struct EnergyConfig {
    SolverConfig base;  // burn_in is honored; horizon is the audited window
    int reg_order = 4;
    int trajectories = 200;
    unsigned threads = 1;
};

struct EnergyResult {
    std::vector<EnergyBreakdown> per_trajectory;
    SampleStats residual;
    double trace = 0.0;
};

inline EnergyResult run_energy(const EnergyConfig& cfg) {
    EnergyResult out;
    out.trace = regularized_trace(cfg.reg_order);
    out.per_trajectory.resize(static_cast<std::size_t>(cfg.trajectories));
    parallel_for_index(static_cast<std::size_t>(cfg.trajectories), cfg.threads,
                       [&](std::size_t r) {
                           NoiseStream stream =
                               make_stream(cfg.base.master_seed, StreamPurpose::trajectory, r);
                           const SpectralField x0 =
                               SpectralField::constant(cfg.base.mean_c, cfg.base.modes);
                           RecordOptions rec;
                           rec.with_noise = true;
                           const SimulationResult sim = simulate(x0, cfg.base, stream, rec);
                           out.per_trajectory[r] =
                               energy_check(sim.trajectory, cfg.base, cfg.reg_order).front();
                       });
    std::vector<double> res;
    for (const auto& b : out.per_trajectory) res.push_back(b.residual());
    out.residual = sample_stats(res);
    return out;
}

}  // namespace chcook
