// runner.hpp — experiment dispatch and artifact writing.
//
// Each experiment produces <name>.csv (data, byte-stable for a fixed config
// and seed) and <name>.summary.json (key scalars and pass/fail verdicts).
// run.meta.json echoes the configuration; it is the only artifact allowed to
// carry a timestamp.

#pragma once

#include <chrono>
#include <filesystem>
#include <iostream>
#include <string>

#include "chcook/config.hpp"
#include "chcook/control.hpp"
#include "chcook/dynamics.hpp"
#include "chcook/experiments.hpp"
#include "chcook/measures.hpp"
#include "chcook/report.hpp"

namespace chcook {

struct DriverOutput {
    Table table;
    nlohmann::json summary;
    std::string one_liner;
};

inline DriverOutput run_simulate_experiment(const RunConfig& cfg) {
    SolverConfig solver = cfg.solver();
    const auto steps = static_cast<std::size_t>(std::llround(cfg.horizon / cfg.dt));
    RecordOptions rec;
    rec.every = cfg.snapshot_every > 0
                    ? cfg.snapshot_every
                    : std::max<int>(1, static_cast<int>(steps / 200));
    NoiseStream stream = make_stream(cfg.seed, StreamPurpose::trajectory, 0);
    const SimulationResult sim = simulate(initial_state(cfg), solver, stream, rec);

    DriverOutput out;
    out.table.columns.push_back("t");
    for (int i = 0; i <= cfg.modes; ++i) out.table.columns.push_back("c" + std::to_string(i));
    for (std::size_t k = 0; k < sim.trajectory.states.size(); ++k) {
        auto row = out.table.row();
        row.cell(sim.trajectory.times[k]);
        for (int i = 0; i <= cfg.modes; ++i) row.cell(sim.trajectory.states[k][i]);
    }
    out.summary = {{"experiment", "simulate"},
                   {"steps", sim.diagnostics.steps},
                   {"mean_drift", json_number(sim.diagnostics.mean_drift)},
                   {"overshoot", json_number(sim.diagnostics.overshoot)},
                   {"drift_l1", json_number(sim.diagnostics.drift_l1)},
                   {"warnings", sim.diagnostics.warnings},
                   {"pass", true}};
    out.one_liner = "simulate: " + std::to_string(sim.diagnostics.steps) +
                    " steps, mean drift " + fmt_double(sim.diagnostics.mean_drift);
    return out;
}

inline DriverOutput run_sample_measure_experiment(const RunConfig& cfg) {
    PotentialSpec pot = cfg.solver().pot;
    std::vector<std::string> obs_ids =
        cfg.observables.empty()
            ? std::vector<std::string>{"one", "mean", "neg1_sq", "exceedance"}
            : cfg.observables;
    const MeasureSample sample =
        importance_sample(make_stream(cfg.seed, StreamPurpose::ensemble, 0), cfg.mean_c,
                          cfg.modes, cfg.points, pot, MeasureKind::nu_n, cfg.count, cfg.threads);
    DriverOutput out;
    out.table.columns = {"psi_id", "estimate", "se", "ess"};
    const double ess = sample.ess();
    for (const auto& id : obs_ids) {
        const Estimate e = expectation(sample, observable_by_id(id));
        out.table.row().cell(id).cell(e.value).cell(e.se).cell(ess);
    }
    const double logz = estimate_log_z(sample);
    const bool low_ess = ess < kEssWarnFraction * static_cast<double>(sample.size());
    out.summary = {{"experiment", "sample-measure"},
                   {"count", sample.size()},
                   {"ess", json_number(ess)},
                   {"log_z", json_number(logz)},
                   {"low_ess_warning", low_ess},
                   {"pass", true}};
    out.one_liner = "sample-measure: count " + std::to_string(sample.size()) + ", ess " +
                    fmt_double(ess) + ", log Z " + fmt_double(logz);
    return out;
}

inline DriverOutput run_invariant_convergence_experiment(const RunConfig& cfg) {
    const std::vector<int> n_list = cfg.n_list.empty() ? std::vector<int>{1, 2, 4, 8, 16}
                                                       : cfg.n_list;
    const std::vector<std::string> obs_ids =
        cfg.observables.empty() ? std::vector<std::string>{"exceedance", "tanh_neg1_sq", "one"}
                                : cfg.observables;
    const ConvergenceTable table =
        weak_convergence_report(make_stream(cfg.seed, StreamPurpose::ensemble, 0), cfg.mean_c,
                                cfg.modes, cfg.points, cfg.lambda, n_list, obs_ids, cfg.count,
                                cfg.threads);
    DriverOutput out;
    out.table.columns = {"n", "psi_id", "estimate", "se", "ess"};
    for (const auto& r : table.rows)
        out.table.row().cell(r.level).cell(r.psi).cell(r.estimate).cell(r.se).cell(r.ess);

    // Paired monotonicity of the first observable along n (shared ensemble).
    PotentialSpec pot = cfg.solver().pot;
    const MeasureSample base =
        importance_sample(make_stream(cfg.seed, StreamPurpose::ensemble, 0), cfg.mean_c,
                          cfg.modes, cfg.points, pot, MeasureKind::mu_c, cfg.count, cfg.threads);
    const Observable lead = observable_by_id(obs_ids.front());
    const std::vector<double> psi_vals = observable_values(base.fields, cfg.points, lead);
    std::vector<GridField> grids(base.size());
    {
        CosineTransform transform(cfg.modes, cfg.points);
        for (std::size_t i = 0; i < base.size(); ++i)
            grids[i] = transform.synthesize(base.fields[i]);
    }
    bool monotone = true;
    double min_gap_z = std::numeric_limits<double>::infinity();
    nlohmann::json gap_rows = nlohmann::json::array();
    for (std::size_t l = 0; l + 1 < n_list.size(); ++l) {
        PotentialSpec pa = pot, pb = pot;
        pa.n = n_list[l];
        pb.n = n_list[l + 1];
        std::vector<double> lwa(base.size()), lwb(base.size());
        for (std::size_t i = 0; i < base.size(); ++i) {
            lwa[i] = measure_log_weight(grids[i], pa, MeasureKind::nu_n);
            lwb[i] = measure_log_weight(grids[i], pb, MeasureKind::nu_n);
        }
        const PairedGap g = paired_gap(lwa, lwb, psi_vals);
        const double z = g.se > 0.0 ? g.gap / g.se : std::numeric_limits<double>::infinity();
        monotone = monotone && g.gap > 0.0;
        min_gap_z = std::min(min_gap_z, z);
        gap_rows.push_back({{"from", n_list[l]},
                            {"to", n_list[l + 1]},
                            {"gap", json_number(g.gap)},
                            {"se", json_number(g.se)},
                            {"z", json_number(z)}});
    }
    out.summary = {{"experiment", "invariant-convergence"},
                   {"max_gap_vs_limit", json_number(table.max_gap)},
                   {"lead_psi", lead.id},
                   {"paired_gaps", gap_rows},
                   {"monotone_decreasing", monotone},
                   {"min_gap_z", json_number(min_gap_z)},
                   {"pass", monotone}};
    out.one_liner = "invariant-convergence: " + lead.id +
                    (monotone ? " decreases along n" : " NOT monotone") + ", min gap z " +
                    fmt_double(min_gap_z);
    return out;
}

inline DriverOutput run_reflection_experiment(const RunConfig& cfg) {
    ReflectionConfig rc;
    rc.base = cfg.solver();
    rc.n_list = cfg.n_list.empty() ? std::vector<int>{2, 4, 8} : cfg.n_list;
    rc.replicates = cfg.replicates;
    rc.time_bins = cfg.time_bins;
    rc.threads = cfg.threads;
    const ReflectionResult res = run_reflection(rc);

    DriverOutput out;
    out.table.columns = {"n", "replicate", "quantity", "arg", "value"};
    for (std::size_t l = 0; l < res.n_list.size(); ++l) {
        for (std::size_t r = 0; r < res.estimates[l].size(); ++r) {
            const ReflectionEstimate& e = res.estimates[l][r];
            auto scalar = [&](const char* q, double v) {
                out.table.row().cell(res.n_list[l]).cell(r).cell(std::string(q)).cell(
                    std::string("")).cell(v);
            };
            scalar("mass_plus", e.total_mass_plus);
            scalar("mass_minus", e.total_mass_minus);
            scalar("band_mass", e.band_mass);
            scalar("pairing_plus", e.contact_pairing_plus);
            scalar("pairing_minus", e.contact_pairing_minus);
            // time-integrated θ profiles of the penalization split
            for (int cell = 0; cell < e.theta_cells; ++cell) {
                double dp = 0.0, dm = 0.0;
                for (int b = 0; b < e.time_bins; ++b) {
                    dp += e.density_plus[static_cast<std::size_t>(cell) * e.time_bins + b];
                    dm += e.density_minus[static_cast<std::size_t>(cell) * e.time_bins + b];
                }
                out.table.row().cell(res.n_list[l]).cell(r).cell(std::string("profile_plus"))
                    .cell(cell).cell(dp);
                out.table.row().cell(res.n_list[l]).cell(r).cell(std::string("profile_minus"))
                    .cell(cell).cell(dm);
            }
        }
    }

    bool pairing_decreasing = true;
    double min_drop_z = std::numeric_limits<double>::infinity();
    nlohmann::json levels = nlohmann::json::array();
    for (std::size_t l = 0; l < res.n_list.size(); ++l) {
        levels.push_back({{"n", res.n_list[l]},
                          {"pairing_plus_abs_mean", json_number(res.pairing_plus_abs[l].mean)},
                          {"pairing_plus_abs_se", json_number(res.pairing_plus_abs[l].se)},
                          {"mass_mean", json_number(res.mass_total[l].mean)},
                          {"mass_se", json_number(res.mass_total[l].se)},
                          {"band_mass_mean", json_number(res.band_mass[l].mean)},
                          {"band_mass_se", json_number(res.band_mass[l].se)}});
    }
    nlohmann::json drops = nlohmann::json::array();
    for (std::size_t l = 0; l < res.pairing_drop.size(); ++l) {
        const SampleStats& d = res.pairing_drop[l];
        const double z = d.se > 0.0 ? d.mean / d.se : std::numeric_limits<double>::infinity();
        pairing_decreasing = pairing_decreasing && d.mean > 3.0 * d.se;
        min_drop_z = std::min(min_drop_z, z);
        drops.push_back({{"from", res.n_list[l]},
                         {"to", res.n_list[l + 1]},
                         {"drop", json_number(d.mean)},
                         {"se", json_number(d.se)},
                         {"z", json_number(z)}});
    }
    // Saturation of the in-band drift mass: later increments no larger than
    // earlier ones (growth flattens toward the finite limit mass).
    bool mass_saturating = true;
    if (res.n_list.size() >= 3) {
        for (std::size_t l = 2; l < res.n_list.size(); ++l) {
            const double inc_prev = res.band_mass[l - 1].mean - res.band_mass[l - 2].mean;
            const double inc = res.band_mass[l].mean - res.band_mass[l - 1].mean;
            const double tol = 3.0 * std::sqrt(res.band_mass[l].se * res.band_mass[l].se +
                                               res.band_mass[l - 1].se * res.band_mass[l - 1].se);
            mass_saturating = mass_saturating && inc <= inc_prev + tol;
        }
    }
    out.summary = {{"experiment", "reflection"},
                   {"levels", levels},
                   {"pairing_drops", drops},
                   {"pairing_abs_decreasing", pairing_decreasing},
                   {"min_drop_z", json_number(min_drop_z)},
                   {"mass_saturating", mass_saturating},
                   {"pass", pairing_decreasing && mass_saturating}};
    out.one_liner = std::string("reflection: |<1-X, eta_+^n>| ") +
                    (pairing_decreasing ? "decreasing" : "NOT decreasing") + ", mass " +
                    (mass_saturating ? "saturating" : "growing");
    return out;
}

inline DriverOutput run_semigroup_experiment(const RunConfig& cfg) {
    SemigroupConfig sc;
    sc.base = cfg.solver();
    sc.x0 = initial_state(cfg);
    sc.t_eval = cfg.t_list.empty() ? 0.1 : cfg.t_list.front();
    sc.n_list = cfg.n_list.empty() ? std::vector<int>{1, 2, 4, 8} : cfg.n_list;
    sc.observables = cfg.observables.empty()
                         ? std::vector<std::string>{"tanh_neg1_sq", "tanh2_mode1", "one"}
                         : cfg.observables;
    sc.ensemble = cfg.ensemble;
    sc.threads = cfg.threads;
    const SemigroupResult res = run_semigroup(sc);

    DriverOutput out;
    out.table.columns = {"kind", "n", "psi_id", "estimate", "se"};
    for (const auto& c : res.cells)
        out.table.row().cell(std::string("estimate")).cell(c.n).cell(c.psi).cell(c.estimate)
            .cell(c.se);
    bool cauchy = true;
    for (std::size_t o = 0; o < sc.observables.size(); ++o) {
        for (std::size_t l = 0; l < res.gaps[o].size(); ++l) {
            const std::string label =
                std::to_string(sc.n_list[l]) + "->" + std::to_string(sc.n_list[l + 1]);
            out.table.row().cell(std::string("gap")).cell(label).cell(sc.observables[o])
                .cell(res.gaps[o][l].mean).cell(res.gaps[o][l].se);
        }
        if (res.gaps[o].size() >= 2 && sc.observables[o] != "one") {
            const auto& g = res.gaps[o];
            cauchy = cauchy && g.back().mean <= g.front().mean + 3.0 * (g.back().se + g.front().se);
        }
    }
    out.summary = {{"experiment", "semigroup"},
                   {"t", sc.t_eval},
                   {"cauchy_gaps", cauchy},
                   {"pass", cauchy}};
    out.one_liner = std::string("semigroup: truncation gaps ") +
                    (cauchy ? "shrink along n" : "do NOT shrink");
    return out;
}

inline DriverOutput run_strong_feller_experiment(const RunConfig& cfg) {
    StrongFellerConfig sfc;
    sfc.base = cfg.solver();
    sfc.t_list = cfg.t_list.empty() ? std::vector<double>{0.1, 0.5} : cfg.t_list;
    sfc.pairs = cfg.pairs;
    sfc.ensemble = cfg.ensemble;
    sfc.observables = cfg.observables.empty()
                          ? std::vector<std::string>{"tanh2_mode1", "cos3_mode1", "exceedance"}
                          : cfg.observables;
    sfc.pair_amplitude = cfg.pair_amplitude;
    sfc.threads = cfg.threads;
    const StrongFellerResult res = run_strong_feller(sfc);

    DriverOutput out;
    out.table.columns = {"pair", "t", "psi_id", "coupling", "lhs", "se", "bound", "pass"};
    bool all_pass = true;
    for (const auto& r : res.rows) {
        out.table.row().cell(r.pair).cell(r.t).cell(r.psi).cell(r.coupling).cell(r.lhs)
            .cell(r.se).cell(r.bound).cell(std::string(r.pass ? "1" : "0"));
        all_pass = all_pass && r.pass;
    }
    nlohmann::json dists = nlohmann::json::array();
    for (double d : res.pair_distances) dists.push_back(json_number(d));
    out.summary = {{"experiment", "strong-feller"},
                   {"pair_distances_neg1", dists},
                   {"all_within_bound", all_pass},
                   {"pass", all_pass}};
    out.one_liner = std::string("strong-feller: ") +
                    (all_pass ? "all rows within envelope + 3 SE" : "envelope VIOLATED");
    return out;
}

inline DriverOutput run_control_experiment(const RunConfig& cfg) {
    const SpectralField x = initial_state(cfg);
    const SpectralField y = second_state(cfg);
    PotentialSpec pot = cfg.solver().pot;
    const std::vector<int> p_list =
        cfg.p_list.empty() ? std::vector<int>{16, 32, 64, 128, 256} : cfg.p_list;
    const ControlField reference(x, y, cfg.horizon, cfg.p_ref, pot);

    DriverOutput out;
    out.table.columns = {"kind", "arg", "value1", "value2", "value3"};
    std::vector<double> residuals;
    for (int p : p_list) {
        const ControlField coarse(x, y, cfg.horizon, p, pot);
        const ControlResidual r = control_residual(coarse, reference);
        residuals.push_back(r.max_abs);
        out.table.row().cell(std::string("residual")).cell(p).cell(r.max_abs).cell(r.l2)
            .cell(std::string(""));
    }
    bool spectral = true;
    for (std::size_t i = 1; i < residuals.size(); ++i) {
        if (residuals[i - 1] <= 1e-10) break;  // at the round-off floor
        spectral = spectral && residuals[i] < 0.1 * residuals[i - 1];
    }

    // Steering with the constructed forcing at the configured grid.
    SolverConfig steer = cfg.solver();
    steer.modes = cfg.points / 2 - 1;
    const ControlField control(x, y, cfg.horizon, cfg.points, pot);
    const std::vector<double> scales =
        cfg.scales.empty() ? std::vector<double>{0.0, 0.05, 0.1, 0.25} : cfg.scales;
    double deterministic_gap = 0.0;
    double smallest_positive_hit = 0.0;
    bool has_positive_scale = false;
    for (double s : scales) {
        const std::size_t runs = s == 0.0 ? 1 : cfg.steer_runs;
        const SteeringOutcome so =
            steer_once_ensemble(control, x, y, steer, s, runs,
                                make_stream(cfg.seed, StreamPurpose::control, 0));
        if (s == 0.0) deterministic_gap = so.mean_final_gap;
        if (s > 0.0 && !has_positive_scale) {
            has_positive_scale = true;
            smallest_positive_hit = so.hit_fraction;
        }
        out.table.row().cell(std::string("steering")).cell(fmt_double(s)).cell(so.hit_fraction)
            .cell(so.mean_final_gap).cell(std::to_string(runs));
    }
    const bool pass = spectral && (!has_positive_scale || smallest_positive_hit > 0.0);
    out.summary = {{"experiment", "control"},
                   {"spectral_decay", spectral},
                   {"deterministic_final_gap", json_number(deterministic_gap)},
                   {"smallest_scale_hit_fraction", json_number(smallest_positive_hit)},
                   {"pass", pass}};
    out.one_liner = std::string("control: residual decay ") +
                    (spectral ? "spectral" : "NOT spectral") + ", deterministic gap " +
                    fmt_double(deterministic_gap);
    return out;
}

inline DriverOutput run_mixing_experiment(const RunConfig& cfg) {
    MixingConfig mc;
    mc.base = cfg.solver();
    mc.x0 = initial_state(cfg);
    mc.lags = cfg.lags.empty()
                  ? std::vector<double>{0.005, 0.01, 0.015, 0.02, 0.03, 0.04, 0.05,
                                        0.07, 0.1,  0.15,  0.25, 0.5,  1.0,  2.0}
                  : cfg.lags;
    mc.ensemble = cfg.ensemble;
    mc.reference_count = cfg.count;
    mc.observables = cfg.observables.empty()
                         ? std::vector<std::string>{"tanh2_mode1", "tanh_neg1_sq", "one"}
                         : cfg.observables;
    mc.threads = cfg.threads;
    const MixingReport rep = run_mixing(mc);

    DriverOutput out;
    out.table.columns = {"kind", "lag", "psi_id", "estimate", "se",
                         "reference", "reference_se", "gap", "gap_se"};
    for (const auto& r : rep.rows)
        out.table.row().cell(std::string("gap")).cell(r.lag).cell(r.psi).cell(r.estimate)
            .cell(r.se).cell(r.reference).cell(r.reference_se).cell(r.gap).cell(r.gap_se);
    for (std::size_t l = 0; l < rep.pair_lags.size(); ++l)
        out.table.row().cell(std::string("pair")).cell(rep.pair_lags[l]).cell(std::string(""))
            .cell(rep.pair_distances[l]).cell(std::string("")).cell(std::string(""))
            .cell(std::string("")).cell(std::string("")).cell(std::string(""));

    double one_gap = 0.0;
    for (const auto& r : rep.rows)
        if (r.psi == "one") one_gap = std::max(one_gap, r.gap);
    const double ci_low = rep.fitted_beta - 1.96 * rep.beta_se;
    const bool pass = rep.fit_points >= 3 && ci_low > 0.0 && rep.fit_r2 >= 0.9 && one_gap == 0.0;
    out.summary = {{"experiment", "mixing"},
                   {"fit_psi", rep.fit_psi},
                   {"fitted_beta", json_number(rep.fitted_beta)},
                   {"beta_se", json_number(rep.beta_se)},
                   {"beta_ci95_low", json_number(ci_low)},
                   {"fit_r2", json_number(rep.fit_r2)},
                   {"fit_points", rep.fit_points},
                   {"phi_one_gap", json_number(one_gap)},
                   {"pass", pass}};
    out.one_liner = "mixing: beta " + fmt_double(rep.fitted_beta) + " (ci low " +
                    fmt_double(ci_low) + "), r2 " + fmt_double(rep.fit_r2);
    return out;
}

inline DriverOutput run_energy_experiment(const RunConfig& cfg) {
    EnergyConfig ec;
    ec.base = cfg.solver();
    ec.reg_order = cfg.reg_order;
    ec.trajectories = cfg.replicates > 2 ? cfg.replicates : 200;
    ec.threads = cfg.threads;
    const EnergyResult res = run_energy(ec);

    DriverOutput out;
    out.table.columns = {"trajectory", "delta_q", "grad_term", "drift_term",
                         "martingale", "correction", "residual"};
    for (std::size_t r = 0; r < res.per_trajectory.size(); ++r) {
        const EnergyBreakdown& b = res.per_trajectory[r];
        out.table.row().cell(r).cell(b.delta_q).cell(b.grad_term).cell(b.drift_term)
            .cell(b.martingale).cell(b.correction).cell(b.residual());
    }
    const double z = res.residual.se > 0.0 ? res.residual.mean / res.residual.se : 0.0;
    const bool pass = std::abs(res.residual.mean) <= 3.0 * res.residual.se;
    out.summary = {{"experiment", "energy"},
                   {"trajectories", res.per_trajectory.size()},
                   {"trace", json_number(res.trace)},
                   {"residual_mean", json_number(res.residual.mean)},
                   {"residual_se", json_number(res.residual.se)},
                   {"z", json_number(z)},
                   {"pass", pass}};
    out.one_liner = "energy: mean residual " + fmt_double(res.residual.mean) + " (se " +
                    fmt_double(res.residual.se) + ")";
    return out;
}

inline nlohmann::json config_echo(const RunConfig& cfg) {
    return {{"experiment", cfg.experiment}, {"M", cfg.modes},     {"P", cfg.points},
            {"dt", cfg.dt},                 {"T", cfg.horizon},   {"burn_in", cfg.burn_in},
            {"lambda", cfg.lambda},         {"n", cfg.n},         {"c", cfg.mean_c},
            {"seed", cfg.seed},             {"threads", cfg.threads}, {"x0", cfg.x0}};
}

/// Runs one experiment and writes its artifacts. Returns the process exit
/// status: 0 on success, 3 when the integration blew up (diagnostics are
/// still written).
inline int run_experiment(const RunConfig& cfg, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    nlohmann::json meta = {{"config", config_echo(cfg)},
                           {"tool", "chcook"},
                           {"generated_at", std::chrono::duration_cast<std::chrono::seconds>(
                                                std::chrono::system_clock::now().time_since_epoch())
                                                .count()}};
    write_text(out_dir / "run.meta.json", meta.dump(2) + "\n");

    DriverOutput out;
    try {
        if (cfg.experiment == "simulate") out = run_simulate_experiment(cfg);
        else if (cfg.experiment == "sample-measure") out = run_sample_measure_experiment(cfg);
        else if (cfg.experiment == "invariant-convergence")
            out = run_invariant_convergence_experiment(cfg);
        else if (cfg.experiment == "reflection") out = run_reflection_experiment(cfg);
        else if (cfg.experiment == "semigroup") out = run_semigroup_experiment(cfg);
        else if (cfg.experiment == "strong-feller") out = run_strong_feller_experiment(cfg);
        else if (cfg.experiment == "control") out = run_control_experiment(cfg);
        else if (cfg.experiment == "mixing") out = run_mixing_experiment(cfg);
        else if (cfg.experiment == "energy") out = run_energy_experiment(cfg);
        else throw ConfigError("unknown experiment '" + cfg.experiment + "'");
    } catch (const NumericalBlowup& blowup) {
        Table diag;
        diag.columns = {"step_index", "steps_completed", "mean_drift", "overshoot", "drift_l1"};
        diag.row().cell(blowup.step_index).cell(blowup.diagnostics.steps)
            .cell(blowup.diagnostics.mean_drift).cell(blowup.diagnostics.overshoot)
            .cell(blowup.diagnostics.drift_l1);
        write_text(out_dir / (cfg.experiment + ".csv"), diag.to_csv());
        nlohmann::json summary = {{"experiment", cfg.experiment},
                                  {"error", "numerical blowup"},
                                  {"step_index", blowup.step_index},
                                  {"pass", false}};
        write_text(out_dir / (cfg.experiment + ".summary.json"), summary.dump(2) + "\n");
        std::cout << cfg.experiment << ": numerical blowup at step " << blowup.step_index
                  << "\n";
        return 3;
    }

    write_text(out_dir / (cfg.experiment + ".csv"), out.table.to_csv());
    write_text(out_dir / (cfg.experiment + ".summary.json"), out.summary.dump(2) + "\n");
    std::cout << out.one_liner << "\n";
    return out.summary.value("pass", true) ? 0 : 4;
}

}  // namespace chcook
