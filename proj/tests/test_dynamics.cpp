#include <cmath>

#include "test_util.hpp"

#include "chcook/dynamics.hpp"

using namespace chcook;
using Catch::Approx;

namespace {

SolverConfig base_config() {
    SolverConfig cfg;
    cfg.modes = 16;
    cfg.points = 64;
    cfg.dt = 1e-4;
    cfg.horizon = 0.01;
    cfg.pot.lambda = 0.0;
    cfg.pot.n = 2;
    cfg.mean_c = 0.0;
    cfg.master_seed = 5;
    return cfg;
}

}  // namespace

TEST_CASE("config validation") {
    SolverConfig cfg = base_config();
    CHECK_NOTHROW(cfg.validate());
    cfg.points = 16;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = base_config();
    cfg.dt = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

    SECTION("step-size guard warns but does not throw") {
        SolverConfig loose = base_config();
        loose.dt = 1.0;
        CHECK_FALSE(loose.warnings().empty());
        loose.dt = 1e-7;
        CHECK(loose.warnings().empty());
    }
}

TEST_CASE("linear limit of one step is the heat flow") {
    SolverConfig cfg = base_config();
    cfg.drift = DriftKind::none;
    cfg.noise_scale = 0.0;
    Stepper stepper(cfg);
    NoiseStream stream{1, 1, 0};
    const SpectralField x = testutil::random_field(11, cfg.modes, 0.2);
    const SpectralField y = stepper.step(x, stream);
    const SpectralField expected = heat_semigroup(x, cfg.dt);
    CHECK(testutil::max_coeff_diff(y, expected) < 1e-15);
}

TEST_CASE("mean coefficient is conserved exactly") {
    SolverConfig cfg = base_config();
    cfg.mean_c = 0.3;
    cfg.pot.lambda = 1.0;
    cfg.horizon = 1.0;  // 10^4 steps
    NoiseStream stream{9, 2, 0};
    const SimulationResult sim =
        simulate(SpectralField::constant(cfg.mean_c, cfg.modes), cfg, stream);
    CHECK(sim.diagnostics.mean_drift == 0.0);
    CHECK(sim.final_state.mean() == cfg.mean_c);
}

TEST_CASE("simulation is deterministic and honors T = 0") {
    SolverConfig cfg = base_config();
    cfg.horizon = 0.02;
    const SpectralField x = testutil::random_field(3, cfg.modes, 0.1);

    NoiseStream s1{21, 4, 0}, s2{21, 4, 0};
    const SimulationResult a = simulate(x, cfg, s1);
    const SimulationResult b = simulate(x, cfg, s2);
    CHECK(testutil::max_coeff_diff(a.final_state, b.final_state) == 0.0);

    cfg.horizon = 0.0;
    NoiseStream s3{21, 4, 0};
    const SimulationResult c = simulate(x, cfg, s3);
    CHECK(testutil::max_coeff_diff(c.final_state, x) == 0.0);
    CHECK(c.diagnostics.steps == 0);
}

TEST_CASE("snapshot recording cadence") {
    SolverConfig cfg = base_config();
    cfg.horizon = 10 * cfg.dt;
    RecordOptions rec;
    rec.every = 2;
    NoiseStream stream{33, 5, 0};
    const SimulationResult sim =
        simulate(SpectralField::constant(0.0, cfg.modes), cfg, stream, rec);
    REQUIRE(sim.trajectory.states.size() == 6);  // t = 0 plus five snapshots
    CHECK(sim.trajectory.times.front() == 0.0);
    CHECK(sim.trajectory.times.back() == Approx(cfg.horizon));
}

TEST_CASE("strong self-convergence under a shared Brownian path") {
    // The convolution increment over a coarse step composes exactly from the
    // two increments of the half steps: xi = e^{-A^2 dt/2} xi_1 + xi_2.
    SolverConfig fine = base_config();
    fine.horizon = 0.05;
    const SpectralField x0 = testutil::random_field(17, fine.modes, 0.1);

    auto coupled_error = [&](double dt_coarse, std::uint64_t path) {
        SolverConfig cf = fine;
        cf.dt = dt_coarse / 2.0;
        SolverConfig cc = fine;
        cc.dt = dt_coarse;
        Stepper sf(cf), sc(cc);
        NoiseStream stream{55, path, 0};
        SpectralField xf = x0, xc = x0;
        const auto steps = static_cast<std::size_t>(std::llround(fine.horizon / dt_coarse));
        for (std::size_t k = 0; k < steps; ++k) {
            const SpectralField xi1 = sf.draw_noise(stream);
            xf = sf.apply(xf, xi1);
            const SpectralField xi2 = sf.draw_noise(stream);
            xf = sf.apply(xf, xi2);
            SpectralField eta = heat_semigroup(xi1, cf.dt);
            for (int i = 1; i <= cc.modes; ++i) eta[i] += xi2[i];
            xc = sc.apply(xc, eta);
        }
        return seminorm(xf - xc, -1.0);
    };

    auto rms_error = [&](double dt_coarse) {
        const std::size_t paths = 16;
        double acc = 0.0;
        for (std::size_t p = 0; p < paths; ++p) {
            const double e = coupled_error(dt_coarse, 600 + p);
            acc += e * e;
        }
        return std::sqrt(acc / static_cast<double>(paths));
    };

    const double e1 = rms_error(8e-4);
    const double e2 = rms_error(2e-4);
    const double e3 = rms_error(5e-5);
    const double order12 = std::log2(e1 / e2) / 2.0;  // dt quarters per level
    const double order23 = std::log2(e2 / e3) / 2.0;
    INFO("errors " << e1 << " " << e2 << " " << e3);
    CHECK(order12 >= 0.5);
    CHECK(order23 >= 0.5);
    CHECK(e3 < e1);
}

TEST_CASE("shared-noise pairs contract") {
    SolverConfig cfg = base_config();
    cfg.horizon = 0.2;
    const SpectralField x = testutil::random_field(41, cfg.modes, 0.1);
    SpectralField y = testutil::random_field(42, cfg.modes, 0.1);

    SECTION("identical starts stay identical") {
        NoiseStream stream{3, 7, 0};
        const PairResult pr = simulate_pair(x, x, cfg, stream, true);
        for (double d : pr.distances) CHECK(d == 0.0);
    }

    SECTION("monotone distance decay for lambda = 0") {
        NoiseStream stream{3, 8, 0};
        const PairResult pr = simulate_pair(x, y, cfg, stream, true);
        for (std::size_t k = 1; k < pr.distances.size(); ++k)
            CHECK(pr.distances[k] <= pr.distances[k - 1] + 1e-10);
        CHECK(pr.distances.back() < pr.distances.front());
    }

    SECTION("exponential envelope for lambda = 1") {
        SolverConfig drift = cfg;
        drift.pot.lambda = 1.0;
        drift.horizon = 1.0;
        NoiseStream stream{3, 9, 0};
        const PairResult pr = simulate_pair(x, y, drift, stream, true);
        for (std::size_t k = 0; k < pr.distances.size(); ++k) {
            const double bound =
                std::exp(drift.pot.lambda * pr.times[k]) * pr.distances.front() * 1.01;
            CHECK(pr.distances[k] <= bound);
        }
    }

    SECTION("mismatched means are rejected") {
        SpectralField z = x;
        z[0] += 0.5;
        NoiseStream stream{3, 10, 0};
        CHECK_THROWS_AS(simulate_pair(x, z, cfg, stream, true), std::invalid_argument);
    }
}

TEST_CASE("divergent configurations raise a blowup with the step index") {
    SolverConfig cfg = base_config();
    cfg.pot.n = 6;
    cfg.dt = 0.05;
    cfg.horizon = 5.0;
    cfg.noise_scale = 0.0;
    SpectralField x = SpectralField::constant(0.0, cfg.modes);
    x[1] = 3.0;  // far outside the well, explicit drift overshoots
    NoiseStream stream{70, 11, 0};
    CHECK(!cfg.warnings().empty());
    try {
        simulate(x, cfg, stream);
        FAIL("expected NumericalBlowup");
    } catch (const NumericalBlowup& e) {
        CHECK(e.step_index < 50);
    }
}

TEST_CASE("linear chain reproduces the stationary covariance") {
    SolverConfig cfg = base_config();
    cfg.drift = DriftKind::none;
    cfg.dt = 0.1;  // exact in distribution at any step size
    cfg.horizon = 0.0;
    Stepper stepper(cfg);
    NoiseStream stream{81, 12, 0};
    SpectralField x = SpectralField::constant(0.0, cfg.modes);
    for (int k = 0; k < 20; ++k) x = stepper.step(x, stream);
    const std::size_t draws = 20000;
    std::vector<double> m1(draws), m4(draws);
    for (std::size_t k = 0; k < draws; ++k) {
        x = stepper.step(x, stream);
        m1[k] = x[1];
        m4[k] = x[4];
    }
    auto variance = [](const std::vector<double>& v) {
        double mean = 0.0;
        for (double z : v) mean += z;
        mean /= static_cast<double>(v.size());
        double acc = 0.0;
        for (double z : v) acc += (z - mean) * (z - mean);
        return acc / static_cast<double>(v.size() - 1);
    };
    for (auto [vals, mode] : {std::pair{&m1, 1}, std::pair{&m4, 4}}) {
        const double target = 1.0 / eigenvalue(mode);
        const double band = 3.0 * target * std::sqrt(2.0 / static_cast<double>(draws - 1));
        CHECK(std::abs(variance(*vals) - target) < 1.5 * band);
    }
}

TEST_CASE("refining the grid converges to one trajectory under fixed noise") {
    // Same truncation, same increments; only the dealiasing grid differs.
    SolverConfig ref = base_config();
    ref.horizon = 0.05;
    ref.points = 512;
    NoiseStream stream{90, 13, 0};
    const SpectralField x0 = testutil::random_field(91, ref.modes, 0.2);
    const SimulationResult reference = simulate(x0, ref, stream);

    double prev = std::numeric_limits<double>::infinity();
    for (int points : {36, 72, 144}) {
        SolverConfig cfg = ref;
        cfg.points = points;
        NoiseStream replay{90, 13, 0};
        const SimulationResult sim = simulate(x0, cfg, replay);
        const double err = seminorm(sim.final_state - reference.final_state, -1.0);
        CHECK(err < prev);
        prev = err;
    }
    CHECK(prev < 1e-8);
}

TEST_CASE("regularized energy bookkeeping") {
    CHECK(regularized_trace(2) == Approx(1.25));
    CHECK(regularized_trace(4) == Approx(1.875));

    SECTION("deterministic linear balance closes as the step refines") {
        const SpectralField x0 = testutil::random_field(7, 16, 0.0);
        auto residual_at = [&](double dt) {
            SolverConfig cfg = base_config();
            cfg.drift = DriftKind::none;
            cfg.noise_scale = 0.0;
            cfg.dt = dt;
            cfg.horizon = 0.05;
            NoiseStream stream{99, 14, 0};
            RecordOptions rec;
            rec.with_noise = true;
            const SimulationResult sim = simulate(x0, cfg, stream, rec);
            const EnergyBreakdown b = energy_check(sim.trajectory, cfg, 4).front();
            CHECK(b.martingale == 0.0);
            CHECK(b.correction == 0.0);
            return std::abs(b.residual());
        };
        const double r1 = residual_at(1e-3);
        const double r2 = residual_at(5e-4);
        const double r3 = residual_at(2.5e-4);
        INFO("residuals " << r1 << " " << r2 << " " << r3);
        CHECK(r1 < 1e-3);
        CHECK(r2 < 0.75 * r1);
        CHECK(r3 < 0.75 * r2);
    }

    SECTION("stationary noisy runs balance within Monte Carlo error") {
        SolverConfig cfg = base_config();
        cfg.dt = 2e-5;
        cfg.burn_in = 0.02;
        cfg.horizon = 0.02;
        std::vector<double> residuals;
        for (std::uint64_t r = 0; r < 60; ++r) {
            NoiseStream stream{101, 1000 + r, 0};
            RecordOptions rec;
            rec.with_noise = true;
            const SimulationResult sim =
                simulate(SpectralField::constant(0.0, cfg.modes), cfg, stream, rec);
            residuals.push_back(energy_check(sim.trajectory, cfg, 4).front().residual());
        }
        double mean = 0.0;
        for (double v : residuals) mean += v;
        mean /= static_cast<double>(residuals.size());
        double var = 0.0;
        for (double v : residuals) var += (v - mean) * (v - mean);
        const double se =
            std::sqrt(var / static_cast<double>(residuals.size() - 1) /
                      static_cast<double>(residuals.size()));
        INFO("mean " << mean << " se " << se);
        CHECK(std::abs(mean) <= 3.0 * se);
    }

    SECTION("windowed residuals partition the run") {
        SolverConfig cfg = base_config();
        cfg.dt = 1e-4;
        cfg.horizon = 0.01;
        NoiseStream stream{103, 15, 0};
        RecordOptions rec;
        rec.with_noise = true;
        const SimulationResult sim =
            simulate(SpectralField::constant(0.0, cfg.modes), cfg, stream, rec);
        const auto whole = energy_check(sim.trajectory, cfg, 4);
        const auto windows = energy_check(sim.trajectory, cfg, 4, 25);
        REQUIRE(whole.size() == 1);
        REQUIRE(windows.size() == 4);
        double acc = 0.0;
        for (const auto& w : windows) acc += w.residual();
        // interior delta_q terms telescope
        CHECK(acc == Approx(whole.front().residual()).margin(1e-12));
    }
}

TEST_CASE("drift mass diagnostics") {
    SolverConfig cfg = base_config();
    cfg.horizon = 0.01;
    RecordOptions rec;
    rec.every = 1;

    SECTION("zero for the disabled drift") {
        SolverConfig off = cfg;
        off.drift = DriftKind::none;
        NoiseStream stream{111, 16, 0};
        const SimulationResult sim =
            simulate(SpectralField::constant(0.0, off.modes), off, stream, rec);
        CHECK(sim.diagnostics.drift_l1 == 0.0);
        CHECK(drift_l1_mass(sim.trajectory, off) == 0.0);
    }

    SECTION("nonnegative and consistent with the running diagnostic") {
        NoiseStream stream{111, 17, 0};
        const SimulationResult sim =
            simulate(SpectralField::constant(0.0, cfg.modes), cfg, stream, rec);
        const double mass = drift_l1_mass(sim.trajectory, cfg);
        CHECK(mass >= 0.0);
        // left-point quadrature over stored states should track the in-step sum
        CHECK(mass == Approx(sim.diagnostics.drift_l1).epsilon(0.05).margin(1e-6));
    }
}
