#include <cmath>
#include <vector>

#include "test_util.hpp"

#include "chcook/gaussian.hpp"

using namespace chcook;
using Catch::Approx;

namespace {

struct Moments {
    double mean = 0.0;
    double var = 0.0;
    std::size_t n = 0;
};

Moments moments(const std::vector<double>& v) {
    Moments m;
    m.n = v.size();
    for (double x : v) m.mean += x;
    m.mean /= static_cast<double>(v.size());
    for (double x : v) m.var += (x - m.mean) * (x - m.mean);
    m.var /= static_cast<double>(v.size() - 1);
    return m;
}

// three-standard-error band for a sample variance of a Gaussian
double var_3se(double sigma_sq, std::size_t n) {
    return 3.0 * sigma_sq * std::sqrt(2.0 / static_cast<double>(n - 1));
}

}  // namespace

TEST_CASE("counter stream is reproducible and splits cleanly") {
    NoiseStream a{42, 7, 0};
    NoiseStream b{42, 7, 0};
    const auto za = a.normals(11);
    const auto zb = b.normals(11);
    for (std::size_t i = 0; i < za.size(); ++i) CHECK(za[i] == zb[i]);

    SECTION("replay from a stored counter") {
        NoiseStream c{42, 7, 0};
        c.normals(6);  // consume three blocks
        const std::uint64_t mark = c.counter;
        const auto first = c.normals(4);
        NoiseStream d{42, 7, mark};
        const auto second = d.normals(4);
        for (std::size_t i = 0; i < first.size(); ++i) CHECK(first[i] == second[i]);
    }

    SECTION("distinct stream ids differ") {
        NoiseStream c{42, 8, 0};
        const auto zc = c.normals(11);
        bool all_equal = true;
        for (std::size_t i = 0; i < za.size(); ++i) all_equal = all_equal && za[i] == zc[i];
        CHECK_FALSE(all_equal);
    }

    SECTION("draws look standard normal") {
        NoiseStream s{1234, 0, 0};
        const auto z = s.normals(200000);
        const Moments m = moments(z);
        CHECK(std::abs(m.mean) < 3.0 / std::sqrt(static_cast<double>(m.n)));
        CHECK(std::abs(m.var - 1.0) < var_3se(1.0, m.n));
    }
}

TEST_CASE("conservative noise increment") {
    NoiseStream stream{7, 1, 0};
    const int modes = 6;

    SECTION("mean mode identically zero") {
        for (int k = 0; k < 50; ++k) {
            const SpectralField xi = noise_increment(stream, 0.01, modes);
            CHECK(xi[0] == 0.0);
        }
    }

    SECTION("mode-1 variance matches a_1 dt") {
        const std::size_t draws = 100000;
        std::vector<double> v(draws);
        for (std::size_t k = 0; k < draws; ++k) v[k] = noise_increment(stream, 0.01, modes)[1];
        const Moments m = moments(v);
        const double target = eigenvalue(1) * 0.01;
        CHECK(std::abs(m.var - target) < var_3se(target, draws));
    }

    CHECK_THROWS_AS(noise_increment(stream, 0.0, modes), std::invalid_argument);
}

TEST_CASE("stochastic convolution increment has the closed-form variance") {
    CHECK(convolution_variance(0, 0.5) == 0.0);

    SECTION("long-step limit is the stationary variance") {
        for (int i : {1, 2, 5}) {
            CHECK(convolution_variance(i, 1e6) == Approx(1.0 / eigenvalue(i)).epsilon(1e-12));
        }
    }

    SECTION("short-step limit matches the plain noise variance") {
        for (int i : {1, 2, 5}) {
            const double dt = 1e-12;
            CHECK(convolution_variance(i, dt) / dt ==
                  Approx(eigenvalue(i)).epsilon(1e-6));
        }
    }

    SECTION("sampled variance within Monte Carlo error") {
        NoiseStream stream{19, 2, 0};
        const double dt = 3e-4;
        const std::size_t draws = 100000;
        std::vector<double> v1(draws), v3(draws);
        for (std::size_t k = 0; k < draws; ++k) {
            const SpectralField xi = convolution_increment(stream, dt, 4);
            CHECK(xi[0] == 0.0);
            v1[k] = xi[1];
            v3[k] = xi[3];
        }
        for (auto [vals, mode] : {std::pair{&v1, 1}, std::pair{&v3, 3}}) {
            const Moments m = moments(*vals);
            const double target = convolution_variance(mode, dt);
            CHECK(std::abs(m.var - target) < var_3se(target, draws));
        }
    }
}

TEST_CASE("stationary Gaussian sampler") {
    NoiseStream stream{23, 3, 0};
    const int modes = 8;

    SECTION("mean coefficient is exact") {
        for (double c : {0.0, 0.5, -0.8}) {
            const SpectralField h = sample_mu_c(stream, c, modes);
            CHECK(h[0] == c);
        }
        CHECK_THROWS_AS(sample_mu_c(stream, 1.0, modes), std::invalid_argument);
    }

    SECTION("mode-2 variance is 1/(4 pi^2)") {
        const std::size_t draws = 100000;
        std::vector<double> v(draws);
        for (std::size_t k = 0; k < draws; ++k) v[k] = sample_mu_c(stream, 0.0, modes)[2];
        const Moments m = moments(v);
        const double target = 0.025330295910584442861;
        CHECK(std::abs(m.var - target) < var_3se(target, draws));
    }

    SECTION("cross-check against a random-walk bridge construction") {
        // Cumulative sums of independent N(0, 1/P) increments approximate a
        // Brownian path; recentering and analyzing on the grid must reproduce
        // the spectral mode variances.
        NoiseStream walk{77, 4, 0};
        const int points = 512;
        const std::size_t draws = 20000;
        std::vector<std::vector<double>> coeffs(4, std::vector<double>(draws));
        CosineTransform transform(4, points);
        GridField path(points);
        for (std::size_t k = 0; k < draws; ++k) {
            double acc = 0.0;
            const auto z = walk.normals(static_cast<std::size_t>(points));
            for (int j = 0; j < points; ++j) {
                acc += z[static_cast<std::size_t>(j)] / std::sqrt(static_cast<double>(points));
                path[j] = acc;
            }
            double mean = 0.0;
            for (int j = 0; j < points; ++j) mean += path[j];
            mean /= points;
            for (int j = 0; j < points; ++j) path[j] -= mean;
            const SpectralField h = transform.analyze(path);
            for (int i = 1; i <= 4; ++i) coeffs[static_cast<std::size_t>(i - 1)][k] = h[i];
        }
        for (int i = 1; i <= 4; ++i) {
            const Moments m = moments(coeffs[static_cast<std::size_t>(i - 1)]);
            const double target = 1.0 / eigenvalue(i);
            // the constant covariance shift of the walk is annihilated by the
            // mean-zero basis, so the grid bias is far below the MC band
            CHECK(std::abs(m.var - target) < var_3se(target, draws) + 1e-4);
        }
    }
}

TEST_CASE("one linear step is exact in distribution") {
    SECTION("deterministic part damps a single mode") {
        NoiseStream stream{31, 5, 0};
        const double dt = 1e-3;
        const SpectralField x = SpectralField::mode(1, 4);
        const SpectralField y = linear_solution_step(x, stream, dt);
        NoiseStream replay{31, 5, 0};
        const SpectralField xi = convolution_increment(replay, dt, 4);
        CHECK(y[1] == Approx(std::exp(-eigenvalue(1) * eigenvalue(1) * dt / 2.0) + xi[1]));
    }

    SECTION("mean constant along the flow") {
        NoiseStream stream{31, 6, 0};
        SpectralField x = SpectralField::constant(0.4, 6);
        for (int k = 0; k < 200; ++k) x = linear_solution_step(x, stream, 0.01);
        CHECK(x[0] == 0.4);
    }

    SECTION("iterating reaches the stationary mode variances") {
        NoiseStream stream{31, 7, 0};
        const double dt = 0.05;
        const std::size_t draws = 20000;
        SpectralField x(4);
        std::vector<double> v1(draws);
        for (std::size_t k = 0; k < 100; ++k) x = linear_solution_step(x, stream, dt);
        for (std::size_t k = 0; k < draws; ++k) {
            x = linear_solution_step(x, stream, dt);
            v1[k] = x[1];
        }
        const Moments m = moments(v1);
        const double target = 1.0 / eigenvalue(1);
        // mild serial correlation inflates the variance error a little
        CHECK(std::abs(m.var - target) < 1.5 * var_3se(target, draws));
    }
}
