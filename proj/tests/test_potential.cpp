#include <cmath>
#include <limits>

#include "test_util.hpp"

#include "chcook/potential.hpp"

using namespace chcook;
using Catch::Approx;

namespace {
PotentialSpec spec_with(double lambda, int n) {
    PotentialSpec s;
    s.lambda = lambda;
    s.n = n;
    return s;
}
}  // namespace

TEST_CASE("logarithmic drift values") {
    const PotentialSpec s0 = spec_with(0.0, 0);
    CHECK(f_log(0.0, s0) == 0.0);
    CHECK(f_log(0.5, s0) == Approx(-1.0986122886681096914).epsilon(1e-15));
    const PotentialSpec s2 = spec_with(2.0, 0);
    CHECK(f_log(-0.5, s2) == Approx(0.098612288668109691395).epsilon(1e-12));

    SECTION("odd for every lambda") {
        const PotentialSpec s = spec_with(1.7, 0);
        for (double x : {0.1, 0.35, 0.8, 0.99}) {
            CHECK(f_log(-x, s) == Approx(-f_log(x, s)).epsilon(1e-13));
        }
    }

    SECTION("singular input handling") {
        CHECK_THROWS_AS(f_log(1.0, s0), SingularInput);
        CHECK_THROWS_AS(f_log(-1.2, s0), SingularInput);
        PotentialSpec clipped = s0;
        clipped.clip = true;
        CHECK(std::isfinite(f_log(1.0, clipped)));
        CHECK(f_log(1.5, clipped) == f_log(1.0, clipped));
    }
}

TEST_CASE("double-well potential with logarithmic walls") {
    const PotentialSpec s0 = spec_with(0.0, 0);
    CHECK(big_f(0.0, s0) == 0.0);
    CHECK(big_f(1.0, s0) == Approx(1.3862943611198906188).epsilon(1e-15));
    CHECK(big_f(-1.0, s0) == Approx(big_f(1.0, s0)));
    CHECK_THROWS_AS(big_f(1.0001, s0), SingularInput);

    SECTION("even, with F' = -f on the interior") {
        const PotentialSpec s = spec_with(1.3, 0);
        for (double x : {0.05, 0.3, 0.6, 0.9}) {
            CHECK(big_f(x, s) == Approx(big_f(-x, s)).epsilon(1e-14));
            const double h = 1e-6;
            const double fd = (big_f(x + h, s) - big_f(x - h, s)) / (2.0 * h);
            CHECK(fd == Approx(-f_log(x, s)).margin(1e-7));
        }
    }

    SECTION("F + (lambda/2) x^2 is nonnegative on [-1,1]") {
        const PotentialSpec s = spec_with(2.5, 0);
        for (int j = 0; j <= 100; ++j) {
            const double x = -1.0 + 0.02 * j;
            CHECK(big_f(x, s) + 0.5 * s.lambda * x * x >= -1e-15);
        }
    }
}

TEST_CASE("polynomial truncations of the drift") {
    CHECK(f_n(0.0, spec_with(0.0, 3)) == 0.0);
    CHECK(f_n(1.0, spec_with(0.0, 1)) == Approx(-8.0 / 3.0).epsilon(1e-15));
    CHECK(f_n(0.5, spec_with(0.0, 50)) ==
          Approx(-1.0986122886681096914).margin(1e-15));

    SECTION("antiderivative pairing") {
        CHECK(big_f_n(0.0, spec_with(0.0, 2)) == 0.0);
        CHECK(big_f_n(1.0, spec_with(0.0, 0)) == Approx(1.0).epsilon(1e-15));
        const PotentialSpec s = spec_with(0.8, 4);
        for (double x : {0.2, 0.7, 1.1, -0.9}) {
            const double h = 1e-6;
            const double fd = (big_f_n(x + h, s) - big_f_n(x - h, s)) / (2.0 * h);
            CHECK(fd == Approx(-f_n(x, s)).margin(1e-7));
        }
    }

    SECTION("tail envelope on a grid of the open interval") {
        for (int n : {1, 3, 8, 20}) {
            const PotentialSpec s = spec_with(0.0, n);
            for (int j = 1; j < 40; ++j) {
                const double x = -0.975 + 0.05 * j;
                if (x == 0.0) continue;
                const double gap = std::abs(f_n(x, s) - f_log(x, s));
                CHECK(gap <= series_tail_bound(x, n) + 1e-14);
            }
        }
    }

    SECTION("drift minus the linear part is nonincreasing") {
        for (int n : {0, 2, 7}) {
            const PotentialSpec s = spec_with(1.9, n);
            double prev = std::numeric_limits<double>::infinity();
            for (int j = 0; j <= 200; ++j) {
                const double x = -2.0 + 0.02 * j;
                const double v = f_n(x, s) - s.lambda * x;
                CHECK(v <= prev + 1e-12);
                prev = v;
            }
        }
        // same monotonicity for the singular drift on its domain
        const PotentialSpec s = spec_with(1.9, 0);
        double prev = std::numeric_limits<double>::infinity();
        for (int j = 1; j < 100; ++j) {
            const double x = -1.0 + 0.02 * j;
            const double v = f_log(x, s) - s.lambda * x;
            CHECK(v <= prev + 1e-12);
            prev = v;
        }
    }

    SECTION("shifted truncated potential stays within [0, 2 ln 2] on [-1,1]") {
        // The dominated-convergence envelope: 0 <= F_n + (lambda/2) x^2 <= 2 ln 2.
        const double two_ln2 = 1.3862943611198906188;
        for (int n : {0, 1, 5, 25}) {
            const PotentialSpec s = spec_with(1.2, n);
            for (int j = 0; j <= 80; ++j) {
                const double x = -1.0 + 0.025 * j;
                const double shifted = big_f_n(x, s) + 0.5 * s.lambda * x * x;
                CHECK(shifted >= -1e-15);
                CHECK(shifted <= two_ln2 + 1e-12);
            }
        }
    }
}

TEST_CASE("Lipschitz surrogate of the singular drift") {
    PotentialSpec s = spec_with(0.7, 0);
    s.delta = 0.5;
    CHECK(f_lip(0.0, s) == 0.0);

    SECTION("exact inside the window") {
        for (double x : {0.1, -0.4, 0.74, -0.75}) {
            CHECK(f_lip(x, s) == f_log(x, s));
        }
    }

    SECTION("linear continuation outside") {
        const double xw = 1.0 - 0.25;
        const double slope = s.lambda - 2.0 / (1.0 - xw * xw);
        const double expected = f_log(xw, s) + slope * (2.0 - xw);
        CHECK(f_lip(2.0, s) == Approx(expected).epsilon(1e-13));
        CHECK(f_lip(-2.0, s) == Approx(-expected).epsilon(1e-13));
    }

    SECTION("global Lipschitz bound holds on a wide grid") {
        const double lip = f_lip_constant(s);
        double prev_x = -3.0, prev_v = f_lip(-3.0, s);
        for (int j = 1; j <= 600; ++j) {
            const double x = -3.0 + 0.01 * j;
            const double v = f_lip(x, s);
            CHECK(std::abs(v - prev_v) <= lip * (x - prev_x) * (1.0 + 1e-10) + 1e-12);
            prev_x = x;
            prev_v = v;
        }
    }
}

TEST_CASE("integrated potentials over grids") {
    const PotentialSpec s0 = spec_with(0.0, 0);

    GridField zero(16);
    CHECK(potential_u(zero, s0, PotentialKind::log_singular) == 0.0);
    CHECK(potential_u(zero, s0, PotentialKind::polynomial) == 0.0);

    GridField half(16);
    for (int j = 0; j < 16; ++j) half[j] = 0.5;
    CHECK(potential_u(half, s0, PotentialKind::log_singular) ==
          Approx(0.26162407188227391826).epsilon(1e-14));

    GridField outside(16);
    for (int j = 0; j < 16; ++j) outside[j] = 1.2;
    CHECK(std::isinf(potential_u(outside, s0, PotentialKind::log_singular)));
    CHECK(std::isfinite(potential_u(outside, s0, PotentialKind::polynomial)));

    SECTION("spectral overload agrees with the grid form") {
        const SpectralField h = testutil::random_field(3, 6, 0.2);
        const double a = potential_u(h, 32, s0, PotentialKind::polynomial);
        const double b = potential_u(synthesize(h, 32), s0, PotentialKind::polynomial);
        CHECK(a == Approx(b));
    }
}

TEST_CASE("temperature form of the nonlinearity") {
    CHECK(map_psi(0.0, 2.0, 1.0) == 0.0);
    CHECK(map_psi(0.5, 2.0, 1.0) == Approx(0.5986122886681096914).epsilon(1e-14));
    CHECK_THROWS_AS(map_psi(1.0, 2.0, 1.0), SingularInput);
    CHECK_THROWS_AS(map_psi(0.5, 0.0, 1.0), std::invalid_argument);

    SECTION("matches -(theta/2) f with the induced linear coefficient") {
        const double theta = 1.4, theta_c = 2.3;
        PotentialSpec s = spec_with(2.0 * theta_c / theta, 0);
        for (double u : {0.05, 0.4, 0.77, -0.6}) {
            CHECK(map_psi(u, theta, theta_c) ==
                  Approx(-0.5 * theta * f_log(u, s)).epsilon(1e-12).margin(1e-14));
        }
    }
}
