#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "vmcyl/bounds.hpp"
#include "vmcyl/quadrature.hpp"

using namespace vmcyl;

TEST_CASE("envelope vanishes at the axis and rejects bad constants")
{
    EnvelopeBounds env(1.0, 1.0);
    CHECK(env.phi_bound(0.0) == 0.0);
    CHECK(env.a_phi_bound(0.0) == 0.0);
    CHECK_THROWS_AS(EnvelopeBounds(-1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(EnvelopeBounds(1.0, -2.0), std::invalid_argument);
}

TEST_CASE("second series coefficient is c1 c2 / 64")
{
    // the r^4 coefficient of the tight envelope
    const double c1 = 0.8, c2 = 1.7;
    EnvelopeBounds env(c1, c2, EnvelopeRule::series);
    const double r = 1e-2;
    const double quartic = env.phi_bound(r) - 0.25 * c1 * r * r;
    CHECK(quartic == doctest::Approx(c1 * c2 / 64.0 * std::pow(r, 4)).epsilon(1e-6));
}

TEST_CASE("leading relaxed-envelope term is c1 r^2 / 3")
{
    const double c1 = 2.0, c2 = 0.5;
    EnvelopeBounds env(c1, c2);
    const double r = 1e-4;
    CHECK(env.a_phi_bound(r) == doctest::Approx(c1 * r * r / 3.0).epsilon(1e-7));
}

TEST_CASE("series and bessel rules agree to 1e-12")
{
    for (auto [c1, c2] : {std::pair{1.0, 1.0}, {0.3, 2.0}, {2.0, 0.5}, {1e-3, 3.0},
                          {5.0, 1e-3}}) {
        EnvelopeBounds s(c1, c2, EnvelopeRule::series);
        EnvelopeBounds b(c1, c2, EnvelopeRule::bessel);
        for (int i = 0; i <= 100; ++i) {
            const double r = double(i) / 100.0;
            const double vs = s.phi_bound(r), vb = b.phi_bound(r);
            if (vs == 0.0)
                CHECK(vb == 0.0);
            else
                CHECK(std::abs(vs - vb) / vs < 1e-12);
        }
    }
}

TEST_CASE("relaxed envelope dominates the tight one")
{
    EnvelopeBounds env(1.3, 0.9);
    for (int i = 0; i <= 100; ++i) {
        const double r = double(i) / 100.0;
        CHECK(env.a_phi_bound(r) >= env.phi_bound(r));
    }
}

TEST_CASE("partial sums are nondecreasing in the order")
{
    EnvelopeBounds env(1.0, 2.0);
    const double r = 0.9;
    double prev = 0.0;
    for (int k = 0; k <= 12; ++k) {
        const double v = env.phi_bound_partial(r, k);
        CHECK(v >= prev);
        prev = v;
    }
    CHECK(prev == doctest::Approx(env.phi_bound_partial(r, 100)).epsilon(1e-12));
}

TEST_CASE("volterra march: zero kernel gives the quadratic forcing")
{
    const auto grid = uniform_grid(1.0, 257);
    const RadialProfile y = volterra_envelope(0.9, 0.0, grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK(y.values()[i] == doctest::Approx(0.225 * grid[i] * grid[i]).epsilon(1e-13));
}

TEST_CASE("volterra march agrees with the series solution")
{
    const auto grid = uniform_grid(1.0, 4097);
    const RadialProfile y = volterra_envelope(1.0, 1.0, grid);
    EnvelopeBounds env(1.0, 1.0);
    double worst = 0.0, scale = env.phi_bound(1.0);
    for (std::size_t i = 0; i < grid.size(); ++i)
        worst = std::max(worst, std::abs(y.values()[i] - env.phi_bound(grid[i])));
    CHECK(worst / scale < 1e-8);
    // monotone in r
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        CHECK(y.values()[i + 1] >= y.values()[i]);
}

TEST_CASE("envelope solves its own integral equation")
{
    const double c1 = 0.7, c2 = 1.4;
    EnvelopeBounds env(c1, c2);
    const auto grid = uniform_grid(1.0, 1025);
    RadialTransform tr(grid);
    std::vector<double> xi(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        xi[i] = env.phi_bound(grid[i]);
    const auto kernel = tr.log_kernel(xi);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double rhs = 0.25 * c1 * grid[i] * grid[i] + c2 * kernel[i];
        CHECK(std::abs(rhs - xi[i]) < 1e-10);
    }
}

TEST_CASE("comparison property: sub-solutions stay below the envelope")
{
    const double c1 = 1.1, c2 = 0.8;
    EnvelopeBounds env(c1, c2);
    const auto grid = uniform_grid(1.0, 513);
    RadialTransform tr(grid);
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(0.1, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        // p = lambda * envelope with lambda <= 1 satisfies the inequality
        const double lambda = u(rng);
        std::vector<double> p(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i)
            p[i] = lambda * env.phi_bound(grid[i]);
        const auto kernel = tr.log_kernel(p);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double rhs = 0.25 * c1 * grid[i] * grid[i] + c2 * kernel[i];
            REQUIRE(p[i] <= rhs + 1e-12); // inequality verified numerically
            CHECK(p[i] <= env.phi_bound(grid[i]) + 1e-12);
        }
    }
}

TEST_CASE("bessel series at reference points")
{
    CHECK(bessel_i0(0.0) == 1.0);
    // I0(1) and I0(3) reference values
    CHECK(bessel_i0(1.0) == doctest::Approx(1.2660658777520084).epsilon(1e-14));
    CHECK(bessel_i0(3.0) == doctest::Approx(4.8807925858650245).epsilon(1e-14));
}
