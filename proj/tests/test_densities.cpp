#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "vmcyl/densities.hpp"

using namespace vmcyl;

namespace {

Species electron_like(double amp = 0.8)
{
    return Species("e", 1.0, -1.0,
                   AnsatzFamily::product(amp, 4, 1.6, 0.0, std::pair{-0.9, 0.0},
                                         {-0.6, 0.6}));
}

Species ion_like(double amp = 0.5)
{
    return Species("i", 1.0, 1.0,
                   AnsatzFamily::product(amp, 4, 1.5, 0.0, std::pair{0.0, 0.7},
                                         {-0.5, 0.5}));
}

// Brute-force Cartesian momentum-space integration at x = (r, 0, 0):
//   4 pi q ∫ (1, v_hat_phi, v_hat_3) eta(E, F, G) dv
// by the midpoint rule on an n^3 grid covering the momentum support.
SourceTriple cartesian_oracle(const Species& sp, const SourcePoint& p, int n)
{
    const double m = sp.mass, q = sp.charge;
    const double V = 1.0001 * momentum_support(sp, p.a);
    REQUIRE(V > 0.0);
    const double h = 2.0 * V / double(n);
    double s1 = 0.0, s2 = 0.0, s3 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double v1 = -V + (double(i) + 0.5) * h;
        for (int j = 0; j < n; ++j) {
            const double v2 = -V + (double(j) + 0.5) * h;
            for (int k = 0; k < n; ++k) {
                const double v3 = -V + (double(k) + 0.5) * h;
                const double v0 = std::sqrt(m * m + v1 * v1 + v2 * v2 + v3 * v3);
                const double E = v0 + q * p.a;
                const double F = p.r * v2 + p.r * q * p.b;
                const double G = v3 + q * p.c;
                const double eta = sp.ansatz.value(E, F, G);
                if (eta == 0.0)
                    continue;
                s1 += eta;
                s2 += eta * v2 / v0;
                s3 += eta * v3 / v0;
            }
        }
    }
    const double cell = h * h * h, pref = 4.0 * M_PI * q;
    return {pref * s1 * cell, pref * s2 * cell, pref * s3 * cell};
}

} // namespace

TEST_CASE("quadrature spec validation")
{
    QuadratureSpec q;
    q.n_theta = 3;
    CHECK_THROWS_AS(q.validate(), std::invalid_argument);
    q = QuadratureSpec{};
    q.n_theta = 7;
    CHECK_THROWS_AS(q.validate(), std::invalid_argument);
    q = QuadratureSpec{};
    CHECK_NOTHROW(q.validate());
}

TEST_CASE("zero ansatz gives zero sources")
{
    Species z("z", 1.0, -1.0,
              AnsatzFamily::product(0.0, 4, 1.6, 0.0, std::nullopt, {-0.6, 0.6}));
    const QuadratureSpec quad;
    const SourceTriple t = scaled_sources(z, SourcePoint{0.5, 0.1, -0.2, 0.3}, quad);
    CHECK(t.rho == 0.0);
    CHECK(t.j_phi == 0.0);
    CHECK(t.j_z == 0.0);
}

TEST_CASE("azimuthal kernel cancels exactly for angle-independent ansatz")
{
    // no angular window: the sin(theta) weight integrates to zero and the
    // antisymmetric node table makes the trapezoid sum vanish bit-exactly
    Species sp("e", 1.0, -1.0,
               AnsatzFamily::product(0.7, 4, 1.6, 0.0, std::nullopt, {-0.6, 0.6}));
    const QuadratureSpec quad;
    for (double r : {0.0, 0.3, 0.9}) {
        const SourceTriple t = scaled_sources(sp, SourcePoint{r, 0.05, -0.3, 0.1}, quad);
        CHECK(std::abs(t.j_phi) <= 1e-12);
        CHECK(t.rho != 0.0);
    }
}

TEST_CASE("sources match the Cartesian momentum-space oracle")
{
    const Species sp = electron_like();
    const QuadratureSpec quad;
    const SourcePoint p{0.5, 0.02, -0.1, 0.01};
    const SourceTriple got = scaled_sources(sp, p, quad);
    const SourceTriple want = cartesian_oracle(sp, p, 220);
    const double scale = std::abs(want.rho);
    REQUIRE(scale > 0.0);
    CHECK(std::abs(got.rho - want.rho) / scale < 1e-4);
    CHECK(std::abs(got.j_phi - want.j_phi) / scale < 1e-4);
    CHECK(std::abs(got.j_z - want.j_z) / scale < 1e-4);
}

TEST_CASE("sources match the oracle at the axis and for positive charge")
{
    // a one-sided angular window vanishes identically on the axis (the
    // angular invariant is 0 there); use a straddling window instead
    Species sp("i", 1.0, 1.0,
               AnsatzFamily::product(0.5, 4, 1.5, 0.0, std::pair{-0.4, 0.7}, {-0.5, 0.5}));
    const QuadratureSpec quad;
    for (const SourcePoint& p :
         {SourcePoint{0.0, -0.03, 0.2, -0.02}, SourcePoint{0.85, 0.01, 0.15, 0.04}}) {
        const SourceTriple got = scaled_sources(sp, p, quad);
        const SourceTriple want = cartesian_oracle(sp, p, 200);
        const double scale = std::abs(want.rho);
        REQUIRE(scale > 0.0);
        CHECK(std::abs(got.rho - want.rho) / scale < 2e-4);
        CHECK(std::abs(got.j_phi - want.j_phi) / scale < 2e-4);
        CHECK(std::abs(got.j_z - want.j_z) / scale < 2e-4);
    }
}

TEST_CASE("doubling the quadrature orders stays within the guard")
{
    const std::vector<Species> species{electron_like(), ion_like()};
    const QuadratureSpec quad;
    const QuadratureSpec fine = quad.doubled();
    double worst = 0.0;
    for (const SourcePoint& p : {SourcePoint{0.2, 0.03, -0.05, 0.0},
                                 SourcePoint{0.6, -0.02, 0.1, 0.02},
                                 SourcePoint{0.95, 0.05, -0.2, -0.03}}) {
        const SourceTriple a = scaled_sources(species, p, quad);
        const SourceTriple b = scaled_sources(species, p, fine);
        worst = std::max({worst, std::abs(a.rho - b.rho), std::abs(a.j_phi - b.j_phi),
                          std::abs(a.j_z - b.j_z)});
    }
    CHECK(worst < quad.guard);
}

TEST_CASE("pointwise source bounds on a random sample")
{
    const std::vector<Species> species{electron_like(), ion_like()};
    const auto [c1, c2] = source_bound_constants(species, QuadratureSpec{});
    REQUIRE(c1 > 0.0);
    REQUIRE(c2 > 0.0);
    QuadratureSpec small;
    small.n_theta = 16;
    small.n_energy = 5;
    small.n_g = 6;
    small.energy_panels = 2;
    small.g_panels = 2;
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> ur(0.0, 1.0), ua(-0.3, 0.3), ub(-0.5, 0.5);
    for (int i = 0; i < 10000; ++i) {
        const SourcePoint p{ur(rng), ua(rng), ub(rng), ub(rng)};
        // |g_i| <= c1 + c2 |a| for the summed kernels
        const SourceTriple t = scaled_sources(species, p, small);
        const double bound = c1 + c2 * std::abs(p.a) + 1e-9;
        CHECK(std::abs(t.rho) <= bound);
        CHECK(std::abs(t.j_phi) <= bound);
        CHECK(std::abs(t.j_z) <= bound);
        // per-species currents are dominated by the charge kernel
        for (const Species& sp : species) {
            const SourceTriple s = scaled_sources(sp, p, small);
            const double mag = std::hypot(s.j_phi, s.j_z);
            CHECK(mag <= std::abs(s.rho) + 1e-9 * (1.0 + std::abs(s.rho)));
        }
    }
}

TEST_CASE("sources are continuous under input refinement")
{
    const Species sp = electron_like();
    QuadratureSpec quad;
    const SourcePoint base{0.5, 0.02, -0.1, 0.01};
    const SourceTriple t0 = scaled_sources(sp, base, quad);
    double prev_jump = 1e300;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
        SourcePoint p = base;
        p.a += eps;
        p.r += eps;
        const SourceTriple t = scaled_sources(sp, p, quad);
        const double jump = std::max({std::abs(t.rho - t0.rho), std::abs(t.j_phi - t0.j_phi),
                                      std::abs(t.j_z - t0.j_z)});
        CHECK(jump < prev_jump);
        prev_jump = jump;
    }
    CHECK(prev_jump < 1e-2);
}

TEST_CASE("bound constants: zero ansatz, linearity, and the 2-d oracle")
{
    const QuadratureSpec quad;
    {
        std::vector<Species> z{Species(
            "z", 1.0, -1.0, AnsatzFamily::product(0.0, 4, 1.6, 0.0, std::nullopt, {-0.6, 0.6}))};
        const auto [c1, c2] = source_bound_constants(z, quad);
        CHECK(c1 == 0.0);
        CHECK(c2 == 0.0);
    }
    {
        std::vector<Species> one{electron_like(0.4)};
        std::vector<Species> two{electron_like(0.8)};
        const auto [c1a, c2a] = source_bound_constants(one, quad);
        const auto [c1b, c2b] = source_bound_constants(two, quad);
        CHECK(c1b == doctest::Approx(2.0 * c1a).epsilon(1e-13));
        CHECK(c2b == doctest::Approx(2.0 * c2a).epsilon(1e-13));
    }
    {
        // dense midpoint-rule oracle over the majorant support
        const Species sp = electron_like();
        const auto [c1, c2] = source_bound_constants(std::vector<Species>{sp}, quad);
        const int n = 2000;
        const double e_lo = 0.0, e_hi = 1.6, g_lo = -0.6, g_hi = 0.6;
        const double he = (e_hi - e_lo) / n, hg = (g_hi - g_lo) / n;
        double mass = 0.0, mom = 0.0;
        for (int i = 0; i < n; ++i) {
            const double E = e_lo + (i + 0.5) * he;
            double line = 0.0;
            for (int j = 0; j < n; ++j) {
                const double G = g_lo + (j + 0.5) * hg;
                line += sp.ansatz.majorant(E, G);
            }
            mass += line * he * hg;
            mom += std::abs(E) * line * he * hg;
        }
        const double pref = 8.0 * M_PI * M_PI;
        CHECK(c1 == doctest::Approx(pref * mom).epsilon(1e-6));
        CHECK(c2 == doctest::Approx(pref * mass).epsilon(1e-6));
    }
}

TEST_CASE("momentum support bound")
{
    const Species sp = electron_like();
    // eta vanishes beyond the support radius: E = sqrt(m^2+|v|^2) + q a >= E0
    const double a = 0.1;
    const double S = momentum_support(sp, a);
    CHECK(S == doctest::Approx(std::sqrt(std::pow(1.6 + a, 2) - 1.0)).epsilon(1e-13));
}
