#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "vmcyl/fields.hpp"

using namespace vmcyl;

namespace {

std::vector<Species> two_species()
{
    return {Species("e", 1.0, -1.0,
                    AnsatzFamily::product(0.10, 4, 1.6, 0.0, std::pair{-0.7, 0.2},
                                          {-0.6, 0.4})),
            Species("i", 1.0, 1.0,
                    AnsatzFamily::product(0.07, 4, 1.5, 0.0, std::pair{-0.2, 0.6},
                                          {-0.45, 0.5}))};
}

} // namespace

TEST_CASE("zero state and zero external give zero fields")
{
    const auto grid = uniform_grid(1.0, 33);
    const PotentialState zero = PotentialState::zeros(grid);
    GridSources src;
    src.rho.assign(grid.size(), 0.0);
    src.j_phi.assign(grid.size(), 0.0);
    src.j_z.assign(grid.size(), 0.0);
    const FieldProfiles f = reconstruct_fields(zero, ExternalPotential{}, src);
    CHECK(sup_norm(f.e_r.values()) == 0.0);
    CHECK(sup_norm(f.b_phi.values()) == 0.0);
    CHECK(sup_norm(f.b_z.values()) == 0.0);
    CHECK(sup_norm(f.b_z_ext.values()) == 0.0);
    CHECK(sup_norm(f.rho.values()) == 0.0);
}

TEST_CASE("linear external azimuthal potential gives a constant axial field")
{
    // A_phi_ext = b r  =>  B_z_ext = (1/r)(r b r)' = 2 b at every radius
    const double b = -0.37;
    const auto grid = uniform_grid(1.0, 65);
    const PotentialState zero = PotentialState::zeros(grid);
    ExternalPotential ext;
    ext.a_phi = ExternalComponent::linear(b);
    GridSources src;
    src.rho.assign(grid.size(), 0.0);
    src.j_phi.assign(grid.size(), 0.0);
    src.j_z.assign(grid.size(), 0.0);
    const FieldProfiles f = reconstruct_fields(zero, ext, src);
    for (double v : f.b_z_ext.values())
        CHECK(v == doctest::Approx(2.0 * b).epsilon(1e-14));
}

TEST_CASE("manufactured quadratic potential has machine-zero residual")
{
    // sources chosen so that phi = -C r^2 / 4 is exact; the conservative
    // stencil differentiates quadratics without truncation error
    const double C = 1.3;
    const auto grid = uniform_grid(1.0, 129);
    GridSources src;
    src.rho.assign(grid.size(), C);
    src.j_phi.assign(grid.size(), 0.0);
    src.j_z.assign(grid.size(), 0.0);
    const PotentialState state = induced_potentials(grid, src);
    const FieldProfiles f = reconstruct_fields(state, ExternalPotential{}, src);
    const OdeResiduals res = ode_residuals(state, f);
    CHECK(res.phi <= 1e-10);
}

TEST_CASE("field equations residual falls at second order under refinement")
{
    const std::vector<Species> sp = two_species();
    const ExternalPotential ext;
    const QuadratureSpec quad;
    SolveOptions opt;
    opt.threads = 2;
    auto residual_at = [&](std::size_t n) {
        const SolveResult res = picard_solve(uniform_grid(1.0, n), sp, ext, quad, opt);
        const FieldProfiles f = reconstruct_fields(res.state, ext, sp, quad, 2);
        return ode_residuals(res.state, f);
    };
    const OdeResiduals r65 = residual_at(65);
    const OdeResiduals r129 = residual_at(129);
    for (auto [coarse, fine] : {std::pair{r65.phi, r129.phi},
                                std::pair{r65.a_phi, r129.a_phi},
                                std::pair{r65.a_z, r129.a_z}}) {
        const double order = std::log2(coarse / fine);
        CHECK(order > 1.5);
        CHECK(order < 2.6);
    }
}

TEST_CASE("divergence of the reconstructed vector potential vanishes")
{
    // A = A_phi(r) e_phi + A_z(r) e_3 has zero Cartesian divergence; check by
    // second-order finite differences on a 2-d patch away from the axis
    const auto grid = uniform_grid(1.0, 129);
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        v[i] = 0.1 * grid[i] * grid[i] - 0.04 * grid[i] * grid[i] * grid[i];
    PotentialState state = PotentialState::zeros(grid);
    state.a_phi = RadialProfile(grid, v);

    auto ax = [&](double x, double y) {
        const double r = std::hypot(x, y);
        return state.a_phi(r) * (-y / r);
    };
    auto ay = [&](double x, double y) {
        const double r = std::hypot(x, y);
        return state.a_phi(r) * (x / r);
    };
    const double h = 1e-4;
    double worst = 0.0;
    for (double x : {0.2, 0.4, 0.6})
        for (double y : {0.15, 0.35, 0.55}) {
            const double div = (ax(x + h, y) - ax(x - h, y)) / (2 * h) +
                               (ay(x, y + h) - ay(x, y - h)) / (2 * h);
            worst = std::max(worst, std::abs(div));
        }
    CHECK(worst < 1e-7); // h^2 scale with the profile's curvature
}

TEST_CASE("currents are dominated by the charge density per species")
{
    const std::vector<Species> sp = two_species();
    const auto grid = uniform_grid(1.0, 33);
    const QuadratureSpec quad;
    const ExternalPotential ext;
    for (const Species& one : sp) {
        std::vector<Species> lst{one};
        const SolveResult res = picard_solve(grid, lst, ext, quad);
        const FieldProfiles f = reconstruct_fields(res.state, ext, lst, quad);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double mag = std::hypot(f.j_phi.values()[i], f.j_z.values()[i]);
            CHECK(mag <= std::abs(f.rho.values()[i]) * (1.0 + 1e-9) + 1e-15);
        }
    }
}

TEST_CASE("vacuum extension: zero sources give constant tails")
{
    const auto grid = uniform_grid(1.0, 65);
    const PotentialState zero = PotentialState::zeros(grid);
    GridSources src;
    src.rho.assign(grid.size(), 0.0);
    src.j_phi.assign(grid.size(), 0.0);
    src.j_z.assign(grid.size(), 0.0);
    const FieldProfiles f = reconstruct_fields(zero, ExternalPotential{}, src);
    const VacuumExtension ext = extend_vacuum(zero, f, 0.7);
    CHECK(ext.charge_moment == 0.0);
    CHECK(ext.axial_current_moment == 0.0);
    CHECK(ext.azimuthal_current_moment == 0.0);
    CHECK(ext.phi_tail(1.0) == ext.phi_tail(3.0));
    CHECK(ext.a_z_tail(1.5) == ext.a_z_tail(2.5));
    CHECK(ext.a_phi_tail(2.0) == 0.0);
}

TEST_CASE("vacuum extension: moments match hand-computed values")
{
    // rho(s) = (1 - (s/R)^2)^4 inside R, zero outside (three continuous
    // derivatives at the support edge, which sits on a grid node):
    //   a = int_0^R s rho ds = R^2/10, c = int_0^R rho ds = 128 R / 315
    const double R = 0.7;
    const auto grid = uniform_grid(1.0, 561); // R lands on node 392
    std::vector<double> rho(grid.size(), 0.0), jphi(grid.size(), 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double s = grid[i];
        if (s < R) {
            const double t = 1.0 - (s / R) * (s / R);
            rho[i] = t * t * t * t;
            jphi[i] = rho[i];
        }
    }
    PotentialState state = PotentialState::zeros(grid);
    FieldProfiles f;
    f.rho = RadialProfile(grid, rho);
    f.j_phi = RadialProfile(grid, jphi);
    f.j_z = RadialProfile::zeros(grid);
    f.e_r = RadialProfile::zeros(grid);
    f.b_phi = RadialProfile::zeros(grid);
    f.b_z = RadialProfile::zeros(grid);
    f.b_phi_ext = RadialProfile::zeros(grid);
    f.b_z_ext = RadialProfile::zeros(grid);
    const VacuumExtension ext = extend_vacuum(state, f, R);
    CHECK(std::abs(ext.charge_moment - R * R / 10.0) <= 1e-10);
    CHECK(std::abs(ext.azimuthal_current_moment - 128.0 * R / 315.0) <= 1e-10);
}

TEST_CASE("vacuum extension rejects unconfined sources")
{
    const auto grid = uniform_grid(1.0, 65);
    const PotentialState zero = PotentialState::zeros(grid);
    FieldProfiles f;
    std::vector<double> rho(grid.size(), 0.3);
    f.rho = RadialProfile(grid, rho);
    f.j_phi = RadialProfile::zeros(grid);
    f.j_z = RadialProfile::zeros(grid);
    f.e_r = RadialProfile::zeros(grid);
    f.b_phi = RadialProfile::zeros(grid);
    f.b_z = RadialProfile::zeros(grid);
    f.b_phi_ext = RadialProfile::zeros(grid);
    f.b_z_ext = RadialProfile::zeros(grid);
    CHECK_THROWS_AS(extend_vacuum(zero, f, 0.7), std::domain_error);
}
