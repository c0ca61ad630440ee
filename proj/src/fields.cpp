#include "vmcyl/fields.hpp"

#include <cmath>
#include <stdexcept>

#include "vmcyl/quadrature.hpp"

namespace vmcyl {

FieldProfiles reconstruct_fields(const PotentialState& state, const ExternalPotential& ext,
                                 std::span<const Species> species, const QuadratureSpec& quad,
                                 int threads)
{
    return reconstruct_fields(state, ext, sources_on_grid(state, species, ext, quad, threads));
}

FieldProfiles reconstruct_fields(const PotentialState& state, const ExternalPotential& ext,
                                 const GridSources& src)
{
    const std::vector<double>& grid = state.grid();
    const std::size_t n = grid.size();
    std::vector<double> er(n), bphi(n), bz(n), bphi_e(n), bz_e(n), rho(n), jphi(n), jz(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = grid[i];
        er[i] = -state.phi.slopes()[i];
        bphi[i] = -state.a_z.slopes()[i];
        bz[i] = (i == 0) ? 2.0 * state.a_phi.slopes()[0]
                         : state.a_phi.slopes()[i] + state.a_phi.values()[i] / r;
        bphi_e[i] = -ext.a_z.derivative(r);
        bz_e[i] = (i == 0) ? 2.0 * ext.a_phi.derivative(0.0)
                           : ext.a_phi.derivative(r) + ext.a_phi.value(r) / r;
        const double inv4pi = 1.0 / (4.0 * M_PI);
        rho[i] = src.rho[i] * inv4pi;
        jphi[i] = src.j_phi[i] * inv4pi;
        jz[i] = src.j_z[i] * inv4pi;
    }
    FieldProfiles out;
    out.e_r = RadialProfile(grid, std::move(er));
    out.b_phi = RadialProfile(grid, std::move(bphi));
    out.b_z = RadialProfile(grid, std::move(bz));
    out.b_phi_ext = RadialProfile(grid, std::move(bphi_e));
    out.b_z_ext = RadialProfile(grid, std::move(bz_e));
    out.rho = RadialProfile(grid, std::move(rho));
    out.j_phi = RadialProfile(grid, std::move(jphi));
    out.j_z = RadialProfile(grid, std::move(jz));
    return out;
}

OdeResiduals ode_residuals(const PotentialState& state, const FieldProfiles& fields,
                           double interior_margin)
{
    const std::vector<double>& grid = state.grid();
    const std::size_t n = grid.size();
    if (n < 5)
        throw std::invalid_argument("ode_residuals: grid too small");
    const double h = grid[1] - grid[0];
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (std::abs(grid[i + 1] - grid[i] - h) > 1e-10 * h)
            throw std::invalid_argument("ode_residuals: uniform grid required");
    const double R0 = grid.back();
    const double r_lo = interior_margin * R0;

    OdeResiduals res;
    res.interior_margin = interior_margin;
    const std::vector<double>& phi = state.phi.values();
    const std::vector<double>& aphi = state.a_phi.values();
    const std::vector<double>& az = state.a_z.values();
    const double fourpi = 4.0 * M_PI;

    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double r = grid[i];
        if (r < r_lo)
            continue;
        const double rp = r + 0.5 * h, rm = r - 0.5 * h;
        // -(1/r)(r u')' = s, conservative second-order stencil
        const double lap_phi =
            (rp * (phi[i + 1] - phi[i]) - rm * (phi[i] - phi[i - 1])) / (h * h * r);
        const double lap_az =
            (az[i + 1] * rp - az[i] * (rp + rm) + az[i - 1] * rm) / (h * h * r);
        res.phi = std::max(res.phi, std::abs(-lap_phi - fourpi * fields.rho.values()[i]));
        res.a_z = std::max(res.a_z, std::abs(-lap_az - fourpi * fields.j_z.values()[i]));
        // -((1/r)(r A_phi)')' = s via midpoint values of (1/r)(r A_phi)'
        const double bzp = (grid[i + 1] * aphi[i + 1] - r * aphi[i]) / (h * rp);
        const double bzm = (r * aphi[i] - grid[i - 1] * aphi[i - 1]) / (h * rm);
        res.a_phi =
            std::max(res.a_phi, std::abs(-(bzp - bzm) / h - fourpi * fields.j_phi.values()[i]));
    }
    return res;
}

double VacuumExtension::phi_tail(double r) const
{
    return -4.0 * M_PI * charge_moment * std::log(r) + phi_const;
}

double VacuumExtension::a_z_tail(double r) const
{
    return -4.0 * M_PI * axial_current_moment * std::log(r) + a_z_const;
}

double VacuumExtension::a_phi_tail(double r) const
{
    return -2.0 * M_PI * azimuthal_current_moment * r + a_phi_inverse / r;
}

VacuumExtension extend_vacuum(const PotentialState& state, const FieldProfiles& fields,
                              double confinement_radius, double density_floor)
{
    const std::vector<double>& grid = state.grid();
    const double R0 = grid.back();
    const double R = confinement_radius;
    if (!(R > 0.0) || R > R0)
        throw std::invalid_argument("extend_vacuum: confinement radius outside (0, R0]");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] < R * (1.0 - 1e-12))
            continue;
        const double worst = std::max({std::abs(fields.rho.values()[i]),
                                       std::abs(fields.j_phi.values()[i]),
                                       std::abs(fields.j_z.values()[i])});
        if (worst > density_floor)
            throw std::domain_error(
                "extend_vacuum: sources do not vanish beyond the confinement radius (|s| = " +
                std::to_string(worst) + " at r = " + std::to_string(grid[i]) + ")");
    }

    RadialTransform tr(grid);
    VacuumExtension ext;
    ext.base_radius = R0;
    ext.charge_moment = tr.moment_to(fields.rho.values(), 1, R);
    ext.axial_current_moment = tr.moment_to(fields.j_z.values(), 1, R);
    ext.azimuthal_current_moment = tr.moment_to(fields.j_phi.values(), 0, R);

    const double a = ext.charge_moment, b = ext.axial_current_moment,
                 c = ext.azimuthal_current_moment;
    ext.phi_const = state.phi.values().back() + 4.0 * M_PI * a * std::log(R0);
    ext.a_z_const = state.a_z.values().back() + 4.0 * M_PI * b * std::log(R0);
    ext.a_phi_inverse = R0 * state.a_phi.values().back() + 2.0 * M_PI * c * R0 * R0;

    ext.phi_value_jump = std::abs(ext.phi_tail(R0) - state.phi.values().back());
    ext.a_z_value_jump = std::abs(ext.a_z_tail(R0) - state.a_z.values().back());
    ext.a_phi_value_jump = std::abs(ext.a_phi_tail(R0) - state.a_phi.values().back());

    // interior derivatives at R0 from the integral representation, matched
    // against the tail derivatives
    auto scale4pi = [](const std::vector<double>& v) {
        std::vector<double> out(v.size());
        for (std::size_t i = 0; i < v.size(); ++i)
            out[i] = 4.0 * M_PI * v[i];
        return out;
    };
    const std::vector<double> g1 = scale4pi(fields.rho.values());
    const std::vector<double> g2 = scale4pi(fields.j_phi.values());
    const std::vector<double> g3 = scale4pi(fields.j_z.values());
    const double dphi_in = -tr.moment_to(g1, 1, R0) / R0;
    const double daz_in = -tr.moment_to(g3, 1, R0) / R0;
    const RadialTransform::Cumulative cum2 = tr.cumulative(g2);
    const double daphi_in = -0.5 * cum2.m0.back() - 0.5 * cum2.m2.back() / (R0 * R0);

    ext.phi_deriv_jump = std::abs(dphi_in - (-4.0 * M_PI * a / R0));
    ext.a_z_deriv_jump = std::abs(daz_in - (-4.0 * M_PI * b / R0));
    ext.a_phi_deriv_jump =
        std::abs(daphi_in - (-2.0 * M_PI * c - ext.a_phi_inverse / (R0 * R0)));
    return ext;
}

} // namespace vmcyl
