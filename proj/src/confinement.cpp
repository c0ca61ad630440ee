#include "vmcyl/confinement.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vmcyl/densities.hpp"
#include "vmcyl/quadrature.hpp"

namespace vmcyl {

const char* pinch_mode_name(PinchMode m)
{
    switch (m) {
    case PinchMode::theta_a:
        return "theta-a";
    case PinchMode::theta_b:
        return "theta-b";
    case PinchMode::z_a:
        return "z-a";
    case PinchMode::z_b:
        return "z-b";
    }
    return "?";
}

PinchMode parse_pinch_mode(const std::string& s)
{
    if (s == "theta-a")
        return PinchMode::theta_a;
    if (s == "theta-b")
        return PinchMode::theta_b;
    if (s == "z-a")
        return PinchMode::z_a;
    if (s == "z-b")
        return PinchMode::z_b;
    throw std::invalid_argument("unknown pinch mode: " + s);
}

namespace {

bool theta_mode(PinchMode m)
{
    return m == PinchMode::theta_a || m == PinchMode::theta_b;
}

// returns +1 when the species' angular window must sit in F >= 0,
// -1 when it must sit in F <= 0
int required_f_side(PinchMode mode, double charge)
{
    const bool neg = charge < 0.0;
    if (mode == PinchMode::theta_a)
        return neg ? -1 : +1;
    return neg ? +1 : -1; // theta_b
}

} // namespace

void validate_mode_ansatz(const PinchSpec& spec, std::span<const Species> species)
{
    if (species.empty())
        throw std::invalid_argument("confinement: species list is empty");
    for (const Species& sp : species) {
        const AnsatzFamily& a = sp.ansatz;
        if (!(a.support_energy_max() > sp.mass))
            throw std::invalid_argument("confinement: species " + sp.name +
                                        " has energy cutoff below its rest mass");
        if (theta_mode(spec.mode)) {
            if (a.kind != AnsatzKind::product_cutoff || !a.f_window.active)
                throw std::invalid_argument("confinement: species " + sp.name +
                                            " needs an angular-momentum window for theta modes");
            const int side = required_f_side(spec.mode, sp.charge);
            if (side < 0 && !(a.f_window.hi <= 0.0))
                throw std::invalid_argument(
                    "confinement: species " + sp.name +
                    " must vanish for nonnegative angular momentum in mode " +
                    pinch_mode_name(spec.mode));
            if (side > 0 && !(a.f_window.lo >= 0.0))
                throw std::invalid_argument(
                    "confinement: species " + sp.name +
                    " must vanish for nonpositive angular momentum in mode " +
                    pinch_mode_name(spec.mode));
        } else {
            // z modes need the axial cutoff on the proper side
            const double g0 = resolve_axial_cutoff(sp, spec.mode);
            const bool neg = sp.charge < 0.0;
            const bool lower_side = (spec.mode == PinchMode::z_a) ? neg : !neg;
            if (lower_side && !(g0 < 0.0))
                throw std::invalid_argument("confinement: species " + sp.name +
                                            " needs a negative axial cutoff in mode " +
                                            pinch_mode_name(spec.mode));
            if (!lower_side && !(g0 > 0.0))
                throw std::invalid_argument("confinement: species " + sp.name +
                                            " needs a positive axial cutoff in mode " +
                                            pinch_mode_name(spec.mode));
        }
    }
}

double resolve_axial_cutoff(const Species& sp, PinchMode mode)
{
    const AnsatzFamily& a = sp.ansatz;
    if (a.kind == AnsatzKind::product_cutoff && a.g_cutoff)
        return *a.g_cutoff;
    const auto [lo, hi] = a.g_support();
    const bool neg = sp.charge < 0.0;
    // z_a: negative species vanish below their cutoff, positive above;
    // z_b swaps the sides.
    const bool lower_side = (mode == PinchMode::z_a) ? neg : !neg;
    return lower_side ? lo : hi;
}

double theta_pinch_threshold(std::span<const Species> species, const EnvelopeBounds& env,
                             double r)
{
    if (species.empty())
        throw std::invalid_argument("theta_pinch_threshold: species list is empty");
    const double xi = env.phi_bound(r), zeta = env.a_phi_bound(r);
    double best = 0.0;
    for (const Species& sp : species) {
        const double q = std::abs(sp.charge);
        const double e0 = sp.ansatz.support_energy_max();
        if (!(e0 >= sp.mass))
            throw std::invalid_argument("theta_pinch_threshold: energy cutoff below mass for " +
                                        sp.name);
        const double top = e0 + q * xi;
        const double val = std::sqrt(top * top - sp.mass * sp.mass) / q + zeta;
        best = std::max(best, val);
    }
    return best;
}

double z_pinch_threshold(std::span<const Species> species, const EnvelopeBounds& env,
                         PinchMode mode, double r)
{
    if (species.empty())
        throw std::invalid_argument("z_pinch_threshold: species list is empty");
    if (theta_mode(mode))
        throw std::invalid_argument("z_pinch_threshold: z mode required");
    const double xi = env.phi_bound(r);
    double best = 0.0;
    for (const Species& sp : species) {
        const double q = std::abs(sp.charge);
        const double e0 = sp.ansatz.support_energy_max();
        if (!(e0 >= sp.mass))
            throw std::invalid_argument("z_pinch_threshold: energy cutoff below mass for " +
                                        sp.name);
        const double g0 = resolve_axial_cutoff(sp, mode);
        const double top = e0 + q * xi;
        const double val =
            (std::abs(g0) + std::sqrt(top * top - sp.mass * sp.mass)) / q + xi;
        best = std::max(best, val);
    }
    return best;
}

ConfinementVerdict check_confinement(const ExternalPotential& ext, const PinchSpec& spec,
                                     std::span<const Species> species,
                                     const EnvelopeBounds& env,
                                     const std::vector<double>& grid)
{
    const double R0 = grid.back();
    if (!(spec.target_radius > 0.0) || !(spec.target_radius < R0))
        throw std::invalid_argument("check_confinement: target radius outside (0, R0)");
    validate_mode_ansatz(spec, species);

    ConfinementVerdict verdict;
    verdict.worst_margin = 1e300;
    for (double r : grid) {
        if (r < spec.target_radius)
            continue;
        double margin = 0.0;
        switch (spec.mode) {
        case PinchMode::theta_a:
            margin = -theta_pinch_threshold(species, env, r) - ext.a_phi.value(r);
            break;
        case PinchMode::theta_b:
            margin = ext.a_phi.value(r) - theta_pinch_threshold(species, env, r);
            break;
        case PinchMode::z_a:
            margin = ext.a_z.value(r) - z_pinch_threshold(species, env, spec.mode, r);
            break;
        case PinchMode::z_b:
            margin = -z_pinch_threshold(species, env, spec.mode, r) - ext.a_z.value(r);
            break;
        }
        if (margin < verdict.worst_margin) {
            verdict.worst_margin = margin;
            verdict.worst_radius = r;
        }
    }
    verdict.pass = verdict.worst_margin >= 0.0;
    verdict.detail = std::string(pinch_mode_name(spec.mode)) + ": worst margin " +
                     std::to_string(verdict.worst_margin) + " at r = " +
                     std::to_string(verdict.worst_radius);
    return verdict;
}

double uniform_field_threshold(std::span<const Species> species, const EnvelopeBounds& env,
                               double R, double R0, int scan_n)
{
    if (!(R > 0.0) || !(R < R0))
        throw std::invalid_argument("uniform_field_threshold: need 0 < R < R0");
    double best = 0.0;
    for (int i = 0; i < scan_n; ++i) {
        const double r = R + (R0 - R) * double(i) / double(scan_n - 1);
        best = std::max(best, theta_pinch_threshold(species, env, r) / r);
    }
    return best;
}

double support_momentum_radius(std::span<const Species> species, const EnvelopeBounds& env,
                               double R0)
{
    const double xi = env.phi_bound(R0);
    double best = 0.0;
    for (const Species& sp : species) {
        const double top = sp.ansatz.support_energy_max() + std::abs(sp.charge) * xi;
        if (top > sp.mass)
            best = std::max(best, std::sqrt(top * top - sp.mass * sp.mass));
    }
    return best;
}

std::vector<double> slice_numbers(std::span<const Species> species, const PotentialState& state,
                                  const ExternalPotential& ext, const QuadratureSpec& quad,
                                  int threads)
{
    const std::vector<double>& grid = state.grid();
    RadialTransform tr(grid);
    std::vector<double> out;
    out.reserve(species.size());
    for (const Species& sp : species) {
        std::vector<double> density(grid.size(), 0.0);
        parallel_for(grid.size(), threads, [&](std::size_t i) {
            const double r = grid[i];
            SourcePoint p{r, state.phi.values()[i],
                          state.a_phi.values()[i] + ext.a_phi.value(r),
                          state.a_z.values()[i] + ext.a_z.value(r)};
            const SourceTriple t = scaled_sources(sp, p, quad);
            // number density: strip the 4 pi charge weighting
            density[i] = t.rho / (4.0 * M_PI * sp.charge);
        });
        out.push_back(2.0 * M_PI * tr.moment_to(density, 1, grid.back()));
    }
    return out;
}

} // namespace vmcyl
