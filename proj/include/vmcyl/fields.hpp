#pragma once

#include <span>

#include "vmcyl/model.hpp"
#include "vmcyl/solver.hpp"

namespace vmcyl {

// Radial field and density profiles of a state. By symmetry E_phi, E_3 and
// B_r vanish identically and are not stored; j_r = 0.
struct FieldProfiles {
    RadialProfile e_r;     // -phi'
    RadialProfile b_phi;   // -A_3'
    RadialProfile b_z;     // (1/r)(r A_phi)', axis value 2 A_phi'(0)
    RadialProfile b_phi_ext, b_z_ext;
    RadialProfile rho, j_phi, j_z; // physical densities (no 4 pi factor)
};

FieldProfiles reconstruct_fields(const PotentialState& state, const ExternalPotential& ext,
                                 std::span<const Species> species, const QuadratureSpec& quad,
                                 int threads = 1);
FieldProfiles reconstruct_fields(const PotentialState& state, const ExternalPotential& ext,
                                 const GridSources& src);

// Sup-norm residuals of the three radial field equations, second-order
// finite differences at interior nodes r >= interior_margin * R0 (the
// coordinate-singular axis neighborhood is excluded; axis regularity is
// checked separately through the vanishing value and slope at r = 0).
struct OdeResiduals {
    double phi = 0.0, a_phi = 0.0, a_z = 0.0;
    double interior_margin = 0.0;
};
OdeResiduals ode_residuals(const PotentialState& state, const FieldProfiles& fields,
                           double interior_margin = 0.04);

// Source-free continuation of a confined state past the wall: logarithmic
// tails for phi and A_3, a linear-plus-inverse tail for A_phi. Slopes come
// from the slice moments of the sources, constants from value continuity at
// the base radius.
struct VacuumExtension {
    double charge_moment = 0.0;            // a = ∫_0^R s rho ds
    double axial_current_moment = 0.0;     // b = ∫_0^R s j_z ds
    double azimuthal_current_moment = 0.0; // c = ∫_0^R j_phi ds
    double base_radius = 0.0;
    double phi_const = 0.0;       // phi_tail = -4 pi a ln r + phi_const
    double a_z_const = 0.0;       // a_z_tail = -4 pi b ln r + a_z_const
    double a_phi_inverse = 0.0;   // a_phi_tail = -2 pi c r + a_phi_inverse / r
    double phi_value_jump = 0.0, a_phi_value_jump = 0.0, a_z_value_jump = 0.0;
    double phi_deriv_jump = 0.0, a_phi_deriv_jump = 0.0, a_z_deriv_jump = 0.0;

    double phi_tail(double r) const;
    double a_z_tail(double r) const;
    double a_phi_tail(double r) const;
};

VacuumExtension extend_vacuum(const PotentialState& state, const FieldProfiles& fields,
                              double confinement_radius, double density_floor = 1e-12);

} // namespace vmcyl
