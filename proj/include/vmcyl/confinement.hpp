#pragma once

#include <span>
#include <string>
#include <vector>

#include "vmcyl/bounds.hpp"
#include "vmcyl/model.hpp"
#include "vmcyl/solver.hpp"

namespace vmcyl {

// The four external-field options: confinement by an axial field generated
// by A_phi_ext (theta modes) or an azimuthal field generated by A_z_ext
// (z modes), each with the two charge-sign pairings.
enum class PinchMode { theta_a, theta_b, z_a, z_b };

const char* pinch_mode_name(PinchMode m);
PinchMode parse_pinch_mode(const std::string& s);

struct PinchSpec {
    PinchMode mode = PinchMode::theta_a;
    double target_radius = 0.0; // R, strictly inside (0, R0)
};

// Throws std::invalid_argument when the ansatz cutoff structure of any
// species is inconsistent with the mode (e.g. theta_a needs the angular
// window of negative species to end at 0).
void validate_mode_ansatz(const PinchSpec& spec, std::span<const Species> species);

// Axial cutoff used by the z-mode threshold for one species; the explicit
// ansatz cutoff when set, otherwise the relevant window edge.
double resolve_axial_cutoff(const Species& sp, PinchMode mode);

// Required magnitude of A_phi_ext at radius r (theta modes):
//   max over species of sqrt((E0 + |q| xi(r))^2 - m^2)/|q| + zeta(r)
double theta_pinch_threshold(std::span<const Species> species, const EnvelopeBounds& env,
                             double r);

// Required magnitude of A_z_ext at radius r (z modes):
//   max over species of (|G0| + sqrt((E0 + |q| xi(r))^2 - m^2))/|q| + xi(r)
double z_pinch_threshold(std::span<const Species> species, const EnvelopeBounds& env,
                         PinchMode mode, double r);

struct ConfinementVerdict {
    bool pass = false;
    double worst_margin = 0.0; // min over [R, R0] of the mode inequality slack
    double worst_radius = 0.0;
    std::string detail;
};

ConfinementVerdict check_confinement(const ExternalPotential& ext, const PinchSpec& spec,
                                     std::span<const Species> species,
                                     const EnvelopeBounds& env,
                                     const std::vector<double>& grid);

// Threshold slope for the uniform-axial-field potential A_phi_ext = b r:
//   sup over [R, R0] of theta threshold(r) / r.
double uniform_field_threshold(std::span<const Species> species, const EnvelopeBounds& env,
                               double R, double R0, int scan_n = 4097);

// Momentum-space support bound of any state obeying the envelopes:
// f vanishes for |v| >= max over species of sqrt((E0 + |q| xi(R0))^2 - m^2).
double support_momentum_radius(std::span<const Species> species, const EnvelopeBounds& env,
                               double R0);

// Per-species slice particle number 2 pi ∫ r (∫ f dv) dr; positive for a
// nontrivial state.
std::vector<double> slice_numbers(std::span<const Species> species, const PotentialState& state,
                                  const ExternalPotential& ext, const QuadratureSpec& quad,
                                  int threads = 1);

} // namespace vmcyl
