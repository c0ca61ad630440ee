#pragma once

#include <span>
#include <utility>

#include "vmcyl/model.hpp"

namespace vmcyl {

// Orders of the nested quadrature for the source kernels.
struct QuadratureSpec {
    int n_theta = 64;  // periodic trapezoid nodes (even)
    int n_energy = 12; // Gauss nodes per energy panel
    int n_g = 12;      // Gauss nodes per axial-momentum panel
    double guard = 1e-6; // order-doubling truncation guard
    int energy_panels = 4;
    int g_panels = 4;

    void validate() const;
    QuadratureSpec doubled() const;
};

// Arguments of the source kernels: radius and the local potential values
// (phi, A_phi_tot, A_z_tot) at that radius.
struct SourcePoint {
    double r = 0.0, a = 0.0, b = 0.0, c = 0.0;
};

// The three source kernels evaluated at one point; these carry the factor
// 4*pi, i.e. they equal 4*pi*(charge density, azimuthal current, axial
// current) when evaluated on a potential triple.
struct SourceTriple {
    double rho = 0.0, j_phi = 0.0, j_z = 0.0;
};

SourceTriple scaled_sources(const Species& sp, const SourcePoint& p,
                            const QuadratureSpec& quad);
SourceTriple scaled_sources(std::span<const Species> species, const SourcePoint& p,
                            const QuadratureSpec& quad);

// Source bound constants (c1, c2): weighted integrals of the ansatz
// majorants over the invariant plane. |g_i| <= c1 + c2 |a| pointwise.
std::pair<double, double> source_bound_constants(std::span<const Species> species,
                                                 const QuadratureSpec& quad);

// Momentum-space support bound at potential level a:
// eta vanishes for |v| >= sqrt((E_max - q a)^2 - m^2).
double momentum_support(const Species& sp, double a);

} // namespace vmcyl
