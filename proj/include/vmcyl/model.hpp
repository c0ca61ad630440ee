#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "vmcyl/radial.hpp"

namespace vmcyl {

// Normalized C^{k-1} polynomial bump on [lo, hi]:
//   w(x) = ((x - lo)(hi - x))^k / ((hi - lo)/2)^{2k},  peak 1 at the midpoint.
struct BumpWindow {
    double lo = 0.0, hi = 0.0;
    int exponent = 4;
    bool active = false;

    double value(double x) const;
    double slope(double x) const;
    double max_slope() const;        // sup |w'|
    double integral() const;         // ∫ w dx
    double abs_first_moment() const; // ∫ |x| w(x) dx
};

// C1 tensor-product Hermite interpolation on a 3-d grid, zero outside the box.
struct Table3 {
    std::vector<double> e, f, g; // strictly increasing axes
    std::vector<double> val;     // e-major: val[(ie*nf + if)*ng + ig]

    void finalize(); // precompute per-axis slopes, validate
    double value(double E, double F, double G) const;
    std::array<double, 3> gradient(double E, double F, double G) const;
    bool empty() const { return val.empty(); }

    std::vector<double> de, df, dg; // per-axis Hermite slopes
};

// Same scheme on a 2-d (E, G) grid; used for user-supplied majorants.
struct Table2 {
    std::vector<double> e, g;
    std::vector<double> val; // val[ie*ng + ig]

    void finalize();
    double value(double E, double G) const;
    bool empty() const { return val.empty(); }

    std::vector<double> de, dg;
};

enum class AnsatzKind { product_cutoff, tabulated };

// Prescribed dependence of the distribution on the three invariants
// (particle energy, canonical angular momentum, canonical axial momentum).
class AnsatzFamily {
public:
    AnsatzKind kind = AnsatzKind::product_cutoff;

    // product-cutoff parameters
    double amplitude = 0.0;
    int exponent = 4;           // smoothness exponent k >= 2
    double energy_cutoff = 0.0; // vanishes for E >= energy_cutoff
    double energy_floor = 0.0;  // lower edge of the energy window
    BumpWindow f_window;        // optional window in the angular invariant
    BumpWindow g_window;        // window in the axial invariant (required)
    std::optional<double> g_cutoff; // explicit axial cutoff for z-pinch modes
    bool nontrivial = false;

    // tabulated parameters
    Table3 table;
    Table2 table_majorant;      // pointwise dominates |eta|
    Table2 table_grad_majorant; // pointwise dominates |grad eta|

    void validate(double mass) const; // throws std::invalid_argument

    double value(double E, double F, double G) const;
    std::array<double, 3> gradient(double E, double F, double G) const;
    double majorant(double E, double G) const;
    double gradient_majorant(double E, double G) const;

    bool f_independent() const;
    double support_energy_max() const;
    double support_energy_min() const;
    std::pair<double, double> g_support() const;

    static AnsatzFamily product(double amplitude, int exponent, double energy_cutoff,
                                double energy_floor, std::optional<std::pair<double, double>> f_win,
                                std::pair<double, double> g_win, bool nontrivial = true);
};

// One particle population: rest mass, charge and its ansatz.
struct Species {
    std::string name;
    double mass = 1.0;   // > 0, natural units with c = 1
    double charge = -1.0; // != 0
    AnsatzFamily ansatz;

    Species() = default;
    Species(std::string name, double mass, double charge, AnsatzFamily ansatz);
};

// One component of the external vector potential as a function of r.
struct ExternalComponent {
    enum class Kind { zero, linear, ramp, constant, tabulated };
    Kind kind = Kind::zero;
    double coeff = 0.0;       // slope (linear) or amplitude (ramp, constant)
    double ramp_radius = 1.0; // the ramp saturates at this radius
    RadialProfile table;

    double value(double r) const;
    double derivative(double r) const;

    static ExternalComponent zero();
    static ExternalComponent linear(double slope);
    static ExternalComponent ramp(double amplitude, double radius);
    static ExternalComponent constant(double amplitude);
    static ExternalComponent tabulated(RadialProfile profile);
};

struct ExternalPotential {
    ExternalComponent a_phi, a_z;

    // Violations of the admissibility conditions at r = 0 (value/derivative)
    // and of C1 regularity at grid resolution. The constant kind is usable
    // for confinement diagnostics but is reported here.
    std::vector<std::string> condition_violations(double R0, std::size_t check_n = 129) const;
};

struct PhaseState {
    std::array<double, 3> x{0.0, 0.0, 0.0};
    std::array<double, 3> v{0.0, 0.0, 0.0};

    double radius() const;
    double v_r() const;   // radial momentum component (local basis)
    double v_phi() const; // azimuthal momentum component
    double speed() const;
};

// The three invariants of the single-particle motion.
struct Invariants {
    double energy; // sqrt(m^2 + |v|^2) + q phi
    double p_phi;  // r (v_phi + q A_phi_tot)
    double p_z;    // v_3 + q A_z_tot
};

Invariants invariants(const Species& sp, const PotentialState& pot,
                      const ExternalPotential& ext, const PhaseState& st);

double eval_ansatz(const Species& sp, double E, double F, double G);

double eval_f(const Species& sp, const PotentialState& pot,
              const ExternalPotential& ext, const PhaseState& st);

} // namespace vmcyl
