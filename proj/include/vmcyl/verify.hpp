#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "vmcyl/bounds.hpp"
#include "vmcyl/densities.hpp"
#include "vmcyl/model.hpp"

namespace vmcyl {

struct OdeOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-10;
    double event_tol = 1e-12;  // wall-crossing localization, relative to R0
    std::size_t max_steps = 5'000'000;
};

struct TrajectorySample {
    double t;
    PhaseState state;
};

struct Trajectory {
    std::vector<TrajectorySample> samples; // accepted steps, including t = 0
    std::vector<double> reflection_times;
    bool completed = false;
};

struct IntegrationError : std::runtime_error {
    double t;
    PhaseState state;
    IntegrationError(const std::string& msg, double time, PhaseState st)
        : std::runtime_error(msg), t(time), state(st)
    {
    }
};

// Integrate dx/dt = v_hat, dv/dt = q (E + v_hat x B_tot) in the fields of the
// given potentials, with specular reflection at the wall r = R0. Adaptive
// embedded 5(4) pair with dense-output event refinement.
Trajectory integrate_characteristic(const Species& sp, const PhaseState& start,
                                    const PotentialState& force_state,
                                    const ExternalPotential& ext, double horizon,
                                    const OdeOptions& opt = {});

struct AuditPlan {
    int samples = 100;
    double horizon = 50.0;
    std::uint64_t seed = 1;
    double drift_tol = 1e-6;
    OdeOptions ode;
    // Control knob: the force fields see phi scaled by (1 + phi_perturbation)
    // while the distribution and its invariants keep the unperturbed state.
    double phi_perturbation = 0.0;
    // When positive, a share of the starting radii is drawn near this radius.
    double near_wall_radius = 0.0;
    double near_wall_fraction = 0.2;
    int threads = 1;
};

struct TrajectoryAudit {
    PhaseState start;
    int species_index = 0;
    double drift_energy = 0.0, drift_p_phi = 0.0, drift_p_z = 0.0, drift_f = 0.0;
    int reflections = 0;
};

struct AuditReport {
    std::vector<TrajectoryAudit> trajectories;
    double max_drift_energy = 0.0, max_drift_p_phi = 0.0, max_drift_p_z = 0.0,
           max_drift_f = 0.0;
    double max_drift = 0.0;
    bool pass = false;
    std::uint64_t seed = 0;
    std::size_t grid_n = 0;
    double drift_tol = 0.0;
};

// Sample initial states inside the support of the distribution, trace each
// characteristic over the horizon and report the worst relative drift of the
// three invariants and of f itself.
AuditReport audit_stationarity(std::span<const Species> species, const PotentialState& state,
                               const ExternalPotential& ext, const AuditPlan& plan);

} // namespace vmcyl
